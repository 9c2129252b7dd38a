import math

import numpy as np
import pytest

from kpho.model import (
    DomainError,
    EnergyPoint,
    LatticeConfig,
    PoleError,
    big_m,
    kappa_b,
    kappa_x0,
    little_m,
    mean_potential,
    potential_value,
    q_x0,
)
from kpho.special_functions import kummer_m


def test_derived_geometry(cfg6):
    assert cfg6.b_over_l == pytest.approx(1 / 3)
    assert (cfg6.w_over_l / (2 * cfg6.x0_over_l)) ** 2 == pytest.approx(6.0)
    assert kappa_b(0.0, cfg6) == pytest.approx(cfg6.kappa_b_coeff)
    assert cfg6.e1 == pytest.approx(math.pi**2 * cfg6.w_over_l**2 / (4 * 6.0))


@pytest.mark.parametrize("v0,w", [(0.0, 0.5), (-1.0, 0.5), (6.0, 0.0), (6.0, 1.2)])
def test_invalid_config(v0, w):
    with pytest.raises(ValueError):
        LatticeConfig(v0, w)


def test_full_cell_well_allowed():
    cfg = LatticeConfig(3.0, 1.0)
    assert cfg.b_over_l == 0.0
    assert mean_potential(cfg) == pytest.approx(1.0)


def test_text_round_trip(cfg6):
    assert LatticeConfig.from_text(cfg6.to_text()) == cfg6
    assert LatticeConfig.from_text("# comment\nv0 = 2\nw_over_l=0.5\n") == LatticeConfig(2.0, 0.5)
    with pytest.raises(ValueError, match="w_over_l"):
        LatticeConfig.from_text("v0=2\n")
    with pytest.raises(ValueError):
        LatticeConfig.from_text("v0 2\n")


def test_from_barrier():
    assert LatticeConfig.from_barrier(5.0, 0.2).w_over_l == pytest.approx(0.8)


def test_classify(cfg6):
    assert EnergyPoint.classify(1.0, cfg6).regime == "below_barrier"
    assert EnergyPoint.classify(7.0, cfg6).regime == "above_barrier"
    with pytest.raises(DomainError):
        EnergyPoint.classify(6.0 + 1e-13, cfg6)


def test_wavenumbers(cfg6):
    assert kappa_x0(0.0, cfg6) == pytest.approx(math.sqrt(6))
    assert kappa_x0(2.0, cfg6) == pytest.approx(2.0)
    assert q_x0(10.0, cfg6) == pytest.approx(2.0)
    assert q_x0(7.0, cfg6) == pytest.approx(1.0)
    for bad in (kappa_x0, q_x0):
        with pytest.raises(DomainError):
            bad(6.0, cfg6)
    for eps in np.linspace(0, 5.9, 7):
        assert kappa_x0(eps, cfg6) ** 2 + eps == pytest.approx(6.0, abs=1e-14)


def _series(a, b, z, n_terms=2000):
    total, term = 1.0, 1.0
    for n in range(n_terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        total += term
    return total


def test_big_m(cfg6):
    assert big_m(1, 1, 1.0, cfg6) == 1.0
    assert big_m(3, 3, 3.0, cfg6) == 1.0
    assert big_m(5, 3, 1.0, cfg6) == pytest.approx(_series(1.0, 1.5, 6.0), rel=1e-14)
    with pytest.raises(ValueError):
        big_m(3, 1, 1.0, cfg6)


def test_little_m(cfg6):
    assert little_m(5, 3, 1.0, cfg6) == pytest.approx(kummer_m(1.0, 1.5, 6.0))
    assert little_m(7, 5, 3.0, cfg6) == pytest.approx(kummer_m(1.0, 2.5, 6.0))
    eps = 0.9371
    quotient = _series((5 - eps) / 4, 1.5, 6.0) / _series((1 - eps) / 4, 0.5, 6.0)
    assert little_m(5, 3, eps, cfg6) == pytest.approx(quotient, rel=1e-12)
    with pytest.raises(ValueError):
        little_m(1, 1, 1.0, cfg6)


def test_little_m_pole():
    # M(-1, 1/2, z) = 1 - 2z vanishes at z = 1/2; eps = 5 gives a = -1
    cfg = LatticeConfig(0.5, 0.5)
    with pytest.raises(PoleError):
        little_m(5, 3, 5.0, cfg)


@pytest.mark.parametrize("v0", [1.5, 2.0, 3.0, 5.0, 6.0])
def test_little_m_signs_on_figure_range(v0):
    cfg = LatticeConfig(v0, 2 / 3)
    top = min(1.5, v0) - 1e-6
    for eps in np.linspace(0.0, top, 40):
        assert 0 < little_m(7, 5, eps, cfg) < math.inf
    # m_53 is positive up to eps = 1; for deeper wells M_11 has its first zero just above 1
    for eps in np.linspace(0.0, 1.0, 20):
        assert 0 < little_m(5, 3, eps, cfg) < math.inf
    m11 = [big_m(1, 1, e, cfg) for e in np.linspace(1.0, top, 200)]
    assert (min(m11) < 0) == (v0 >= 2.0)


def test_mean_potential(cfg6):
    assert mean_potential(cfg6) == pytest.approx(10 / 3)
    assert mean_potential(LatticeConfig(4.0, 1e-12)) == pytest.approx(4.0)


def test_potential_value(cfg6):
    half = cfg6.w_over_l / 2
    assert potential_value(0.0, cfg6) == 0.0
    assert potential_value(half, cfg6) == pytest.approx(6.0)
    assert potential_value(-half, cfg6) == pytest.approx(6.0)
    assert potential_value(0.5, cfg6) == 6.0
    assert potential_value(np.nextafter(half, 0), cfg6) == pytest.approx(6.0, rel=1e-14)
    arr = potential_value(np.array([0.0, 0.5]), cfg6)
    assert isinstance(arr, np.ndarray) and arr.tolist() == [0.0, 6.0]
