import math

import numpy as np
import pytest

from kpho import bloch
from kpho import tight_binding as tb
from kpho.model import DomainError, LatticeConfig, kappa_b
from kpho.single_well import f_even

EPS0_V5 = 0.9980945893838911
T1_V5_B02 = 0.0018316779306181597


@pytest.fixture(scope="module")
def fit5(cfg5):
    return tb.compare_tb_exact(cfg5)


def test_frozen_values(cfg5):
    assert tb.ground_even_level(cfg5) == pytest.approx(EPS0_V5, abs=1e-11)
    assert tb.hopping_t1(EPS0_V5, cfg5) == pytest.approx(T1_V5_B02, rel=1e-9)


def test_exactness_on_band(cfg5):
    band = bloch.band_structure(cfg5, 1, 50)[0]
    for k, e in zip(band.k_l, band.eps):
        assert abs(tb.exactness_residual(e, k, cfg5)) < 1e-9


def test_eta1_barrier_scaling():
    # X_53, X_75 do not depend on the geometry, so eta1 carries exactly exp(-kappa b)
    eps = 0.9
    c1, c2 = LatticeConfig.from_barrier(5.0, 0.15), LatticeConfig.from_barrier(5.0, 0.3)
    ratio = math.log(abs(tb.eta1(eps, c2) / tb.eta1(eps, c1)))
    assert ratio == pytest.approx(-(kappa_b(eps, c2) - kappa_b(eps, c1)), rel=0.05)


def test_eta_hierarchy(cfg5):
    e0 = EPS0_V5
    ratio = abs(tb.eta2(e0, cfg5) / tb.eta1(e0, cfg5))
    assert ratio < 1.0
    assert ratio <= 10 * math.exp(-kappa_b(e0, cfg5))


def test_g_against_derivative_of_f_even(cfg5):
    e0, h = EPS0_V5, 1e-6
    g = tb.g_fn(e0, cfg5)
    assert math.isfinite(g) and g > 0
    slope = (f_even(e0 + h, cfg5) - f_even(e0 - h, cfg5)) / (2 * h)
    assert -g / (4 * cfg5.v0 * math.sqrt(1 - e0 / cfg5.v0)) == pytest.approx(slope, rel=0.02)
    with pytest.raises(DomainError):
        tb.g_fn(cfg5.v0, cfg5)


def test_rho_structure(cfg5):
    e0 = EPS0_V5
    assert tb.rho(math.pi / 2, e0, cfg5) == pytest.approx(0.0, abs=1e-15)
    assert tb.rho(0.0, e0, cfg5) == pytest.approx(-tb.rho(math.pi, e0, cfg5))
    t1 = tb.hopping_t1(e0, cfg5)
    for k in np.linspace(0, math.pi, 7):
        assert e0 * tb.rho(k, e0, cfg5) == pytest.approx(-2 * t1 * math.cos(k), abs=1e-15)
    with pytest.raises(ZeroDivisionError):
        tb.rho(0.0, 0.0, cfg5)


def test_rho_is_newton_shift(cfg5):
    # first-order shift from f_even f_odd = eta1 cos(k l): d_eps = eta1 cos / (f_odd f_even')
    e0, h = EPS0_V5, 1e-6
    slope = (f_even(e0 + h, cfg5) - f_even(e0 - h, cfg5)) / (2 * h)
    from kpho.single_well import f_odd

    newton = tb.eta1(e0, cfg5) / (f_odd(e0, cfg5) * slope)
    assert e0 * tb.rho(0.0, e0, cfg5) == pytest.approx(newton, rel=0.02)


def test_t1_decay_with_barrier():
    kbs, logs = [], []
    for b in (0.2, 0.3, 0.4):
        cfg = LatticeConfig.from_barrier(3.0, b)
        e0 = tb.ground_even_level(cfg)
        kbs.append(kappa_b(e0, cfg))
        logs.append(math.log(abs(tb.hopping_t1(e0, cfg))))
    slope = np.polyfit(kbs, logs, 1)[0]
    assert slope == pytest.approx(-1.0, rel=0.1)


def test_bandwidth_is_four_t1(fit5):
    assert 4 * abs(fit5.t1) == pytest.approx(fit5.bandwidth_exact, rel=0.05)


def test_fit_synthetic():
    k = np.linspace(0, math.pi, 33)
    e0, ts = tb.fit_cosine_harmonics(k, np.full_like(k, 2.5), 3)
    assert e0 == pytest.approx(2.5) and ts == pytest.approx([0, 0, 0], abs=1e-15)
    e0, ts = tb.fit_cosine_harmonics(k, 5 - 2 * 0.1 * np.cos(k), 2)
    assert e0 == pytest.approx(5.0, abs=1e-12)
    assert ts == pytest.approx([0.1, 0.0], abs=1e-12)
    with pytest.raises(ValueError):
        tb.fit_cosine_harmonics(k[:3], k[:3], 2)
    with pytest.raises(ValueError):
        tb.fit_cosine_harmonics(k, k, 0)


def test_fit_exact_band(fit5):
    _, ts = tb.fit_cosine_harmonics(fit5.k_l, fit5.eps_exact, 3)
    assert ts[0] == pytest.approx(fit5.t1, rel=0.01)
    assert abs(ts[1] / ts[0]) <= 0.05


@pytest.mark.parametrize("v0,b", [(3.0, 0.2), (5.0, 0.2), (3.0, 0.3), (3.0, 0.4)])
def test_harmonic_hierarchy(v0, b):
    band = bloch.band_structure(LatticeConfig.from_barrier(v0, b), 1, 101)[0]
    _, ts = tb.fit_cosine_harmonics(band.k_l, band.eps, 3)
    assert abs(ts[0]) > abs(ts[1]) > abs(ts[2])


def test_compare_fit(fit5):
    assert fit5.agrees
    assert fit5.eps_tb[0] + fit5.eps_tb[-1] == pytest.approx(2 * fit5.eps0, abs=1e-15)
    assert abs(fit5.eta2_at_eps0) < abs(fit5.eta1_at_eps0)
    lines = fit5.to_csv().splitlines()
    assert lines[0] == "k_l_over_pi,eps_exact,eps_tb,eps0" and len(lines) == 102


def test_shallow_panel_disagrees_and_sits_above():
    fit = tb.compare_tb_exact(LatticeConfig.from_barrier(1.5, 0.2))
    assert not fit.agrees
    assert fit.mean_shift > 0


def test_only_lowest_band(cfg5):
    with pytest.raises(NotImplementedError):
        tb.compare_tb_exact(cfg5, band_index=2)


def test_sweep_summary():
    fits = tb.sweep(((5.0, 0.2), (3.0, 0.4)), n_k=11)
    lines = tb.sweep_csv(fits).splitlines()
    assert lines[0] == "v0,b_over_l,eps0,t1,max_dev_over_bandwidth"
    assert lines[1].startswith("5,0.2")
    assert len(tb.PANELS) == 8
