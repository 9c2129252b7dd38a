"""First-order tight-binding description of the lowest (even) band.

Multiplying the factored dispersion relation through by 2 exp(-kappa b)
(X_75 + X_53) gives the exact identity

    f_even f_odd - eta1 cos(k l) - eta2 = 0,

with eta1 = 2 exp(-kappa b) (X_75 + X_53) and
eta2 = exp(-2 kappa b) [f_even f_odd - 2 (X_75 - X_53)]. Expanding f_even
to first order about an isolated even root eps0 and dropping eta2 gives
eps(k) = eps0 (1 + rho(k)) = eps0 - 2 t1 cos(k l).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .bloch import Band, band_structure, x53, x75
from .model import DomainError, LatticeConfig, kappa_b, little_m
from .single_well import SpectralEquation, f_even, f_odd, find_levels
from .special_functions import kummer_log_deriv_a

# standard comparison panels as (v0, b/l): a depth sweep at b/l = 0.2 and a barrier sweep at v0 = 3
PANELS = (
    (1.5, 0.2), (2.0, 0.2), (3.0, 0.2), (5.0, 0.2),
    (3.0, 0.1), (3.0, 0.2), (3.0, 0.3), (3.0, 0.4),
)
AGREEMENT_FRACTION = 0.02


def eta1(eps: float, cfg: LatticeConfig) -> float:
    """-2 exp(-kappa b) [v0 (1 - eps) m_53 - v0 (1 - eps/3) m_75 - 1]."""
    kb = kappa_b(eps, cfg)
    v0 = cfg.v0
    inner = v0 * (1.0 - eps) * little_m(5, 3, eps, cfg) - v0 * (1.0 - eps / 3.0) * little_m(7, 5, eps, cfg) - 1.0
    return -2.0 * math.exp(-kb) * inner


def eta2(eps: float, cfg: LatticeConfig) -> float:
    """exp(-2 kappa b) [f_even f_odd - 2 (X_75 - X_53)]."""
    kb = kappa_b(eps, cfg)
    return math.exp(-2.0 * kb) * (f_even(eps, cfg) * f_odd(eps, cfg) - 2.0 * (x75(eps, cfg) - x53(eps, cfg)))


def exactness_residual(eps: float, k_l: float, cfg: LatticeConfig) -> float:
    return f_even(eps, cfg) * f_odd(eps, cfg) - eta1(eps, cfg) * math.cos(k_l) - eta2(eps, cfg)


def ground_even_level(cfg: LatticeConfig) -> float:
    """Lowest isolated-well even root, the zeroth-order band centre."""
    levels = find_levels(SpectralEquation("isolated_even", cfg))
    if not levels.levels:
        raise DomainError(f"no isolated even level below v0={cfg.v0}")
    return levels.levels[0].eps


def _n(i: int, j: int, eps0: float, cfg: LatticeConfig) -> float:
    return kummer_log_deriv_a((i - eps0) / 4.0, j / 2.0, cfg.v0)


def g_fn(eps0: float, cfg: LatticeConfig) -> float:
    """2 / sqrt(1 - eps0/v0) + 4 v0 m_53 [1 + (1 - eps0)(n_53 - n_11) / 4]."""
    if not eps0 < cfg.v0:
        raise DomainError(f"g needs eps0 < v0 (eps0={eps0}, v0={cfg.v0})")
    root = math.sqrt(1.0 - eps0 / cfg.v0)
    m53 = little_m(5, 3, eps0, cfg)
    return 2.0 / root + 4.0 * cfg.v0 * m53 * (1.0 + 0.25 * (1.0 - eps0) * (_n(5, 3, eps0, cfg) - _n(1, 1, eps0, cfg)))


def _hopping_ratio(eps0: float, cfg: LatticeConfig) -> float:
    """sqrt(1 - eps0/v0) eta1(eps0) / [f_odd(eps0) g(eps0)]."""
    fo = f_odd(eps0, cfg)
    if fo == 0.0:
        raise ZeroDivisionError(f"f_odd vanishes at eps0={eps0} (even/odd degeneracy)")
    return math.sqrt(1.0 - eps0 / cfg.v0) * eta1(eps0, cfg) / (fo * g_fn(eps0, cfg))


def rho(k_l: float, eps0: float, cfg: LatticeConfig) -> float:
    """Relative first-order shift -(4 v0 / eps0) sqrt(1 - eps0/v0) eta1 / (f_odd g) cos(k l)."""
    if eps0 == 0.0:
        raise ZeroDivisionError("rho is undefined at eps0 = 0")
    return -4.0 * cfg.v0 / eps0 * _hopping_ratio(eps0, cfg) * math.cos(k_l)


def hopping_t1(eps0: float, cfg: LatticeConfig) -> float:
    """2 v0 sqrt(1 - eps0/v0) eta1 / (f_odd g); eps_TB(k) = eps0 - 2 t1 cos(k l)."""
    return 2.0 * cfg.v0 * _hopping_ratio(eps0, cfg)


def tb_dispersion(k_l, eps0: float, t1: float):
    return eps0 - 2.0 * t1 * np.cos(k_l)


def fit_cosine_harmonics(k_l, eps, n_harmonics: int) -> tuple[float, list[float]]:
    """Project eps(k) on {1, cos(k l), ..., cos(n k l)} over the half zone.

    Trapezoid weights on a uniform [0, pi] grid are exact for the even
    extension, so a pure cosine series is recovered to round-off. Returns
    (eps0_fit, [t_1, ..., t_n]) with eps = eps0 - 2 sum t_m cos(m k l).
    """
    k = np.asarray(k_l, dtype=float)
    e = np.asarray(eps, dtype=float)
    if n_harmonics < 1:
        raise ValueError("n_harmonics must be >= 1")
    if k.size < 2 * n_harmonics:
        raise ValueError(f"need at least {2 * n_harmonics} samples for {n_harmonics} harmonics, got {k.size}")
    weights = np.full(k.size, 1.0)
    weights[0] = weights[-1] = 0.5
    weights /= weights.sum()
    eps0 = float(np.dot(weights, e))
    ts = [float(-np.dot(weights, e * np.cos(m * k))) for m in range(1, n_harmonics + 1)]
    return eps0, ts


@dataclass
class TightBindingFit:
    v0: float
    b_over_l: float
    eps0: float
    t1: float
    eta1_at_eps0: float
    eta2_at_eps0: float
    max_abs_dev: float
    bandwidth_exact: float
    k_l: np.ndarray
    eps_exact: np.ndarray
    eps_tb: np.ndarray

    @property
    def max_dev_over_bandwidth(self) -> float:
        return self.max_abs_dev / self.bandwidth_exact

    @property
    def agrees(self) -> bool:
        return self.max_dev_over_bandwidth <= AGREEMENT_FRACTION

    @property
    def mean_shift(self) -> float:
        """Half-zone average of eps_exact - eps0 (trapezoid rule)."""
        return float(np.trapezoid(self.eps_exact - self.eps0, self.k_l) / math.pi)

    def records(self) -> list[dict]:
        return [
            {"k_l_over_pi": float(k / math.pi), "eps_exact": float(a), "eps_tb": float(b), "eps0": self.eps0}
            for k, a, b in zip(self.k_l, self.eps_exact, self.eps_tb)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k_l_over_pi", "eps_exact", "eps_tb", "eps0"])
        for r in self.records():
            writer.writerow([f"{r[c]:.17g}" for c in ("k_l_over_pi", "eps_exact", "eps_tb", "eps0")])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "v0": self.v0,
            "b_over_l": self.b_over_l,
            "eps0": self.eps0,
            "t1": self.t1,
            "max_dev_over_bandwidth": self.max_dev_over_bandwidth,
        }


def compare_tb_exact(cfg: LatticeConfig, band_index: int = 1, n_k: int = 101, band: Band | None = None) -> TightBindingFit:
    """Exact band ``band_index`` against the first-order tight-binding band."""
    if band_index != 1:
        raise NotImplementedError("hopping extraction is implemented for the lowest (even) band only")
    eps0 = ground_even_level(cfg)
    if band is None:
        band = band_structure(cfg, band_index, n_k)[band_index - 1]
    if band.eps_max >= cfg.v0:
        raise DomainError("band 1 reaches the barrier top; tight binding does not apply")
    t1 = hopping_t1(eps0, cfg)
    eps_tb = tb_dispersion(band.k_l, eps0, t1)
    return TightBindingFit(
        v0=cfg.v0,
        b_over_l=cfg.b_over_l,
        eps0=eps0,
        t1=t1,
        eta1_at_eps0=eta1(eps0, cfg),
        eta2_at_eps0=eta2(eps0, cfg),
        max_abs_dev=float(np.abs(eps_tb - band.eps).max()),
        bandwidth_exact=band.width,
        k_l=band.k_l,
        eps_exact=band.eps,
        eps_tb=eps_tb,
    )


def sweep(panels=PANELS, n_k: int = 101) -> list[TightBindingFit]:
    fits = []
    for v0, b in panels:
        fit = compare_tb_exact(LatticeConfig.from_barrier(v0, b), n_k=n_k)
        fit.b_over_l = b  # report the requested value, not 1 - (1 - b)
        fits.append(fit)
    return fits


def sweep_csv(fits: list[TightBindingFit]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["v0", "b_over_l", "eps0", "t1", "max_dev_over_bandwidth"]
    writer.writerow(cols)
    for fit in fits:
        s = fit.summary()
        writer.writerow([f"{s[c]:.17g}" for c in cols])
    return buf.getvalue()
