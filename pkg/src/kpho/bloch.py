"""Exact Bloch bands and wavefunctions of the periodic truncated-oscillator lattice.

The dispersion relation cos(k l) = D(eps) is available in three equivalent
shapes:

* :func:`dispersion_rhs` -- the X_53 / X_75 form, continued above the barrier
  by kappa -> iQ;
* :func:`dispersion_rhs_factored` -- the tight-binding friendly factorization
  through f_even * f_odd;
* :func:`rhs` -- a pole-free evaluation built directly from the edge values of
  the even and odd well solutions. The Wronskian of those solutions is
  exp(v0) in scaled units, so X_75 + X_53 = exp(v0) / (M_11 M_33) and D(eps)
  is finite for every eps, including across eps = v0. Bands are solved on it.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .model import (
    DEGENERATE_GAP,
    DomainError,
    EnergyPoint,
    LatticeConfig,
    big_m,
    little_m,
    potential_value,
)
from .single_well import f_even, f_odd, well_solution

CLAMP_SLACK = 1e-12
X_SUM_FLOOR = 1e-300


class BandNotFound(RuntimeError):
    """Fewer allowed intervals than requested below the scan ceiling."""


class RankDeficiency(ArithmeticError):
    """The matching system has no non-trivial solution at (eps, k)."""


# --------------------------------------------------------------------------
# dispersion relation


def x53(eps: float, cfg: LatticeConfig) -> float:
    """v0 [1 - (1 - eps) m_53(eps)]."""
    return cfg.v0 * (1.0 - (1.0 - eps) * little_m(5, 3, eps, cfg))


def x75(eps: float, cfg: LatticeConfig) -> float:
    """1 - v0 + v0 (1 - eps/3) m_75(eps)."""
    v0 = cfg.v0
    return 1.0 - v0 + v0 * (1.0 - eps / 3.0) * little_m(7, 5, eps, cfg)


def _x_sum(a: float, b: float) -> float:
    s = a + b
    if abs(s) < X_SUM_FLOOR:
        raise ZeroDivisionError("X_75 + X_53 vanishes")
    return s


def dispersion_rhs(eps: float, cfg: LatticeConfig) -> float:
    """Right-hand side of cos(k l) = ... in the X_53 / X_75 form.

    Above the barrier kappa x0 -> i Q x0, so cosh(kappa b) -> cos(Q b) and
    sqrt(v0 (v0 - eps)) sinh(kappa b) -> -sqrt(v0 (eps - v0)) sin(Q b).
    """
    EnergyPoint.classify(eps, cfg)
    v0 = cfg.v0
    a, b = x53(eps, cfg), x75(eps, cfg)
    den = _x_sum(a, b)
    if eps < v0:
        kb = cfg.b_over_x0 * math.sqrt(v0 - eps)
        p2 = v0 * (v0 - eps)
        return ((b - a) * math.cosh(kb) + math.sqrt(p2) * (1.0 - a * b / p2) * math.sinh(kb)) / den
    qb = cfg.b_over_x0 * math.sqrt(eps - v0)
    p2 = v0 * (eps - v0)
    return ((b - a) * math.cos(qb) - math.sqrt(p2) * (1.0 + a * b / p2) * math.sin(qb)) / den


def dispersion_rhs_factored(eps: float, cfg: LatticeConfig) -> float:
    """[f_even f_odd sinh(kappa b) + (X_75 - X_53) exp(-kappa b)] / (X_75 + X_53).

    Below the barrier only. The exp(-kappa b) term carries the factor
    X_75 - X_53; without it the expression is not equal to the X form.
    """
    if not eps < cfg.v0:
        raise DomainError(f"factored dispersion needs eps < v0 (eps={eps}, v0={cfg.v0})")
    EnergyPoint.classify(eps, cfg)
    a, b = x53(eps, cfg), x75(eps, cfg)
    kb = cfg.b_over_x0 * math.sqrt(cfg.v0 - eps)
    return (f_even(eps, cfg) * f_odd(eps, cfg) * math.sinh(kb) + (b - a) * math.exp(-kb)) / _x_sum(a, b)


@dataclass(frozen=True)
class EdgeValues:
    """Well solutions at x = +w/2 in units scaled by exp(v0/2); derivatives in z = x/x0."""

    even: float
    even_dz: float
    odd: float
    odd_dz: float


def edge_values(eps: float, cfg: LatticeConfig) -> EdgeValues:
    v0 = cfg.v0
    rv = math.sqrt(v0)
    m11 = big_m(1, 1, eps, cfg)
    m33 = big_m(3, 3, eps, cfg)
    y = m11 - (1.0 - eps) * big_m(5, 3, eps, cfg)
    z = (1.0 - v0) * m33 + v0 * (1.0 - eps / 3.0) * big_m(7, 5, eps, cfg)
    return EdgeValues(m11, -rv * y, rv * m33, z)


def _barrier_factors(eps: float, cfg: LatticeConfig) -> tuple[float, float, float]:
    """cosh(L k), k sinh(L k), sinh(L k)/k with k = sqrt(v0 - eps), L = b/x0.

    Analytic in eps across the barrier top; above it they become
    cos(L q), -q sin(L q), sin(L q)/q with q = sqrt(eps - v0).
    """
    t = cfg.v0 - eps
    length = cfg.b_over_x0
    if abs(length * length * t) < 1e-8:
        u = length * length * t
        return 1.0 + u / 2.0, length * t * (1.0 + u / 6.0), length * (1.0 + u / 6.0)
    if t > 0:
        k = math.sqrt(t)
        return math.cosh(length * k), k * math.sinh(length * k), math.sinh(length * k) / k
    q = math.sqrt(-t)
    return math.cos(length * q), -q * math.sin(length * q), math.sin(length * q) / q


def rhs(eps: float, cfg: LatticeConfig) -> float:
    """Pole-free D(eps), valid on both sides of the barrier top."""
    ev = edge_values(eps, cfg)
    c, s1, s2 = _barrier_factors(eps, cfg)
    num = (ev.even * ev.odd_dz + ev.even_dz * ev.odd) * c + ev.even * ev.odd * s1 + ev.even_dz * ev.odd_dz * s2
    return num * math.exp(-cfg.v0)


@dataclass(frozen=True)
class DispersionSample:
    eps: float
    rhs: float
    k_l: float | None


def k_of_eps(eps: float, cfg: LatticeConfig) -> DispersionSample:
    """k l = arccos(D(eps)) in [0, pi] when eps is inside a band."""
    d = rhs(eps, cfg)
    if abs(d) > 1.0 + CLAMP_SLACK:
        return DispersionSample(eps, d, None)
    return DispersionSample(eps, d, math.acos(max(-1.0, min(1.0, d))))


# --------------------------------------------------------------------------
# bands


@dataclass
class Band:
    band_index: int
    k_l: np.ndarray
    eps: np.ndarray
    edge_k0: float = field(default=math.nan)
    edge_kpi: float = field(default=math.nan)

    @property
    def eps_min(self) -> float:
        return float(self.eps.min())

    @property
    def eps_max(self) -> float:
        return float(self.eps.max())

    @property
    def width(self) -> float:
        return self.eps_max - self.eps_min

    @property
    def center(self) -> float:
        return 0.5 * (self.eps_min + self.eps_max)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.k_l.tolist(), self.eps.tolist()))


def _solve(fn, lo: float, hi: float) -> float:
    return brentq(fn, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def _gap_peak(cfg: LatticeConfig, xs: np.ndarray, ds: np.ndarray, lo: float, hi: float) -> float:
    """Energy of the largest |D| between two consecutive zeros of D (inside the gap)."""
    inside = (xs > lo) & (xs < hi)
    if not inside.any():
        return minimize_scalar(lambda e: -abs(rhs(e, cfg)), bounds=(lo, hi), method="bounded",
                               options={"xatol": 1e-14}).x
    i = int(np.flatnonzero(inside)[np.argmax(np.abs(ds[inside]))])
    a, b = max(lo, float(xs[i - 1])), min(hi, float(xs[i + 1]))
    if abs(ds[i]) > 1.0:
        return float(xs[i])
    res = minimize_scalar(lambda e: -abs(rhs(e, cfg)), bounds=(a, b), method="bounded", options={"xatol": 1e-14})
    return float(res.x) if -res.fun >= abs(ds[i]) else float(xs[i])


def _edge(cfg: LatticeConfig, inner: float, outer: float) -> float:
    """D = +-1 crossing between a band's zero (inner) and the gap peak (outer)."""
    d_out = rhs(outer, cfg)
    if abs(d_out) < 1.0:  # gap closed to round-off: the bands touch at the peak
        return outer
    target = math.copysign(1.0, d_out)
    lo, hi = sorted((inner, outer))
    return _solve(lambda e: rhs(e, cfg) - target, lo, hi)


def allowed_intervals(cfg: LatticeConfig, n_bands: int, eps_ceiling: float | None = None, step: float | None = None):
    """Locate the lowest ``n_bands`` allowed intervals as (eps at k=0, eps at k=pi).

    D(eps) is monotonic inside each band and sweeps [-1, 1] once, so every
    band holds exactly one zero of D and every pair of consecutive zeros
    encloses exactly one gap. Edges are the D = +-1 crossings between a zero
    and the |D| peak of the neighbouring gap, which also resolves gaps far
    narrower than the scan step.
    """
    if eps_ceiling is None:
        eps_ceiling = cfg.v0 + (n_bands + 1) ** 2 * cfg.e1 + 1.0
    if step is None:
        step = min(1e-3 * cfg.v0, 0.05 * cfg.e1)
    xs = np.arange(0.0, eps_ceiling + step, step)
    ds = np.empty_like(xs)
    zeros: list[float] = []
    n_done = len(xs)
    for i, e in enumerate(xs):
        ds[i] = rhs(float(e), cfg)
        if i == 0:
            continue
        if ds[i - 1] == 0.0:
            zeros.append(float(xs[i - 1]))
        elif ds[i - 1] * ds[i] < 0.0:
            zeros.append(_solve(lambda x: rhs(x, cfg), float(xs[i - 1]), float(xs[i])))
        if len(zeros) > n_bands:
            n_done = i + 1
            break
    xs, ds = xs[:n_done], ds[:n_done]
    if len(zeros) < n_bands:
        raise BandNotFound(f"found {len(zeros)} of {n_bands} bands below eps={eps_ceiling}")

    if abs(ds[0]) < 1.0:
        raise BandNotFound("D(0) lies inside [-1, 1]; the scan must start below the lowest band")
    bounds = [0.0, *zeros[: n_bands + 1]]
    if len(zeros) == n_bands:
        bounds.append(float(xs[-1]))
    peaks = [0.0] + [_gap_peak(cfg, xs, ds, bounds[i], bounds[i + 1]) for i in range(1, n_bands + 1)]

    out = []
    for i in range(n_bands):
        z = zeros[i]
        lo = _edge(cfg, z, peaks[i])
        hi = _edge(cfg, z, peaks[i + 1])
        out.append((lo, hi) if rhs(lo, cfg) > 0 else (hi, lo))
    return out


def band_structure(cfg: LatticeConfig, n_bands: int, n_k: int = 101, eps_ceiling: float | None = None) -> list[Band]:
    """Bands 1..n_bands sampled on a uniform grid k l in [0, pi].

    For each grid point D(eps) = cos(k l) is solved inside the band's
    interval; the end points are the interval edges themselves.
    """
    if n_bands < 1 or n_k < 2:
        raise ValueError("need n_bands >= 1 and n_k >= 2")
    ks = np.linspace(0.0, math.pi, n_k)
    bands = []
    for idx, (e_k0, e_kpi) in enumerate(allowed_intervals(cfg, n_bands, eps_ceiling), start=1):
        lo, hi = sorted((e_k0, e_kpi))
        eps = np.empty(n_k)
        eps[0], eps[-1] = e_k0, e_kpi
        for j in range(1, n_k - 1):
            target = math.cos(ks[j])
            eps[j] = _solve(lambda e: rhs(e, cfg) - target, lo, hi)
        bands.append(Band(idx, ks.copy(), eps, e_k0, e_kpi))
    return bands


def energy_at(band: Band, k_l: float, cfg: LatticeConfig) -> float:
    """Solve D(eps) = cos(k l) inside ``band``'s interval for k l in [0, pi]."""
    if not 0.0 <= k_l <= math.pi:
        raise DomainError(f"k l must lie in [0, pi], got {k_l}")
    if k_l == 0.0:
        return band.edge_k0
    if k_l == math.pi:
        return band.edge_kpi
    lo, hi = sorted((band.edge_k0, band.edge_kpi))
    target = math.cos(k_l)
    return _solve(lambda e: rhs(e, cfg) - target, lo, hi)


def bands_to_csv(bands: list[Band]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["band_index", "k_l_over_pi", "eps"])
    for band in bands:
        for k, e in zip(band.k_l, band.eps):
            writer.writerow([band.band_index, f"{k / math.pi:.17g}", f"{e:.17g}"])
    return buf.getvalue()


def band_records(bands: list[Band]) -> list[dict]:
    return [
        {"band_index": b.band_index, "k_l_over_pi": float(k / math.pi), "eps": float(e)}
        for b in bands
        for k, e in zip(b.k_l, b.eps)
    ]


# --------------------------------------------------------------------------
# wavefunctions


@dataclass
class BlochState:
    """Piecewise Bloch state on the central cell.

    left barrier:  A sinh(kappa (x + l/2)) + B cosh(kappa (x + l/2))
    well:          C u_even(x) + D u_odd(x)
    right barrier: F sinh(kappa (l/2 - x)) + G cosh(kappa (l/2 - x))

    with F = -exp(i k l) A, G = exp(i k l) B. Above the barrier kappa is
    imaginary and the hyperbolic functions turn into circular ones.
    """

    eps: float
    k_l: float
    coeffs: dict[str, complex]
    norm: float
    cfg: LatticeConfig

    @property
    def phase(self) -> complex:
        return cmath.exp(1j * self.k_l)

    def _kappa(self) -> complex:
        return cmath.sqrt(self.cfg.v0 - self.eps) / self.cfg.x0_over_l

    def piece(self, region: str, x_over_l) -> tuple[np.ndarray, np.ndarray]:
        """psi and dpsi/dx from one region's formula ("left", "well", "right"), no range check."""
        x = np.atleast_1d(np.asarray(x_over_l, dtype=float))
        c = self.coeffs
        kap = self._kappa()
        if region == "left":
            y = x + 0.5
            return (c["A"] * np.sinh(kap * y) + c["B"] * np.cosh(kap * y),
                    kap * (c["A"] * np.cosh(kap * y) + c["B"] * np.sinh(kap * y)))
        if region == "right":
            y = 0.5 - x
            return (c["F"] * np.sinh(kap * y) + c["G"] * np.cosh(kap * y),
                    -kap * (c["F"] * np.cosh(kap * y) + c["G"] * np.sinh(kap * y)))
        if region == "well":
            ue, due = well_solution("even", self.eps, self.cfg, x)
            uo, duo = well_solution("odd", self.eps, self.cfg, x)
            return c["C"] * ue + c["D"] * uo, c["C"] * due + c["D"] * duo
        raise ValueError(f"unknown region {region!r}")

    def matching_jumps(self) -> dict[str, float]:
        """|jump| of psi and psi' at x = -w/2 and x = +w/2."""
        half = 0.5 * self.cfg.w_over_l
        out = {}
        for name, x, outer in (("minus", -half, "left"), ("plus", half, "right")):
            v_out, d_out = self.piece(outer, x)
            v_in, d_in = self.piece("well", x)
            out[f"psi_{name}"] = float(abs(v_out[0] - v_in[0]))
            out[f"dpsi_{name}"] = float(abs(d_out[0] - d_in[0]))
        return out

    def cell_values(self, x_over_l) -> tuple[np.ndarray, np.ndarray]:
        """psi and dpsi/dx for points of the central cell [-1/2, 1/2]."""
        x = np.atleast_1d(np.asarray(x_over_l, dtype=float))
        half = 0.5 * self.cfg.w_over_l
        val = np.zeros(x.shape, dtype=complex)
        der = np.zeros(x.shape, dtype=complex)
        left = x < -half
        right = x > half
        for region, mask in (("left", left), ("right", right), ("well", ~(left | right))):
            if mask.any():
                val[mask], der[mask] = self.piece(region, x[mask])
        return val, der

    def values(self, x_over_l, derivative: bool = False):
        """psi (or psi') anywhere, extended by psi(x + l) = exp(i k l) psi(x)."""
        x = np.atleast_1d(np.asarray(x_over_l, dtype=float))
        cell = np.floor(x + 0.5)
        local = x - cell
        # the right edge of the last cell belongs to that cell
        edge = local == -0.5
        cell = np.where(edge & (x > 0), cell - 1, cell)
        local = x - cell
        val, der = self.cell_values(local)
        return (der if derivative else val) * np.exp(1j * self.k_l * cell)


def _four_equation_matrix(eps: float, k_l: float, cfg: LatticeConfig):
    """Homogeneous 2x2 system for the rescaled (C, D).

    Consistency of the two expressions for A and for B obtained from the
    matching conditions at x = +-w/2 (coefficients rescaled as
    A exp(ikl/2) -> A, B exp(ikl/2) -> B, C exp(-v0/2) -> C, D exp(-v0/2) -> D).
    """
    v0 = cfg.v0
    rv = math.sqrt(v0)
    m11 = big_m(1, 1, eps, cfg)
    m33 = big_m(3, 3, eps, cfg)
    y = m11 - (1.0 - eps) * big_m(5, 3, eps, cfg)
    z = m33 * (1.0 - v0) + v0 * (1.0 - eps / 3.0) * big_m(7, 5, eps, cfg)
    kx0 = cmath.sqrt(v0 - eps)
    half = 0.5 * cfg.b_over_x0 * kx0
    ch, sh = cmath.cosh(half), cmath.sinh(half)
    co, sn = math.cos(0.5 * k_l), math.sin(0.5 * k_l)

    # B: kx0 sh [C M11 co - i D rv M33 sn] = ch [C rv Y co + i D Z sn]
    row_b = (co * (kx0 * sh * m11 - ch * rv * y), -1j * sn * (kx0 * sh * rv * m33 + ch * z))
    # A: kx0 ch [i C M11 sn - D rv M33 co] = sh [i C rv Y sn + D Z co]
    row_a = (1j * sn * (kx0 * ch * m11 - sh * rv * y), -co * (kx0 * ch * rv * m33 + sh * z))
    parts = dict(m11=m11, m33=m33, y=y, z=z, kx0=kx0, ch=ch, sh=sh, co=co, sn=sn, rv=rv)
    return np.array([row_b, row_a], dtype=complex), parts


def bloch_state(eps: float, k_l: float, cfg: LatticeConfig, tol: float = 1e-7) -> BlochState:
    """Solve the matching system at a point of the dispersion relation and normalize."""
    if abs(eps - cfg.v0) < DEGENERATE_GAP:
        raise DomainError(f"eps={eps} is degenerate with the barrier top")
    mismatch = rhs(eps, cfg) - math.cos(k_l)
    if abs(mismatch) > tol:
        raise DomainError(f"(eps={eps}, k l={k_l}) misses the dispersion relation by {mismatch:.3e}")

    mat, p = _four_equation_matrix(eps, k_l, cfg)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[0] > 0 and sv[1] > 1e-6 * sv[0]:
        raise RankDeficiency(f"matching system is regular at eps={eps}, k l={k_l} (singular values {sv})")
    pivot_row = mat[int(np.argmax(np.abs(mat).max(axis=1)))]
    if np.abs(pivot_row).max() == 0.0:
        cr, dr = 1.0 + 0j, 0j
    else:
        cr, dr = pivot_row[1], -pivot_row[0]

    # back-substitute the rescaled A and B from whichever equation is better conditioned
    b_num = cr * p["m11"] * p["co"] - 1j * dr * p["rv"] * p["m33"] * p["sn"]
    b_alt = cr * p["rv"] * p["y"] * p["co"] + 1j * dr * p["z"] * p["sn"]
    br = b_num / p["ch"] if abs(p["ch"]) >= abs(p["kx0"] * p["sh"]) else b_alt / (p["kx0"] * p["sh"])
    a_num = 1j * cr * p["m11"] * p["sn"] - dr * p["rv"] * p["m33"] * p["co"]
    a_alt = 1j * cr * p["rv"] * p["y"] * p["sn"] + dr * p["z"] * p["co"]
    ar = a_num / p["sh"] if abs(p["sh"]) >= abs(p["kx0"] * p["ch"]) else a_alt / (p["kx0"] * p["ch"])

    # undo the rescaling; kappa here is in 1/x0 units, the piecewise form uses 1/l
    undo_k = cmath.exp(-0.5j * k_l)
    undo_v = math.exp(0.5 * cfg.v0)
    lam = cmath.exp(1j * k_l)
    coeffs = {"A": ar * undo_k, "B": br * undo_k, "C": cr * undo_v, "D": dr * undo_v}
    coeffs["F"] = -lam * coeffs["A"]
    coeffs["G"] = lam * coeffs["B"]

    state = BlochState(eps, k_l, coeffs, 1.0, cfg)
    norm = math.sqrt(_cell_norm2(state))
    ref = coeffs["C"] if abs(coeffs["C"]) > 1e-8 * abs(coeffs["D"]) else coeffs["D"]
    rot = abs(ref) / ref if abs(ref) > 0 else 1.0
    state.coeffs = {key: val * rot / norm for key, val in coeffs.items()}
    state.norm = norm
    return state


def _cell_norm2(state: BlochState, order: int = 96) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * state.cfg.w_over_l
    total = 0.0
    for a, b in ((-0.5, -half), (-half, half), (half, 0.5)):
        if b <= a:
            continue
        xs = 0.5 * (b - a) * nodes + 0.5 * (b + a)
        val, _ = state.cell_values(xs)
        total += 0.5 * (b - a) * float(np.dot(weights, np.abs(val) ** 2))
    return total


def bloch_wavefunction(eps: float, k_l: float, cfg: LatticeConfig, x_grid=None) -> tuple[np.ndarray, np.ndarray]:
    """Sample the normalized Bloch state over three cells (default grid of 601 points)."""
    x = np.linspace(-1.5, 1.5, 601) if x_grid is None else np.asarray(x_grid, dtype=float)
    return x, bloch_state(eps, k_l, cfg).values(x)


def wavefunction_csv(x: np.ndarray, psi: np.ndarray, cfg: LatticeConfig) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x_over_l", "re_psi", "im_psi", "potential_value"])
    local = x - np.round(x)
    for xi, p, li in zip(x, psi, local):
        writer.writerow([f"{xi:.17g}", f"{p.real:.17g}", f"{p.imag:.17g}", f"{potential_value(li, cfg):.17g}"])
    return buf.getvalue()


# --------------------------------------------------------------------------
# square-well reference (energies in hbar^2 / (2 m l^2), lengths in l)


@dataclass(frozen=True)
class SquareWellConfig:
    v0: float
    w_over_l: float

    @property
    def b_over_l(self) -> float:
        return 1.0 - self.w_over_l


def _square_wavenumbers(eps: float, cfg: SquareWellConfig) -> tuple[float, float]:
    if eps <= 0.0:
        raise DomainError("square-well reference needs eps > 0 (q1 = 0 is degenerate)")
    if not eps < cfg.v0:
        raise DomainError("square-well reference is implemented below the barrier only")
    return math.sqrt(eps), math.sqrt(cfg.v0 - eps)


def square_well_rhs(eps: float, cfg: SquareWellConfig) -> float:
    """cos(q1 w) cosh(kappa b) + (kappa^2 - q1^2) / (2 q1 kappa) sin(q1 w) sinh(kappa b)."""
    q, k = _square_wavenumbers(eps, cfg)
    w, b = cfg.w_over_l, cfg.b_over_l
    return math.cos(q * w) * math.cosh(k * b) + (k * k - q * q) / (2.0 * q * k) * math.sin(q * w) * math.sinh(k * b)


def f_even_square(eps: float, cfg: SquareWellConfig) -> float:
    q, k = _square_wavenumbers(eps, cfg)
    half = 0.5 * q * cfg.w_over_l
    return math.cos(half) - q / k * math.sin(half)


def f_odd_square(eps: float, cfg: SquareWellConfig) -> float:
    q, k = _square_wavenumbers(eps, cfg)
    half = 0.5 * q * cfg.w_over_l
    return math.cos(half) + k / q * math.sin(half)


def square_well_rhs_factored(eps: float, cfg: SquareWellConfig) -> float:
    """f_even^sq f_odd^sq sinh(kappa b) + exp(-kappa b) cos(q1 w)."""
    q, k = _square_wavenumbers(eps, cfg)
    kb = k * cfg.b_over_l
    return f_even_square(eps, cfg) * f_odd_square(eps, cfg) * math.sinh(kb) + math.exp(-kb) * math.cos(q * cfg.w_over_l)
