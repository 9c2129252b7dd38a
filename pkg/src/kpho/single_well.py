"""Single-well spectra: isolated, Dirichlet-boxed and periodic-boxed wells.

Every quantization condition comes in two flavours. The *printed* form uses
the Kummer ratios m_53, m_75 and therefore has poles wherever M_11 or M_33
vanishes. The *pole-free* form multiplies those denominators out (and the
positive square-root factor of the even equations), and is what the root
finder scans. Clearing cannot introduce new zeros: at a zero of M_11 the
even residual reduces to (1 - eps) M_53, which would otherwise make M and
dM/dz vanish together (likewise M_33 / M_75 for odd states).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq

from .model import (
    DomainError,
    LatticeConfig,
    big_m,
    kappa_b,
    kappa_x0,
    little_m,
    q_b,
)
from .special_functions import kummer_m

EQUATION_IDS = (
    "isolated_even",
    "isolated_odd",
    "dirichlet_even_bound",
    "dirichlet_odd_bound",
    "dirichlet_even_scatter",
    "dirichlet_odd_scatter",
    "periodic_even_bound",
    "periodic_odd_bound",
    "periodic_even_scatter",
    "periodic_odd_scatter",
)

TRIG_POLE_FLOOR = 1e-12
POLE_INSET = 1e-9


class PoleProximityError(ArithmeticError):
    """tan/cot factor evaluated on (or numerically at) its pole."""


class WavefunctionMismatch(ValueError):
    """Energy handed to a wavefunction builder does not solve its equation."""


# --------------------------------------------------------------------------
# printed forms


def f_even(eps: float, cfg: LatticeConfig) -> float:
    """1 - [1 - (1 - eps) m_53] / sqrt(1 - eps/v0); zero at isolated even levels."""
    s = _root_factor(eps, cfg)
    return 1.0 - (1.0 - (1.0 - eps) * little_m(5, 3, eps, cfg)) / s


def f_odd(eps: float, cfg: LatticeConfig) -> float:
    """1 - v0 + v0 sqrt(1 - eps/v0) + v0 (1 - eps/3) m_75; zero at odd levels."""
    v0 = cfg.v0
    s = _root_factor(eps, cfg)
    return 1.0 - v0 + v0 * s + v0 * (1.0 - eps / 3.0) * little_m(7, 5, eps, cfg)


def _root_factor(eps: float, cfg: LatticeConfig) -> float:
    if not eps < cfg.v0:
        raise DomainError(f"bound-state equation needs eps < v0 (eps={eps}, v0={cfg.v0})")
    return math.sqrt(1.0 - eps / cfg.v0)


# --------------------------------------------------------------------------
# pole-free forms
#
# Each builder returns (residual, multiplier); the printed form of the same
# equation is residual / multiplier.


def _even_bracket(eps: float, cfg: LatticeConfig) -> tuple[float, float]:
    m11 = big_m(1, 1, eps, cfg)
    return m11, m11 - (1.0 - eps) * big_m(5, 3, eps, cfg)


def _odd_parts(eps: float, cfg: LatticeConfig) -> tuple[float, float]:
    return big_m(3, 3, eps, cfg), cfg.v0 * (1.0 - eps / 3.0) * big_m(7, 5, eps, cfg)


def _bound_trig(kind: str, eps: float, cfg: LatticeConfig) -> float:
    half = 0.5 * kappa_b(eps, cfg)
    if kind == "tanh":
        return math.tanh(half)
    if kind == "coth":
        t = math.tanh(half)
        if t == 0.0:
            raise PoleProximityError(f"coth pole at eps={eps} (zero barrier)")
        return 1.0 / t
    return 1.0  # isolated well: both tanh and coth tend to one


def _scatter_trig(kind: str, eps: float, cfg: LatticeConfig) -> float:
    half = 0.5 * q_b(eps, cfg)
    c, s = math.cos(half), math.sin(half)
    if kind == "tan":
        if abs(c) < TRIG_POLE_FLOOR:
            raise PoleProximityError(f"tan(Qb/2) pole at eps={eps}")
        return s / c
    if abs(s) < TRIG_POLE_FLOOR:
        raise PoleProximityError(f"cot(Qb/2) pole at eps={eps}")
    return c / s


def _even_bound(kind: str, eps: float, cfg: LatticeConfig) -> tuple[float, float]:
    s = _root_factor(eps, cfg)
    m11, bracket = _even_bracket(eps, cfg)
    return s * m11 - _bound_trig(kind, eps, cfg) * bracket, s * m11


def _odd_bound(kind: str, eps: float, cfg: LatticeConfig) -> tuple[float, float]:
    v0 = cfg.v0
    s = _root_factor(eps, cfg)
    t = _bound_trig(kind, eps, cfg)
    m33, tail = _odd_parts(eps, cfg)
    return (1.0 - v0) * t * m33 + v0 * s * m33 + t * tail, m33


def _scatter_root_factor(eps: float, cfg: LatticeConfig) -> float:
    if not eps > cfg.v0:
        raise DomainError(f"scattering equation needs eps > v0 (eps={eps}, v0={cfg.v0})")
    return math.sqrt(eps / cfg.v0 - 1.0)


def _even_scatter(kind: str, eps: float, cfg: LatticeConfig) -> tuple[float, float]:
    sig = _scatter_root_factor(eps, cfg)
    m11, bracket = _even_bracket(eps, cfg)
    t = _scatter_trig(kind, eps, cfg)
    if kind == "tan":
        return sig * m11 - t * bracket, sig * m11
    return sig * m11 + t * bracket, sig * m11


def _odd_scatter(eps: float, cfg: LatticeConfig) -> tuple[float, float]:
    v0 = cfg.v0
    sig = _scatter_root_factor(eps, cfg)
    t = _scatter_trig("tan", eps, cfg)
    m33, tail = _odd_parts(eps, cfg)
    return (1.0 - v0) * t * m33 + v0 * sig * m33 + t * tail, m33


_BUILDERS: dict[str, Callable[[float, LatticeConfig], tuple[float, float]]] = {
    "isolated_even": lambda e, c: _even_bound("none", e, c),
    "isolated_odd": lambda e, c: _odd_bound("none", e, c),
    "dirichlet_even_bound": lambda e, c: _even_bound("tanh", e, c),
    "dirichlet_odd_bound": lambda e, c: _odd_bound("tanh", e, c),
    "dirichlet_even_scatter": lambda e, c: _even_scatter("tan", e, c),
    "dirichlet_odd_scatter": _odd_scatter,
    "periodic_even_bound": lambda e, c: _even_bound("coth", e, c),
    # odd states vanish at the cell edge under both boundary conditions
    "periodic_odd_bound": lambda e, c: _odd_bound("tanh", e, c),
    "periodic_even_scatter": lambda e, c: _even_scatter("cot", e, c),
    "periodic_odd_scatter": _odd_scatter,
}


def f_dirichlet(parity: str, regime: str, eps: float, cfg: LatticeConfig) -> float:
    """Pole-free residual of the Dirichlet-box equation (tanh below, tan above v0)."""
    return residual(_equation_id("dirichlet", parity, regime), eps, cfg)


def f_periodic(parity: str, regime: str, eps: float, cfg: LatticeConfig) -> float:
    """Pole-free residual of the periodic-box equation (coth/cot in the even case)."""
    return residual(_equation_id("periodic", parity, regime), eps, cfg)


def _equation_id(bc: str, parity: str, regime: str) -> str:
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    tag = {"bound": "bound", "below_barrier": "bound", "scatter": "scatter", "above_barrier": "scatter"}
    if regime not in tag:
        raise ValueError(f"unknown regime {regime!r}")
    return f"{bc}_{parity}_{tag[regime]}"


def residual(equation_id: str, eps: float, cfg: LatticeConfig) -> float:
    return _BUILDERS[equation_id](eps, cfg)[0]


def printed_residual(equation_id: str, eps: float, cfg: LatticeConfig) -> float:
    r, mult = _BUILDERS[equation_id](eps, cfg)
    return r / mult


@dataclass(frozen=True)
class SpectralEquation:
    id: str
    cfg: LatticeConfig

    def __post_init__(self):
        if self.id not in _BUILDERS:
            raise ValueError(f"unknown equation id {self.id!r}; expected one of {EQUATION_IDS}")

    @property
    def is_scatter(self) -> bool:
        return self.id.endswith("_scatter")

    @property
    def parity(self) -> str:
        return "even" if "_even" in self.id else "odd"

    def __call__(self, eps: float) -> float:
        return residual(self.id, eps, self.cfg)

    def with_multiplier(self, eps: float) -> tuple[float, float]:
        return _BUILDERS[self.id](eps, self.cfg)

    def domain(self) -> tuple[float, float]:
        return (self.cfg.v0, math.inf) if self.is_scatter else (-math.inf, self.cfg.v0)


# --------------------------------------------------------------------------
# level finding


@dataclass(frozen=True)
class Level:
    index: int
    eps: float
    bracket: tuple[float, float]
    residual: float


@dataclass
class LevelList:
    equation_id: str
    levels: list[Level] = field(default_factory=list)
    failures: list[tuple[float, float, str]] = field(default_factory=list)

    @property
    def energies(self) -> list[float]:
        return [lv.eps for lv in self.levels]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["equation_id", "index", "eps", "residual"])
        for lv in self.levels:
            writer.writerow([self.equation_id, lv.index, f"{lv.eps:.17g}", f"{lv.residual:.17g}"])
        return buf.getvalue()

    def records(self) -> list[dict]:
        return [
            {"equation_id": self.equation_id, "index": lv.index, "eps": lv.eps, "residual": lv.residual}
            for lv in self.levels
        ]


def default_step(cfg: LatticeConfig) -> float:
    return 1e-3 * cfg.v0


def _segments(eq: SpectralEquation, lo: float, hi: float) -> list[tuple[float, float]]:
    """Split [lo, hi] at tan/cot poles of the scattering equations."""
    cfg = eq.cfg
    if not eq.is_scatter or cfg.b_over_l == 0.0:
        return [(lo, hi)]
    # Qb/2 = theta  <=>  eps = v0 + (2 theta x0 / b)^2 ; poles of tan and cot at multiples of pi/2
    scale = 2.0 * cfg.x0_over_l / cfg.b_over_l
    cuts = []
    n = 1
    while True:
        e = cfg.v0 + (scale * n * math.pi / 2.0) ** 2
        if e >= hi:
            break
        if e > lo:
            cuts.append(e)
        n += 1
    edges = [lo, *cuts, hi]
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        a_in = a + POLE_INSET if a in cuts else a
        b_in = b - POLE_INSET if b in cuts else b
        if b_in > a_in:
            out.append((a_in, b_in))
    return out


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(1, int(math.ceil((hi - lo) / step)))
    return np.linspace(lo, hi, n + 1)


def find_levels(
    eq: SpectralEquation,
    eps_range: tuple[float, float] | None = None,
    step: float | None = None,
    tol: float = 1e-12,
) -> LevelList:
    """Scan the pole-free residual for sign changes and refine each bracket.

    A refined bracket whose residual is large on *both* sides of the root is a
    pole rather than a zero and is discarded. Intervals where refinement itself
    fails are recorded in ``failures``.
    """
    cfg = eq.cfg
    step = default_step(cfg) if step is None else step
    if step <= 0 or tol <= 0:
        raise ValueError("step and tol must be positive")
    d_lo, d_hi = eq.domain()
    if eps_range is None:
        eps_range = (cfg.v0 + POLE_INSET, 2.0 * cfg.v0) if eq.is_scatter else (0.0, cfg.v0)
    lo = max(eps_range[0], d_lo + POLE_INSET if math.isfinite(d_lo) else eps_range[0])
    hi = min(eps_range[1], d_hi - POLE_INSET if math.isfinite(d_hi) else eps_range[1])

    out = LevelList(eq.id)
    if hi <= lo:
        return out

    found: list[tuple[float, tuple[float, float], float]] = []
    for a, b in _segments(eq, lo, hi):
        xs = _grid(a, b, step)
        fs = [eq(float(x)) for x in xs]
        for x0, x1, f0, f1 in zip(xs[:-1], xs[1:], fs[:-1], fs[1:]):
            if f0 == 0.0:
                found.append((float(x0), (float(x0), float(x0)), 0.0))
                continue
            if f0 * f1 > 0.0 or f1 == 0.0:
                continue
            try:
                root = brentq(eq, float(x0), float(x1), xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
            except (RuntimeError, ValueError, ArithmeticError) as exc:
                out.failures.append((float(x0), float(x1), str(exc)))
                continue
            if _is_divergence(eq, root, tol, max(abs(f0), abs(f1))):
                continue
            found.append((root, (float(x0), float(x1)), eq(root)))
        if fs and fs[-1] == 0.0:
            found.append((float(xs[-1]), (float(xs[-1]), float(xs[-1])), 0.0))

    found.sort(key=lambda t: t[0])
    for idx, (root, bracket, r) in enumerate(_dedupe(found, tol)):
        out.levels.append(Level(idx, root, bracket, r))
    return out


def _is_divergence(eq: SpectralEquation, root: float, tol: float, scale: float) -> bool:
    delta = max(tol, 4.0 * np.spacing(abs(root)))
    try:
        left, right = eq(root - delta), eq(root + delta)
    except ArithmeticError:
        return True
    return min(abs(left), abs(right)) > scale


def _dedupe(found: Iterable[tuple[float, tuple[float, float], float]], tol: float):
    last = None
    for item in found:
        if last is not None and abs(item[0] - last) <= 2 * tol:
            continue
        last = item[0]
        yield item


# --------------------------------------------------------------------------
# wavefunctions


def well_solution(parity: str, eps: float, cfg: LatticeConfig, x_over_l):
    """Even or odd solution inside the oscillator region and its x-derivative.

    even: M((1-eps)/4, 1/2, z^2) exp(-z^2/2)
    odd:  z M((3-eps)/4, 3/2, z^2) exp(-z^2/2),   with z = x / x0.
    Derivatives are with respect to x (in units of l), not z.
    """
    x = np.atleast_1d(np.asarray(x_over_l, dtype=float))
    x0 = cfg.x0_over_l
    val = np.empty_like(x)
    der = np.empty_like(x)
    for k, xi in enumerate(x):
        z = xi / x0
        u = z * z
        g = math.exp(-0.5 * u)
        if parity == "even":
            a = (1.0 - eps) / 4.0
            m = kummer_m(a, 0.5, u)
            mp = kummer_m(a + 1.0, 1.5, u)
            val[k] = m * g
            der[k] = z * (4.0 * a * mp - m) * g / x0
        elif parity == "odd":
            a = (3.0 - eps) / 4.0
            m = kummer_m(a, 1.5, u)
            mp = kummer_m(a + 1.0, 2.5, u)
            val[k] = z * m * g
            der[k] = (m + u * (4.0 * a / 3.0) * mp - u * m) * g / x0
        else:
            raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if np.ndim(x_over_l) == 0:
        return float(val[0]), float(der[0])
    return val, der


def _gauss_integral(fn, a: float, b: float, order: int = 80) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    xs = 0.5 * (b - a) * nodes + 0.5 * (b + a)
    return 0.5 * (b - a) * float(np.dot(weights, fn(xs)))


def isolated_wavefunction(eps: float, parity: str, cfg: LatticeConfig, x_over_l, tol: float = 1e-7):
    """Bound state of the isolated well, unit-normalized over the whole line.

    Outside |x| > w/2 the state decays as exp(-kappa(|x| - w/2)); the tail
    norm is added analytically. The sign is fixed so that psi(0) > 0 (even)
    or psi'(0) > 0 (odd).
    """
    half = 0.5 * cfg.w_over_l
    k = kappa_x0(eps, cfg) / cfg.x0_over_l  # kappa in units of 1/l
    edge_val, edge_der = well_solution(parity, eps, cfg, half)
    mismatch = edge_der / edge_val + k
    if not abs(mismatch) <= tol * (1.0 + k):
        raise WavefunctionMismatch(
            f"eps={eps} does not solve the isolated {parity} equation (log-derivative mismatch {mismatch:.3e})"
        )
    inner = 2.0 * _gauss_integral(lambda xs: well_solution(parity, eps, cfg, xs)[0] ** 2, 0.0, half)
    norm = math.sqrt(inner + 2.0 * edge_val**2 / (2.0 * k))

    x = np.asarray(x_over_l, dtype=float)
    ax = np.abs(x)
    inside = ax <= half
    out = np.empty(np.shape(x))
    out = np.atleast_1d(out)
    xa = np.atleast_1d(x)
    ins = np.atleast_1d(inside)
    if ins.any():
        out[ins] = well_solution(parity, eps, cfg, xa[ins])[0]
    tail = edge_val * np.exp(-k * (np.abs(xa[~ins]) - half))
    if parity == "odd":
        tail = tail * np.sign(xa[~ins])
    out[~ins] = tail
    out /= norm
    return float(out[0]) if x.ndim == 0 else out
