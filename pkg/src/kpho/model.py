"""Dimensionless geometry of the periodic truncated-oscillator potential.

Energies are in units of hbar*omega/2 and lengths in units of the cell
length l. The well occupies |x| <= w/2 and the flat barrier of height v0
fills the rest of the cell, so b = l - w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .special_functions import kummer_m

DEGENERATE_GAP = 1e-12
POLE_FLOOR = 1e-300

# (i, j) index pairs of M_ij(eps) = M((i - eps)/4, j/2, v0) that appear anywhere.
VALID_IJ = {(1, 1), (3, 3), (5, 3), (7, 5)}


class DomainError(ValueError):
    """Energy outside the domain of a helper (e.g. at the branch point eps = v0)."""


class PoleError(ArithmeticError):
    """A Kummer ratio was requested where its denominator vanishes."""


@dataclass(frozen=True)
class LatticeConfig:
    v0: float
    w_over_l: float
    b_over_l: float = field(init=False)
    x0_over_l: float = field(init=False)
    kappa_b_coeff: float = field(init=False)

    def __post_init__(self):
        if not self.v0 > 0:
            raise ValueError(f"v0 must be positive, got {self.v0}")
        if not 0 < self.w_over_l <= 1:
            raise ValueError(f"w_over_l must lie in (0, 1], got {self.w_over_l}")
        b = 1.0 - self.w_over_l
        object.__setattr__(self, "b_over_l", b)
        object.__setattr__(self, "x0_over_l", 0.5 * self.w_over_l / math.sqrt(self.v0))
        object.__setattr__(self, "kappa_b_coeff", 2.0 * b / self.w_over_l * self.v0)

    @classmethod
    def from_barrier(cls, v0: float, b_over_l: float) -> "LatticeConfig":
        return cls(v0=v0, w_over_l=1.0 - b_over_l)

    @property
    def e1(self) -> float:
        """Ground energy of the bare infinite well of width l, pi^2 (x0/l)^2."""
        return math.pi**2 * self.x0_over_l**2

    @property
    def b_over_x0(self) -> float:
        return self.b_over_l / self.x0_over_l

    def to_text(self) -> str:
        return f"v0={self.v0!r}\nw_over_l={self.w_over_l!r}\n"

    @classmethod
    def from_text(cls, text: str) -> "LatticeConfig":
        values = parse_key_values(text)
        try:
            return cls(v0=float(values["v0"]), w_over_l=float(values["w_over_l"]))
        except KeyError as exc:
            raise ValueError(f"missing key {exc.args[0]!r} in lattice config") from None


def parse_key_values(text: str) -> dict[str, str]:
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {raw!r}")
        out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class EnergyPoint:
    eps: float
    regime: str

    @classmethod
    def classify(cls, eps: float, cfg: LatticeConfig) -> "EnergyPoint":
        if abs(eps - cfg.v0) < DEGENERATE_GAP:
            raise DomainError(f"eps={eps} is degenerate with the barrier top v0={cfg.v0}")
        return cls(eps, "below_barrier" if eps < cfg.v0 else "above_barrier")


def kappa_x0(eps: float, cfg: LatticeConfig) -> float:
    """kappa * x0 = sqrt(v0 - eps) in the barrier, for eps < v0."""
    if eps >= cfg.v0:
        raise DomainError(f"kappa requires eps < v0 (eps={eps}, v0={cfg.v0})")
    return math.sqrt(cfg.v0 - eps)


def q_x0(eps: float, cfg: LatticeConfig) -> float:
    """Q * x0 = sqrt(eps - v0) in the barrier, for eps > v0."""
    if eps <= cfg.v0:
        raise DomainError(f"Q requires eps > v0 (eps={eps}, v0={cfg.v0})")
    return math.sqrt(eps - cfg.v0)


def kappa_b(eps: float, cfg: LatticeConfig) -> float:
    return cfg.b_over_x0 * kappa_x0(eps, cfg)


def q_b(eps: float, cfg: LatticeConfig) -> float:
    return cfg.b_over_x0 * q_x0(eps, cfg)


def big_m(i: int, j: int, eps: float, cfg: LatticeConfig) -> float:
    """M_ij(eps) = M((i - eps)/4, j/2, v0)."""
    if (i, j) not in VALID_IJ:
        raise ValueError(f"unsupported Kummer index pair ({i}, {j})")
    return kummer_m((i - eps) / 4.0, j / 2.0, cfg.v0)


def little_m(i: int, j: int, eps: float, cfg: LatticeConfig) -> float:
    """m_ij = M_ij / M_{i-4, j-2}; only (5, 3) and (7, 5) are meaningful."""
    if (i, j) not in {(5, 3), (7, 5)}:
        raise ValueError(f"little_m defined for (5,3) and (7,5), got ({i}, {j})")
    den = big_m(i - 4, j - 2, eps, cfg)
    if abs(den) < POLE_FLOOR:
        raise PoleError(f"m_{i}{j} has a pole at eps={eps}")
    return big_m(i, j, eps, cfg) / den


def mean_potential(cfg: LatticeConfig) -> float:
    """Cell average of the potential, v0 (1 - 2w/(3l))."""
    return cfg.v0 * (1.0 - 2.0 / 3.0 * cfg.w_over_l)


def potential_value(x_over_l, cfg: LatticeConfig):
    """V(x) / (hbar omega / 2) for x in one cell; accepts scalars or arrays."""
    half = 0.5 * cfg.w_over_l
    out = cfg.v0 * np.minimum(1.0, (np.asarray(x_over_l, dtype=float) / half) ** 2)
    return float(out) if out.ndim == 0 else out
