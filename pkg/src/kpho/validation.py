"""Named cross-checks between the analytic solvers and the matrix oracle.

Every check returns a measured delta and its tolerance. Faults can be
injected into the oracle matrices through :class:`Perturbation` so that the
suite's ability to locate a transcription error can itself be tested.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import bloch, oracle, tight_binding
from .model import LatticeConfig, big_m
from .single_well import SpectralEquation, find_levels
from .special_functions import kummer_dm_da, kummer_m, kummer_m_dz

LEVEL_TOL = 1e-8
ELEMENT_TOL = 1e-10
FORM_TOL = 1e-10
EXACTNESS_TOL = 1e-9
FD_TOL = 1e-7
SINGULAR_GUARD = 1e-6


@dataclass(frozen=True)
class Perturbation:
    """Add ``delta`` to the (n, m) and (m, n) entries of one basis kind's matrix."""

    kind: str
    n: int
    m: int
    delta: float

    @classmethod
    def parse(cls, text: str) -> "Perturbation":
        try:
            kind, n, m, delta = text.split(":")
            return cls(kind, int(n), int(m), float(delta))
        except ValueError:
            raise ValueError(f"perturbation must look like KIND:N:M:DELTA, got {text!r}") from None

    def offset(self, kind: str, n: int, m: int) -> float:
        if kind == self.kind and {n, m} == {self.n, self.m}:
            return self.delta
        return 0.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


@dataclass
class Context:
    cfg: LatticeConfig
    perturbations: tuple[Perturbation, ...] = ()
    seed: int = 0

    def matrix(self, basis: oracle.OracleBasis) -> np.ndarray:
        h = oracle.hamiltonian(basis, self.cfg)
        labels = list(basis.labels())
        for p in self.perturbations:
            if p.kind != basis.kind or p.n not in labels or p.m not in labels:
                continue
            i, j = labels.index(p.n), labels.index(p.m)
            h[i, j] += p.delta
            if i != j:
                h[j, i] += p.delta
        return h

    def element(self, kind: str, n: int, m: int, k_l: float = 0.0) -> float:
        if kind == "dirichlet":
            value = oracle.h_dirichlet(n, m, self.cfg)
        elif kind == "periodic":
            value = oracle.h_periodic(n, m, self.cfg)
        else:
            value = oracle.h_bloch(n, m, k_l, self.cfg)
        return value + sum(p.offset(kind, n, m) for p in self.perturbations)


def _result(name: str, measured: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(measured <= tol), float(measured), tol, detail)


# --------------------------------------------------------------------------
# checks


def check_kummer_derivatives(ctx: Context) -> CheckResult:
    worst = 0.0
    for a, b, z in ((-0.25, 0.5, 6.0), (0.5, 1.5, 2.0), (-1.3, 0.5, 10.0), (0.1, 1.5, 0.7)):
        h = 1e-5
        fd_z = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2 * h)
        fd_a = (kummer_m(a + h, b, z) - kummer_m(a - h, b, z)) / (2 * h)
        for exact, fd in ((kummer_m_dz(a, b, z), fd_z), (kummer_dm_da(a, b, z), fd_a)):
            worst = max(worst, abs(exact - fd) / max(1.0, abs(exact)))
    return _result("kummer_derivatives", worst, FD_TOL)


def _element_audit(kind: str, ctx: Context, count: int = 50) -> CheckResult:
    rng = np.random.default_rng(ctx.seed)
    k_l = 0.37 * math.pi if kind == "bloch" else 0.0
    worst, where = 0.0, ""
    for _ in range(count):
        if kind == "dirichlet":
            n, m = (int(v) for v in rng.integers(1, 41, size=2))
        else:
            n, m = (int(v) for v in rng.integers(-20, 21, size=2))
        dev = abs(ctx.element(kind, n, m, k_l) - oracle.quadrature_element(kind, n, m, ctx.cfg, k_l))
        if dev > worst:
            worst, where = dev, f"(n={n}, m={m})"
    return _result(f"matrix_elements_{kind}", worst, ELEMENT_TOL, where)


def bound_levels(cfg: LatticeConfig, bc: str) -> list[float]:
    out = []
    for parity in ("even", "odd"):
        out += find_levels(SpectralEquation(f"{bc}_{parity}_bound", cfg)).energies
    return sorted(out)


def _levels_check(bc: str, ctx: Context) -> CheckResult:
    analytic = bound_levels(ctx.cfg, bc)
    kind = "dirichlet" if bc == "dirichlet" else "periodic"
    basis = oracle.OracleBasis.default(kind)
    res = oracle.eigen_solve(basis, ctx.cfg, len(analytic), matrix=ctx.matrix(basis))
    dev = float(np.abs(res.energies - np.asarray(analytic)).max())
    return _result(f"levels_{bc}", dev, LEVEL_TOL, f"{len(analytic)} bound levels")


def check_bloch_bands(ctx: Context, n_bands: int = 3, n_k: int = 9) -> CheckResult:
    bands = bloch.band_structure(ctx.cfg, n_bands, n_k)
    worst = 0.0
    for j, k in enumerate(bands[0].k_l):
        basis = oracle.OracleBasis.default("bloch", float(k))
        res = oracle.eigen_solve(basis, ctx.cfg, n_bands, matrix=ctx.matrix(basis))
        exact = np.array([b.eps[j] for b in bands])
        worst = max(worst, float(np.abs(res.energies - exact).max()))
    return _result("bands_bloch", worst, LEVEL_TOL, f"{n_bands} bands x {n_k} k-points")


def singular_points(cfg: LatticeConfig, step: float = 1e-3) -> list[float]:
    """Zeros of M_11 and M_33 in (0, v0): poles of the Kummer ratios."""
    out = [cfg.v0]
    grid = np.arange(step, cfg.v0, step)
    for i, j in ((1, 1), (3, 3)):
        vals = [big_m(i, j, float(e), cfg) for e in grid]
        for e0, e1, f0, f1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if f0 * f1 < 0:
                out.append(brentq(lambda e: big_m(i, j, e, cfg), float(e0), float(e1), xtol=1e-15))
    return sorted(out)


def form_samples(cfg: LatticeConfig, count: int = 1000, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    eps = np.sort(rng.uniform(0.0, cfg.v0, size=count))
    bad = np.array(singular_points(cfg))
    keep = np.abs(eps[:, None] - bad[None, :]).min(axis=1) > SINGULAR_GUARD
    return eps[keep]


def check_dispersion_forms(ctx: Context) -> CheckResult:
    worst = 0.0
    for e in form_samples(ctx.cfg, seed=ctx.seed):
        a = bloch.dispersion_rhs(float(e), ctx.cfg)
        b = bloch.dispersion_rhs_factored(float(e), ctx.cfg)
        c = bloch.rhs(float(e), ctx.cfg)
        worst = max(worst, max(abs(a - b), abs(a - c)) / max(1.0, abs(a)))
    return _result("dispersion_forms", worst, FORM_TOL)


def check_square_well_forms(ctx: Context, v0: float = 50.0) -> CheckResult:
    sq = bloch.SquareWellConfig(v0, ctx.cfg.w_over_l)
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    for e in rng.uniform(SINGULAR_GUARD, v0 - SINGULAR_GUARD, size=1000):
        a = bloch.square_well_rhs(float(e), sq)
        b = bloch.square_well_rhs_factored(float(e), sq)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return _result("square_well_forms", worst, FORM_TOL)


def check_tb_exactness(ctx: Context, n_k: int = 50) -> CheckResult:
    band = bloch.band_structure(ctx.cfg, 1, n_k)[0]
    worst = max(abs(tight_binding.exactness_residual(float(e), float(k), ctx.cfg)) for k, e in zip(band.k_l, band.eps))
    return _result("tb_exactness", worst, EXACTNESS_TOL)


CHECKS: dict[str, Callable[[Context], CheckResult]] = {
    "kummer_derivatives": check_kummer_derivatives,
    "matrix_elements_dirichlet": lambda ctx: _element_audit("dirichlet", ctx),
    "matrix_elements_periodic": lambda ctx: _element_audit("periodic", ctx),
    "matrix_elements_bloch": lambda ctx: _element_audit("bloch", ctx),
    "levels_dirichlet": lambda ctx: _levels_check("dirichlet", ctx),
    "levels_periodic": lambda ctx: _levels_check("periodic", ctx),
    "bands_bloch": check_bloch_bands,
    "dispersion_forms": check_dispersion_forms,
    "square_well_forms": check_square_well_forms,
    "tb_exactness": check_tb_exactness,
}


@dataclass
class ValidationReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def records(self) -> list[dict]:
        return [
            {"check": r.name, "passed": r.passed, "measured": r.measured, "tolerance": r.tolerance, "detail": r.detail}
            for r in self.results
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "passed", "measured", "tolerance", "detail"])
        for r in self.results:
            writer.writerow([r.name, str(r.passed).lower(), f"{r.measured:.17g}", f"{r.tolerance:.17g}", r.detail])
        return buf.getvalue()


def run_checks(cfg: LatticeConfig, names=None, perturbations=(), seed: int = 0) -> ValidationReport:
    """Run the selected checks (all when ``names`` is None; none for an empty list)."""
    selected = list(CHECKS) if names is None else list(names)
    unknown = [n for n in selected if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; available: {sorted(CHECKS)}")
    ctx = Context(cfg, tuple(perturbations), seed)
    return ValidationReport([CHECKS[name](ctx) for name in selected])
