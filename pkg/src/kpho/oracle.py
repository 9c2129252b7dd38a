"""Matrix-mechanics cross-check: expand in box eigenstates and diagonalize.

Three bases are supported, all on one cell [-l/2, l/2]:

* ``dirichlet``: sqrt(2/l) sin(n pi (x + l/2) / l), n = 1..N
* ``periodic``:  exp(2 i n pi x / l) / sqrt(l)
* ``bloch``:     exp(i (2 n pi / l + k) x) / sqrt(l)

Plane-wave rows are ordered n' = 0, -1, +1, -2, +2, ... . All Hamiltonians are
real symmetric: the Fourier coefficients of the even potential are real and
the Bloch wavevector only enters the kinetic diagonal.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import quad

from .model import LatticeConfig, mean_potential, potential_value

DEFAULT_DIRICHLET_SIZE = 400
DEFAULT_PLANE_WAVE_SIZE = 401
RESIDUAL_TOL = 1e-10


class OracleError(ArithmeticError):
    """Eigensolver output failed its residual or orthonormality bound."""


@dataclass(frozen=True)
class OracleBasis:
    kind: str
    size: int
    k_l: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dirichlet", "periodic", "bloch"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("basis size must be positive")
        if self.kind != "bloch" and self.k_l != 0.0:
            raise ValueError("k_l only applies to the bloch basis")

    @classmethod
    def default(cls, kind: str, k_l: float = 0.0) -> "OracleBasis":
        size = DEFAULT_DIRICHLET_SIZE if kind == "dirichlet" else DEFAULT_PLANE_WAVE_SIZE
        return cls(kind, size, k_l)

    def labels(self) -> np.ndarray:
        """Quantum numbers per row: n for dirichlet, n' for plane waves."""
        rows = np.arange(self.size)
        if self.kind == "dirichlet":
            return rows + 1
        return ((rows + 1) // 2) * np.where(rows % 2 == 1, -1, 1)


# --------------------------------------------------------------------------
# closed-form matrix elements (vectorized; scalars go through the same code)


def _dirichlet_elements(n, m, cfg: LatticeConfig) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    v0, w, b = cfg.v0, cfg.w_over_l, cfg.b_over_l
    pi = math.pi
    diag = n == m
    f_n = w * np.cos(n * pi * b) + np.sin(n * pi * b) / (n * pi)
    h_diag = n**2 * cfg.e1 + v0 * (1.0 - 2.0 / 3.0 * w - 2.0 / (n**2 * pi**2) / w**2 * f_n)

    d = np.where(diag, 1.0, n - m)  # g_nm is only used off the diagonal
    s = n + m
    half_b = 0.5 * pi * b
    g = 2.0 / pi**3 * (np.sin(d * half_b) / d**3 - np.sin(s * half_b) / s**3) + w / pi**2 * (
        np.cos(d * half_b) / d**2 - np.cos(s * half_b) / s**2
    )
    same_parity = (np.mod(n + m, 2) == 0).astype(float)
    h_off = 8.0 * v0 / w**2 * same_parity * g
    return np.where(diag, h_diag, h_off)


def _plane_wave_off_diagonal(d, cfg: LatticeConfig) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    w = cfg.w_over_l
    safe = np.where(d == 0, 1.0, d)
    arg = safe * math.pi * w
    p = np.cos(arg) - np.sin(arg) / arg
    return np.where(d == 0, 0.0, 2.0 * cfg.v0 / (math.pi**2 * safe**2) / w * p)


def _plane_wave_elements(n, m, cfg: LatticeConfig, k_l: float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    diag = (2.0 * n + k_l / math.pi) ** 2 * cfg.e1 + mean_potential(cfg)
    return np.where(n == m, diag, _plane_wave_off_diagonal(n - m, cfg))


def h_dirichlet(n: int, m: int, cfg: LatticeConfig) -> float:
    if n < 1 or m < 1:
        raise ValueError("dirichlet indices start at 1")
    return float(_dirichlet_elements(n, m, cfg))


def h_periodic(n_prime: int, m_prime: int, cfg: LatticeConfig) -> float:
    return float(_plane_wave_elements(n_prime, m_prime, cfg, 0.0))


def h_bloch(n_prime: int, m_prime: int, k_l: float, cfg: LatticeConfig) -> float:
    return float(_plane_wave_elements(n_prime, m_prime, cfg, k_l))


def p_nm(d: int, cfg: LatticeConfig) -> float:
    """cos(d pi w/l) - sinc(d pi w/l) for d = n - m != 0."""
    if d == 0:
        raise ValueError("p_nm is only defined off the diagonal")
    arg = d * math.pi * cfg.w_over_l
    return math.cos(arg) - math.sin(arg) / arg


def hamiltonian(basis: OracleBasis, cfg: LatticeConfig) -> np.ndarray:
    q = basis.labels()
    n, m = np.meshgrid(q, q, indexing="ij")
    if basis.kind == "dirichlet":
        return _dirichlet_elements(n, m, cfg)
    return _plane_wave_elements(n, m, cfg, basis.k_l)


# --------------------------------------------------------------------------
# quadrature audit of the closed forms


def _basis_pair_integrand(kind: str, n: int, m: int, k_l: float):
    if kind == "dirichlet":
        # sin a sin b = [cos(a - b) - cos(a + b)] / 2 with a = n pi (x + 1/2)
        return [(0.5 * 2.0, (n - m) * math.pi, 0.5 * (n - m) * math.pi),
                (-0.5 * 2.0, (n + m) * math.pi, 0.5 * (n + m) * math.pi)]
    # conj(e^{i(2n pi + k)x}) e^{i(2m pi + k)x} = e^{2 i (m - n) pi x}; V is even so only the cosine survives
    return [(1.0, 2.0 * (m - n) * math.pi, 0.0)]


def quadrature_element(kind: str, n: int, m: int, cfg: LatticeConfig, k_l: float = 0.0) -> float:
    """<n|H|m> with the potential integral done by adaptive quadrature.

    Each product of basis functions is reduced to cosines c * cos(K x + phi)
    and integrated piecewise over [-1/2, -w/2], [-w/2, w/2], [w/2, 1/2].
    """
    half = 0.5 * cfg.w_over_l
    pieces = [(-0.5, -half), (-half, half), (half, 0.5)]
    total = 0.0
    for coeff, freq, phase in _basis_pair_integrand(kind, n, m, k_l):
        for a, b in pieces:
            if b <= a:
                continue
            if freq == 0.0:
                val, _ = quad(lambda x: potential_value(x, cfg), a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
            else:
                # cos(Kx + phi) = cos(phi) cos(Kx) - sin(phi) sin(Kx)
                vc, _ = quad(lambda x: potential_value(x, cfg), a, b, weight="cos", wvar=freq,
                             epsabs=1e-13, epsrel=1e-13, limit=200)
                vs, _ = quad(lambda x: potential_value(x, cfg), a, b, weight="sin", wvar=freq,
                             epsabs=1e-13, epsrel=1e-13, limit=200)
                val = math.cos(phase) * vc - math.sin(phase) * vs
            total += coeff * val
    if n == m:
        if kind == "dirichlet":
            total += n**2 * cfg.e1
        else:
            total += (2.0 * n + k_l / math.pi) ** 2 * cfg.e1
    return total


# --------------------------------------------------------------------------
# eigensolution


@dataclass
class OracleResult:
    energies: np.ndarray
    vectors: np.ndarray  # one column per state
    basis: OracleBasis

    def records(self) -> list[dict]:
        return [
            {"basis_kind": self.basis.kind, "k_l_over_pi": self.basis.k_l / math.pi, "state_index": i, "eps": float(e)}
            for i, e in enumerate(self.energies)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["basis_kind", "k_l_over_pi", "state_index", "eps"])
        for r in self.records():
            writer.writerow([r["basis_kind"], f"{r['k_l_over_pi']:.17g}", r["state_index"], f"{r['eps']:.17g}"])
        return buf.getvalue()


def eigen_solve(basis: OracleBasis, cfg: LatticeConfig, n_lowest: int, matrix: np.ndarray | None = None) -> OracleResult:
    """Lowest ``n_lowest`` eigenpairs of the truncated Hamiltonian.

    ``matrix`` overrides the assembled Hamiltonian (used to inject faults).
    """
    if not 1 <= n_lowest <= basis.size:
        raise ValueError(f"n_lowest must be in [1, {basis.size}]")
    h = hamiltonian(basis, cfg) if matrix is None else matrix
    try:
        vals, vecs = scipy.linalg.eigh(h, subset_by_index=[0, n_lowest - 1])
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"eigensolver failed for {basis}: {exc}") from exc
    scale = np.linalg.norm(h, 2) if basis.size <= 64 else np.abs(h).sum(axis=0).max()
    resid = np.linalg.norm(h @ vecs - vecs * vals, axis=0)
    if resid.max() > RESIDUAL_TOL * scale:
        raise OracleError(f"eigen residual {resid.max():.3e} exceeds {RESIDUAL_TOL} * ||H|| = {RESIDUAL_TOL * scale:.3e}")
    ortho = np.abs(vecs.T @ vecs - np.eye(n_lowest)).max()
    if ortho > RESIDUAL_TOL:
        raise OracleError(f"eigenvectors not orthonormal (max deviation {ortho:.3e})")
    return OracleResult(vals, vecs, basis)


def dump_matrix(basis: OracleBasis, cfg: LatticeConfig) -> str:
    h = hamiltonian(basis, cfg)
    return "".join(" ".join(f"{v:.17g}" for v in row) + "\n" for row in h)


# --------------------------------------------------------------------------
# wavefunctions


def oracle_wavefunction(result: OracleResult, state_index: int, x_grid) -> np.ndarray:
    """Sum_n c_n psi_n(x) on ``x_grid`` (cell units); complex for plane waves.

    The global phase is chosen so that psi(0) is real and positive when it is
    non-negligible, and psi'(0) otherwise (odd states).
    """
    if not 0 <= state_index < result.vectors.shape[1]:
        raise IndexError(f"state_index {state_index} out of range")
    basis = result.basis
    c = result.vectors[:, state_index]
    q = basis.labels()
    x = np.asarray(x_grid, dtype=float)
    if basis.kind == "dirichlet":
        phases = np.sqrt(2.0) * np.sin(np.outer(x + 0.5, q * math.pi))
        at0 = np.sqrt(2.0) * np.sin(0.5 * q * math.pi) @ c
        slope0 = np.sqrt(2.0) * (q * math.pi * np.cos(0.5 * q * math.pi)) @ c
        psi = phases @ c
    else:
        kvec = 2.0 * math.pi * q + basis.k_l
        psi = np.exp(1j * np.outer(x, kvec)) @ c
        at0 = complex(np.sum(c))
        slope0 = complex(1j * np.sum(kvec * c))
    ref = at0 if abs(at0) > 1e-8 * max(1.0, abs(slope0)) else slope0
    if abs(ref) > 0:
        psi = psi * (abs(ref) / ref)
    return psi


def ho_ground_reference(x_over_l, cfg: LatticeConfig):
    """Ground state of the untruncated oscillator, unit norm on the real line."""
    x0 = cfg.x0_over_l
    x = np.asarray(x_over_l, dtype=float)
    out = (1.0 / (math.pi * x0**2)) ** 0.25 * np.exp(-0.5 * (x / x0) ** 2)
    return float(out) if out.ndim == 0 else out
