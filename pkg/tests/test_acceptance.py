"""Acceptance gates: one PASS/FAIL line per criterion, each with a wall-clock budget."""

import math
import time

import numpy as np
import pytest

from kpho import bloch, oracle, tight_binding as tb, validation
from kpho.model import LatticeConfig
from kpho.single_well import SpectralEquation, find_levels


@pytest.fixture
def gate(capsys):
    """Time a criterion, print its verdict line, then assert on it."""
    start = time.perf_counter()

    def finish(number: int, title: str, ok: bool, detail: str, budget: float):
        elapsed = time.perf_counter() - start
        passed = ok and elapsed < budget
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'} criterion {number}: {title}: {detail}; {elapsed:.2f} s (< {budget:g} s)")
        assert ok, detail
        assert elapsed < budget, f"took {elapsed:.2f} s"

    return finish


def isolated(cfg: LatticeConfig) -> list[float]:
    return sorted(find_levels(SpectralEquation("isolated_even", cfg)).energies
                  + find_levels(SpectralEquation("isolated_odd", cfg)).energies)


def test_criterion_01_harmonic_limit(gate):
    levels = isolated(LatticeConfig(200.0, 2 / 3))[:4]
    dev = float(np.abs(np.array(levels) - [1, 3, 5, 7]).max())
    gate(1, "harmonic-oscillator limit", dev <= 1e-3, f"max |eps - (1,3,5,7)| = {dev:.2e}", 1.0)


def test_criterion_02_oracle_equivalence(gate, cfg6):
    report = validation.run_checks(cfg6, ["levels_dirichlet", "levels_periodic", "bands_bloch"])
    sizes = (oracle.OracleBasis.default("dirichlet").size, oracle.OracleBasis.default("periodic").size)
    dev = max(r.measured for r in report.results)
    gate(2, "analytic vs matrix oracle", report.passed and sizes == (400, 401),
         f"worst delta {dev:.2e} (N = {sizes[0]}, {sizes[1]}; 9 k-points)", 30.0)


def test_criterion_03_form_identity(gate, cfg6):
    report = validation.run_checks(cfg6, ["dispersion_forms", "square_well_forms"])
    dev = max(r.measured for r in report.results)
    gate(3, "dispersion form identity", report.passed, f"worst relative delta {dev:.2e}", 1.0)


def test_criterion_04_band_structure(gate, cfg6):
    bands = bloch.band_structure(cfg6, 3, 101)
    levels = isolated(cfg6)
    centre_dev = max(abs(bands[i].center - levels[i]) for i in range(2))
    widths = [b.width for b in bands]
    ok = centre_dev <= 0.05 and bands[2].eps_max < 5.0 and widths[0] < widths[1] < widths[2]
    gate(4, "band structure at v0 = 6", ok,
         f"centre offset {centre_dev:.2e}, band 3 max {bands[2].eps_max:.4f}, widths {[f'{w:.3g}' for w in widths]}", 10.0)


def test_criterion_05_tight_binding_gates(gate):
    fits = tb.sweep([(5.0, 0.2), (3.0, 0.4), (1.5, 0.2)])
    devs = [f.max_dev_over_bandwidth for f in fits]
    ok = devs[0] <= 0.02 and devs[1] <= 0.02 and devs[2] > 0.02
    gate(5, "tight-binding accuracy", ok,
         "max dev / bandwidth = " + ", ".join(f"{d:.4f} (v0={f.v0:g}, b={f.b_over_l:g})" for f, d in zip(fits, devs)), 10.0)


def test_criterion_06_exactness(gate, cfg5):
    band = bloch.band_structure(cfg5, 1, 50)[0]
    worst = max(abs(tb.exactness_residual(float(e), float(k), cfg5)) for k, e in zip(band.k_l, band.eps))
    gate(6, "exactness of the eta expansion", worst <= 1e-9, f"max residual {worst:.2e} on 50 samples", 5.0)


def test_criterion_07_wavefunctions(gate, cfg6):
    bands = bloch.band_structure(cfg6, 4, 5)
    pairs = [(b, j) for b in bands[:3] for j in (0, 1, 2, 4)]
    x = np.linspace(-0.5, 0.5, 9)
    jump = bloch_dev = 0.0
    for band, j in pairs:
        state = bloch.bloch_state(band.eps[j], band.k_l[j], cfg6)
        jump = max(jump, *state.matching_jumps().values())
        for deriv in (False, True):
            diff = state.values(x + 1.0, derivative=deriv) - state.phase * state.values(x, derivative=deriv)
            bloch_dev = max(bloch_dev, float(np.abs(diff).max()))
    third = bloch.bloch_state(bands[2].edge_k0, 0.0, cfg6).values(np.linspace(-0.5, 0.5, 4001)).real
    nodes = int(np.count_nonzero(np.diff(np.sign(third)) != 0))
    ok = len(pairs) == 12 and jump <= 1e-9 and bloch_dev <= 1e-9 and nodes == 2
    gate(7, "wavefunction invariants", ok,
         f"{len(pairs)} states, matching jump {jump:.1e}, Bloch condition {bloch_dev:.1e}, band-3 k=0 nodes {nodes}", 5.0)


def test_criterion_08_quadrature_audit(gate, cfg6):
    names = ["matrix_elements_dirichlet", "matrix_elements_periodic", "matrix_elements_bloch"]
    report = validation.run_checks(cfg6, names)
    dev = max(r.measured for r in report.results)
    gate(8, "matrix-element quadrature audit", report.passed, f"worst |h_analytic - h_quad| {dev:.2e} (3 x 50)", 10.0)


def test_criterion_09_centering(gate):
    fit = tb.compare_tb_exact(LatticeConfig.from_barrier(1.5, 0.2))
    gate(9, "exact band sits above eps0", fit.mean_shift > 0,
         f"<eps_exact> - eps0 = {fit.mean_shift:+.4f}", 5.0)


def test_criterion_10_properties(gate, cfg6):
    kummer = validation.run_checks(cfg6, ["kummer_derivatives"]).results[0]

    # eps(k) = eps(-k): oracle spectra at +k and -k, and an on-shell state at -k
    sym = 0.0
    for k in (0.3, 1.1, 2.5):
        plus = oracle.eigen_solve(oracle.OracleBasis("bloch", 101, k), cfg6, 3).energies
        minus = oracle.eigen_solve(oracle.OracleBasis("bloch", 101, -k), cfg6, 3).energies
        sym = max(sym, float(np.abs(plus - minus).max()))
    band = bloch.band_structure(cfg6, 2, 5)[1]
    bloch.bloch_state(band.eps[2], -band.k_l[2], cfg6)

    interlaced = True
    for v0 in (3.0, 6.0, 20.0):
        cfg = LatticeConfig(v0, 2 / 3)
        parity = [p for _, p in sorted(
            [(e, 0) for e in find_levels(SpectralEquation("isolated_even", cfg)).energies]
            + [(e, 1) for e in find_levels(SpectralEquation("isolated_odd", cfg)).energies])]
        interlaced &= parity == [i % 2 for i in range(len(parity))]

    hierarchy = True
    for v0, b in ((3.0, 0.2), (5.0, 0.2), (3.0, 0.4)):
        b1 = bloch.band_structure(LatticeConfig.from_barrier(v0, b), 1, 101)[0]
        _, ts = tb.fit_cosine_harmonics(b1.k_l, b1.eps, 3)
        hierarchy &= abs(ts[0]) > abs(ts[1]) > abs(ts[2])

    ok = kummer.passed and sym <= 1e-9 and interlaced and hierarchy
    gate(10, "property suite", ok,
         f"Kummer FD {kummer.measured:.1e}, |eps(k) - eps(-k)| {sym:.1e}, interlacing {interlaced}, t-hierarchy {hierarchy}",
         10.0)
