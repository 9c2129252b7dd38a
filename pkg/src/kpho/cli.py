"""Command-line front end: ``kpho <command> [options]``.

Every run writes its tables plus ``manifest.txt`` (key=value echo of the
invocation, replayable with ``kpho replay``) into the output directory.
Exit codes: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import shlex
import sys
from pathlib import Path

import numpy as np

from . import bloch, oracle, tight_binding, validation
from .model import LatticeConfig, parse_key_values
from .single_well import SpectralEquation, find_levels

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# output helpers


class Writer:
    def __init__(self, out: Path, fmt: str):
        self.out = out
        self.fmt = fmt
        self.written: list[Path] = []

    def _put(self, name: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        self.written.append(path)
        return path

    def table(self, stem: str, csv_text: str, records: list[dict]) -> Path:
        if self.fmt == "json":
            return self._put(f"{stem}.json", json.dumps(records, indent=1) + "\n")
        return self._put(f"{stem}.csv", csv_text)

    def text(self, name: str, text: str) -> Path:
        return self._put(name, text)


def _gnuplot(title: str, xlabel: str, ylabel: str, series: list[tuple[str, str, str]]) -> str:
    """series: (csv file, using clause, legend)."""
    lines = [
        "set datafile separator ','",
        "set key outside",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    parts = [f"'{f}' every ::1 using {u} with lines title '{t}'" for f, u, t in series]
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def _cfg(args) -> LatticeConfig:
    if args.v0 is None or args.w_over_l is None:
        raise UsageError(f"{args.command} needs --v0 and --w-over-l")
    try:
        return LatticeConfig(args.v0, args.w_over_l)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# commands


def cmd_levels(args, w: Writer) -> int:
    cfg = _cfg(args)
    if args.bc == "bloch":
        raise UsageError("levels takes --bc isolated, dirichlet or periodic; use 'bands' for Bloch")
    ids = [f"{args.bc}_even", f"{args.bc}_odd"] if args.bc == "isolated" else [
        f"{args.bc}_{p}_{r}" for r in ("bound", "scatter") for p in ("even", "odd")
    ]
    failures = 0
    for eq_id in ids:
        levels = find_levels(SpectralEquation(eq_id, cfg))
        failures += len(levels.failures)
        w.table(f"levels_{eq_id}", levels.to_csv(), levels.records())
        for lv in levels.levels:
            print(f"{eq_id} {lv.index} {lv.eps:.12g}")
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_bands(args, w: Writer) -> int:
    cfg = _cfg(args)
    bands = bloch.band_structure(cfg, args.bands, args.kpoints)
    w.table("bands", bloch.bands_to_csv(bands), bloch.band_records(bands))
    for b in bands:
        print(f"band {b.band_index}: eps in [{b.eps_min:.12g}, {b.eps_max:.12g}] width {b.width:.6g}")
    if args.format == "csv":
        series = [("bands.csv", f"($1=={b.band_index}?$2:1/0):3", f"band {b.band_index}") for b in bands]
        w.text("bands.gp", _gnuplot(f"v0={cfg.v0:g}, w/l={cfg.w_over_l:.4g}", "k l / pi", "eps", series))
    return EXIT_OK


def cmd_wavefunction(args, w: Writer) -> int:
    cfg = _cfg(args)
    k_l = args.k_over_pi * math.pi
    if not 0.0 <= args.k_over_pi <= 1.0:
        raise UsageError("--k-over-pi must lie in [0, 1]")
    band = bloch.band_structure(cfg, args.band, 2)[args.band - 1]
    eps = bloch.energy_at(band, k_l, cfg)
    x = np.linspace(-1.5, 1.5, args.points)
    _, psi = bloch.bloch_wavefunction(eps, k_l, cfg, x)
    records = [
        {"x_over_l": float(a), "re_psi": float(p.real), "im_psi": float(p.imag),
         "potential_value": float(bloch.potential_value(a - round(a), cfg))}
        for a, p in zip(x, psi)
    ]
    w.table("wavefunction", bloch.wavefunction_csv(x, psi, cfg), records)
    print(f"band {args.band} k l/pi={args.k_over_pi:g} eps={eps:.12g}")
    if args.format == "csv":
        w.text("wavefunction.gp", _gnuplot(
            f"band {args.band}, k l/pi={args.k_over_pi:g}", "x / l", "psi",
            [("wavefunction.csv", "1:2", "Re psi"), ("wavefunction.csv", "1:3", "Im psi"),
             ("wavefunction.csv", "1:($4/10)", "V / 10")]))
    return EXIT_OK


def _parse_sweep(text: str | None) -> tuple[tuple[float, float], ...]:
    if not text:
        return tight_binding.PANELS
    out = []
    for item in text.split(","):
        try:
            v0, b = item.split(":")
            out.append((float(v0), float(b)))
        except ValueError:
            raise UsageError(f"--sweep entries look like V0:B_OVER_L, got {item!r}") from None
    return tuple(out)


def cmd_tightbinding(args, w: Writer) -> int:
    panels = _parse_sweep(args.sweep)
    fits = tight_binding.sweep(panels, args.kpoints)
    series = []
    for fit in fits:
        stem = f"tb_v0_{fit.v0:g}_b_{fit.b_over_l:.4g}"
        w.table(stem, fit.to_csv(), fit.records())
        verdict = "agrees" if fit.agrees else "disagrees"
        print(f"v0={fit.v0:g} b/l={fit.b_over_l:.4g} eps0={fit.eps0:.10g} t1={fit.t1:.6g} "
              f"max_dev/bandwidth={fit.max_dev_over_bandwidth:.4g} ({verdict})")
        series.append(stem)
    w.table("tb_summary", tight_binding.sweep_csv(fits), [f.summary() for f in fits])
    if args.format == "csv":
        for stem in series:
            w.text(f"{stem}.gp", _gnuplot(stem, "k l / pi", "eps", [
                (f"{stem}.csv", "1:2", "exact"), (f"{stem}.csv", "1:3", "tight binding"), (f"{stem}.csv", "1:4", "eps0")]))
    return EXIT_OK


def cmd_oracle(args, w: Writer) -> int:
    cfg = _cfg(args)
    kind = {"isolated": None, "dirichlet": "dirichlet", "periodic": "periodic", "bloch": "bloch"}[args.bc]
    if kind is None:
        raise UsageError("oracle takes --bc dirichlet, periodic or bloch")
    k_l = args.k_over_pi * math.pi if kind == "bloch" else 0.0
    size = args.basis_size or oracle.OracleBasis.default(kind).size
    basis = oracle.OracleBasis(kind, size, k_l)
    res = oracle.eigen_solve(basis, cfg, min(args.n_lowest, size))
    w.table("oracle", res.to_csv(), res.records())
    for i, e in enumerate(res.energies):
        print(f"{kind} {i} {e:.12g}")
    return EXIT_OK


def cmd_validate(args, w: Writer) -> int:
    if args.v0 is None:
        args.v0 = 6.0
    if args.w_over_l is None:
        args.w_over_l = 2.0 / 3.0
    cfg = _cfg(args)
    names = None if args.checks is None else [n for n in args.checks.split(",") if n]
    unknown = [n for n in names or [] if n not in validation.CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; available: {','.join(validation.CHECKS)}")
    try:
        perturb = [validation.Perturbation.parse(p) for p in args.perturb_element]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = validation.run_checks(cfg, names, perturb)
    w.table("validation", report.to_csv(), report.records())
    for r in report.results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} measured={r.measured:.3e} tol={r.tolerance:.0e} {r.detail}")
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_replay(args, _w) -> int:
    values = parse_key_values(Path(args.manifest).read_text())
    if "argv" not in values:
        raise UsageError(f"{args.manifest} has no argv entry")
    argv = shlex.split(values["argv"])
    if args.out:
        argv += ["--out", args.out]
    return main(argv)


COMMANDS = {
    "levels": cmd_levels,
    "bands": cmd_bands,
    "wavefunction": cmd_wavefunction,
    "tightbinding": cmd_tightbinding,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
    "replay": cmd_replay,
}


# --------------------------------------------------------------------------
# parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--v0", type=float, help="barrier height in units of hbar*omega/2")
    common.add_argument("--w-over-l", type=float, help="well width over cell length")
    common.add_argument("--out", default="kpho_out", help="output directory (KPHO_OUT overrides)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="kpho", description="Kronig-Penney lattice of truncated oscillator wells")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", parents=[common], help="single-well spectra")
    p.add_argument("--bc", choices=("isolated", "dirichlet", "periodic", "bloch"), default="isolated")

    p = sub.add_parser("bands", parents=[common], help="exact Bloch bands")
    p.add_argument("--bands", type=_positive_int, default=4)
    p.add_argument("--kpoints", type=_positive_int, default=101)

    p = sub.add_parser("wavefunction", parents=[common], help="Bloch state over three cells")
    p.add_argument("--band", type=_positive_int, default=1)
    p.add_argument("--k-over-pi", type=float, default=0.0)
    p.add_argument("--points", type=_positive_int, default=601)

    p = sub.add_parser("tightbinding", parents=[common], help="tight-binding vs exact band 1")
    p.add_argument("--sweep", help="comma list of V0:B_OVER_L panels (default: the eight standard panels)")
    p.add_argument("--kpoints", type=_positive_int, default=101)

    p = sub.add_parser("oracle", parents=[common], help="matrix-mechanics eigenvalues")
    p.add_argument("--bc", choices=("isolated", "dirichlet", "periodic", "bloch"), default="dirichlet")
    p.add_argument("--basis-size", type=_positive_int)
    p.add_argument("--n-lowest", type=_positive_int, default=10)
    p.add_argument("--k-over-pi", type=float, default=0.0)

    p = sub.add_parser("validate", parents=[common], help="analytic vs oracle cross-checks")
    p.add_argument("--checks", help=f"comma list from: {','.join(validation.CHECKS)} (empty string runs none)")
    p.add_argument("--perturb-element", action="append", default=[], help=argparse.SUPPRESS)

    p = sub.add_parser("replay", help="re-run the invocation recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out")
    return parser


def _manifest(args, argv: list[str], out: Path) -> str:
    lines = [f"command={args.command}", f"argv={shlex.join(argv)}"]
    for key, value in sorted(vars(args).items()):
        if key in ("command", "out"):
            continue
        lines.append(f"{key}={value!r}")
    lines.append(f"out={out}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "replay":
        try:
            return cmd_replay(args, None)
        except (OSError, UsageError) as exc:
            print(f"kpho: {exc}", file=sys.stderr)
            return EXIT_USAGE

    out = Path(os.environ.get("KPHO_OUT") or args.out)
    writer = Writer(out, args.format)
    try:
        status = COMMANDS[args.command](args, writer)
    except UsageError as exc:
        print(f"kpho: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"kpho: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        status = EXIT_NUMERIC
    writer.text("manifest.txt", _manifest(args, argv, out))
    return status


if __name__ == "__main__":
    sys.exit(main())
