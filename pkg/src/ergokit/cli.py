"""Command-line front end: work bounds and CSV datasets for the figures.

Commands
--------
meps        most energetic passive state across an entropy grid
region      entropy-energy diagram boundaries (thermal above, extremal below)
scaling     locked-work gap versus system size, plus the fixed-entropy inset
bounds      all work quantities for a state file, with contract checks
asymptotic  leading-order entropy-energy curve for a DOS model

Every CSV starts with '#'-prefixed metadata lines recording the resolved
configuration, then a header row; floats are written with 17 significant
digits.  Output is deterministic for a fixed configuration.  Exit codes:
0 success, 1 usage or config error, 2 contract violation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import thermal
from ._backend import backend_name
from .asymptotic import DosModel, sigma0_energy, s_of_e
from .meps import meps_at_energy, meps_at_entropy
from .spectrum import (Spectrum, load_spectrum, make_equally_spaced,
                       make_exponential_dos, make_polynomial_dos,
                       make_qubit_ensemble)
from .states import load_populations

SCALING_DEFAULT_SIZES = {
    "equally_spaced": (50, 100, 200, 400),
    "qubits": (10, 50, 100, 200),
}


# -- small helpers -----------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if x == 0.0:
            x = 0.0
        return f"{x:.17g}"
    return str(value)


def _emit(out_path, meta: dict, header: list[str], rows) -> None:
    lines = [f"# {key}={_fmt(val)}" for key, val in meta.items()]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str, name: str, low: int, high: int) -> list[float]:
    parts = [p for p in text.split(",") if p]
    if not low <= len(parts) <= high:
        raise ValueError(f"--{name} expects {low}"
                         + (f" to {high}" if high > low else "")
                         + f" comma-separated values, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"--{name}: could not parse {text!r}") from None


def _add_spectrum_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("spectrum source")
    group.add_argument("--spectrum", metavar="FILE",
                       help="spectrum file: one 'energy degeneracy' per line")
    group.add_argument("--equally-spaced", metavar="D,GAP",
                       help="equally spaced levels")
    group.add_argument("--qubits", metavar="N,SPLIT",
                       help="ensemble of N non-interacting two-level systems")
    group.add_argument("--poly-dos", metavar="A,C,EM[,LEVELS]",
                       help="polynomial DOS discretization (default 400 levels)")
    group.add_argument("--exp-dos", metavar="B,EM[,LEVELS]",
                       help="exponential DOS discretization (default 400 levels)")


def _build_spectrum(args, default=None) -> tuple[Spectrum, str]:
    sources = [s for s in ("spectrum", "equally_spaced", "qubits",
                           "poly_dos", "exp_dos") if getattr(args, s, None)]
    if len(sources) > 1:
        raise ValueError("give at most one spectrum source")
    if not sources:
        if default is None:
            raise ValueError("a spectrum source is required")
        return default, "default"
    src = sources[0]
    if src == "spectrum":
        return load_spectrum(args.spectrum), f"file:{args.spectrum}"
    if src == "equally_spaced":
        d, gap = _parse_floats(args.equally_spaced, "equally-spaced", 2, 2)
        return make_equally_spaced(int(d), gap), f"equally_spaced:{int(d)},{gap:g}"
    if src == "qubits":
        n, split = _parse_floats(args.qubits, "qubits", 2, 2)
        return make_qubit_ensemble(int(n), split), f"qubits:{int(n)},{split:g}"
    if src == "poly_dos":
        vals = _parse_floats(args.poly_dos, "poly-dos", 3, 4)
        a, c, e_max = vals[:3]
        levels = int(vals[3]) if len(vals) == 4 else 400
        return (make_polynomial_dos(a, c, e_max, levels),
                f"poly_dos:{a:g},{c:g},{e_max:g},{levels}")
    vals = _parse_floats(args.exp_dos, "exp-dos", 2, 3)
    b, e_max = vals[:2]
    levels = int(vals[2]) if len(vals) == 3 else 400
    return make_exponential_dos(b, e_max, levels), f"exp_dos:{b:g},{e_max:g},{levels}"


def _grid(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 2:
        raise ValueError(f"grid needs at least 2 points, got {count}")
    return np.linspace(lo, hi, count)


# -- commands ----------------------------------------------------------------

def cmd_meps(args) -> int:
    spec, src = _build_spectrum(args)
    if args.s_range:
        s_lo, s_hi = _parse_floats(args.s_range, "s-range", 2, 2)
    else:
        s_lo, s_hi = 0.0, spec.log_dim
    rows = []
    for s_target in _grid(s_lo, s_hi, args.grid):
        sol = meps_at_entropy(spec, float(s_target), tol_s=args.tol_s)
        plateau = abs(sol.entropy_value - s_target) > args.tol_s
        rows.append((float(s_target), sol.energy_value,
                     spec.cut_count(sol.pair[0]), spec.cut_count(sol.pair[1]),
                     sol.lam, sol.entropy_value, plateau))
    meta = {"command": "meps", "spectrum": src, "grid": args.grid,
            "s_range": f"{s_lo:.17g}:{s_hi:.17g}", "tol_s": args.tol_s,
            "backend": backend_name()}
    _emit(args.out, meta,
          ["S_target", "E_star", "k", "l", "lambda", "S_achieved", "plateau"],
          rows)
    return 0


def cmd_region(args) -> int:
    spec, src = _build_spectrum(args, default=make_equally_spaced(4, 1.0))
    if args.e_range:
        e_lo, e_hi = _parse_floats(args.e_range, "e-range", 2, 2)
    else:
        e_lo, e_hi = spec.ground_energy, spec.mean_energy
    rows = []
    violation = False
    for e_target in _grid(e_lo, e_hi, args.grid):
        s_thermal = thermal.gibbs(
            spec, thermal.beta_for_energy(spec, float(e_target),
                                          tol=args.tol_root)).entropy
        s_meps = meps_at_energy(spec, float(e_target)).entropy_value
        violation |= s_thermal - s_meps < -1e-10
        rows.append((float(e_target), s_thermal, s_meps))
    meta = {"command": "region", "spectrum": src, "grid": args.grid,
            "e_range": f"{e_lo:.17g}:{e_hi:.17g}", "tol_root": args.tol_root,
            "backend": backend_name()}
    _emit(args.out, meta, ["E", "S_thermal", "S_meps"], rows)
    if violation:
        print("error: thermal boundary fell below the extremal boundary",
              file=sys.stderr)
        return 2
    return 0


def _scaling_spectrum(mode: str, size: int) -> Spectrum:
    if mode == "equally_spaced":
        return make_equally_spaced(size, 1.0)
    return make_qubit_ensemble(size, 1.0)


def cmd_scaling(args) -> int:
    if args.sizes:
        sizes = [int(v) for v in _parse_floats(args.sizes, "sizes", 1, 64)]
    else:
        sizes = list(SCALING_DEFAULT_SIZES[args.mode])
    s_over = _grid(0.0, 1.0, args.grid)
    rows = []
    for size in sizes:
        spec = _scaling_spectrum(args.mode, size)
        log_dim = spec.log_dim
        for frac in s_over:
            gap = thermal.delta_max(spec, float(frac) * log_dim,
                                    tol_s=args.tol_s)
            rows.append(("curve", size, float(frac), gap / log_dim))
    for size in sizes:
        spec = _scaling_spectrum(args.mode, size)
        log_dim = spec.log_dim
        gap = thermal.delta_max(spec, args.inset_s * log_dim, tol_s=args.tol_s)
        rows.append(("inset", size, args.inset_s, gap / log_dim))
    meta = {"command": "scaling", "mode": args.mode,
            "sizes": ",".join(str(s) for s in sizes), "grid": args.grid,
            "inset_s_over_lnd": args.inset_s, "tol_s": args.tol_s,
            "backend": backend_name()}
    _emit(args.out, meta,
          ["dataset", "system_param", "S_over_lnd", "delta_over_lnd"], rows)
    return 0


def cmd_bounds(args) -> int:
    spec, src = _build_spectrum(args)
    if not args.state:
        raise ValueError("bounds needs --state FILE")
    rho = load_populations(spec, args.state)
    report = thermal.bound_report(rho, beta_bath=args.beta, tol_s=args.tol_s)

    lines = ["# command=bounds", f"# spectrum={src}", f"# state={args.state}",
             f"# backend={backend_name()}"]
    pairs = [
        ("ergotropy", report.ergotropy),
        ("w_act", report.w_act),
        ("delta_max", report.delta_max),
        ("weight_lower", report.weight_lower),
        ("weight_upper", report.weight_upper),
    ]
    failures = []
    if report.weight_lower - report.ergotropy > 1e-10:
        failures.append("weight_lower exceeds ergotropy")
    if report.ergotropy - report.weight_upper > 1e-10:
        failures.append("ergotropy exceeds weight_upper")
    if report.w_act - report.delta_max > 1e-9:
        failures.append("activatable work exceeds delta_max")
    if report.bath_terms is not None:
        terms = report.bath_terms
        pairs += [
            ("bath_delta_term", terms.delta_term),
            ("bath_matched_free_energy", terms.matched_free_energy),
            ("bath_free_energy", terms.bath_free_energy),
            ("bath_total", terms.total),
        ]
    lines.extend(f"{name}={_fmt(value)}" for name, value in pairs)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if failures:
        for failure in failures:
            print(f"contract violation: {failure}", file=sys.stderr)
        return 2
    return 0


def cmd_asymptotic(args) -> int:
    if args.poly_dos and args.exp_dos:
        raise ValueError("give either --poly-dos or --exp-dos, not both")
    if args.poly_dos:
        a, c, e_max = _parse_floats(args.poly_dos, "poly-dos", 3, 4)[:3]
        model = DosModel.polynomial(a, c, e_max)
        src = f"poly:{a:g},{c:g},{e_max:g}"
    elif args.exp_dos:
        b, e_max = _parse_floats(args.exp_dos, "exp-dos", 2, 3)[:2]
        model = DosModel.exponential(b, e_max)
        src = f"exp:{b:g},{e_max:g}"
    else:
        raise ValueError("asymptotic needs --poly-dos or --exp-dos")
    if args.e_range:
        e_lo, e_hi = _parse_floats(args.e_range, "e-range", 2, 2)
    else:
        e_lo, e_hi = 0.0, sigma0_energy(model, 1.0)
    rows = [(float(e), s_of_e(model, float(e)))
            for e in _grid(e_lo, e_hi, args.grid)]
    meta = {"command": "asymptotic", "model": src, "grid": args.grid,
            "e_range": f"{e_lo:.17g}:{e_hi:.17g}"}
    _emit(args.out, meta, ["E", "S"], rows)
    return 0


# -- parser ------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergokit",
        description="Extremal passive states and work-extraction bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spectrum=True):
        if spectrum:
            _add_spectrum_args(p)
        p.add_argument("--grid", type=int, default=101,
                       help="number of grid points (default 101)")
        p.add_argument("--s-range", metavar="LO,HI", help="entropy grid range")
        p.add_argument("--e-range", metavar="LO,HI", help="energy grid range")
        p.add_argument("--tol-s", type=float, default=1e-9,
                       help="entropy matching tolerance (default 1e-9)")
        p.add_argument("--tol-root", type=float, default=1e-10,
                       help="root finding tolerance (default 1e-10)")
        p.add_argument("--out", metavar="PATH",
                       help="output file (default: stdout)")

    p = sub.add_parser("meps", help="most energetic passive state per entropy")
    common(p)
    p.set_defaults(func=cmd_meps)

    p = sub.add_parser("region", help="entropy-energy diagram boundaries")
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("scaling", help="locked-work gap versus system size")
    p.add_argument("--mode", choices=("equally_spaced", "qubits"),
                   default="equally_spaced")
    p.add_argument("--sizes", metavar="N1,N2,...",
                   help="system sizes (defaults follow the mode)")
    p.add_argument("--inset-s", type=float, default=0.1,
                   help="inset entropy fraction S/ln(d) (default 0.1)")
    common(p, spectrum=False)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("bounds", help="work quantities for a state file")
    common(p)
    p.add_argument("--state", metavar="FILE",
                   help="population file: one probability per line")
    p.add_argument("--beta", type=float,
                   help="bath inverse temperature for the free-energy split")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("asymptotic", help="leading-order S(E) for a DOS model")
    common(p)
    p.set_defaults(func=cmd_asymptotic)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
