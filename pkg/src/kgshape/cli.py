"""Command-line interface.

    kgshape spectrum --family tanh --m 0.25 --s0 4 --v0 0.35
    kgshape tables --table all
    kgshape wavefunction --family linear --m 0.5 --s0 4 --v0 0.35 --n 0 --sign plus
    kgshape verify --family exp --m 1.6 --s0 4 --v0 0.25 --check oracle

Exit codes: 0 success, 1 usage error, 2 precondition failure, 3 rejected
state, 4 verification failure. Results go to stdout as one JSON object
(``schema_version`` "1") or CSV; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings

import numpy as np

from .errors import KGError
from .models import Couplings, Family, classify_level, enumerate_spectrum, shape_invariance_defect
from .nonhermitian import ShiftParam, pt_defect, shifted_grid, shifted_residual, shifted_spectrum
from .oracle import OracleConfig, compare_spectra
from .tables import PUBLISHED, TOLERANCE, reproduce_table
from .wavefunctions import (
    GridSpec,
    default_grid,
    kg_residual,
    node_count,
    normalize,
    sample_wavefunction,
)

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_REJECTED = 3
EXIT_VERIFY_FAILED = 4

ORACLE_TOLERANCE = 2e-3
SHAPE_TOLERANCE = 1e-10
RESIDUAL_TOLERANCE = 1e-3
DEFAULT_SHIFT = 0.3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _record(command, inputs, results, caught):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "warnings": [str(w.message) for w in caught],
    }


def _num(value):
    # repr round-trips doubles exactly (17 significant digits when needed)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _clean(obj):
    """Replace non-finite floats (not valid JSON) with None."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _emit_json(record, out):
    json.dump(_clean(record), out, indent=2, allow_nan=False)
    out.write("\n")


def _emit_csv(header, rows, out, comments=()):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) for v in row])
    for line in comments:
        buf.write(f"# {line}\n")
    out.write(buf.getvalue())


def _couplings(args):
    return Couplings(args.m, args.s0, args.v0)


def _coupling_inputs(args):
    return {"family": args.family, "m": args.m, "s0": args.s0, "v0": args.v0}


# --- commands ----------------------------------------------------------------


def cmd_spectrum(args, out):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = enumerate_spectrum(args.family, _couplings(args), n_max_scan=args.nmax,
                                    pairing=args.pairing)
    inputs = _coupling_inputs(args) | {"nmax": args.nmax, "pairing": args.pairing}
    if args.format == "csv":
        rows = []
        for s in report.accepted:
            rows.append([s.n, s.branch, "accepted", s.energy, s.s1, s.s2, s.a_pm, ""])
        for r in report.rejected:
            rows.append([r.n, "+" if r.sign > 0 else "-", "rejected", None, None, None, None,
                         r.reason.value])
        _emit_csv(["n", "sign", "status", "energy", "s1", "s2", "A_pm", "reason"], rows, out)
    else:
        _emit_json(_record("spectrum", inputs, report.as_dict(), caught), out)
    return EXIT_OK


def cmd_tables(args, out):
    numbers = sorted(PUBLISHED) if args.table == "all" else [int(args.table)]
    start = time.perf_counter()
    comparisons = [reproduce_table(k) for k in numbers]
    elapsed = time.perf_counter() - start
    ok = all(c.passed for c in comparisons)
    if args.format == "csv":
        rows = [
            [c.table.number, e["n"], e["quantity"], e["published"], e["computed"], e["abs_diff"]]
            for c in comparisons
            for e in c.entries
        ]
        _emit_csv(["table", "n", "quantity", "published", "computed", "abs_diff"], rows, out,
                  comments=[f"pass={str(ok).lower()}", f"tolerance={TOLERANCE!r}"])
    else:
        results = {
            "tolerance": TOLERANCE,
            "tables": [c.as_dict() for c in comparisons],
            "pass": ok,
            "elapsed_seconds": elapsed,
        }
        _emit_json(_record("tables", {"table": args.table}, results, []), out)
    for c in comparisons:
        if not c.passed:
            print(f"table {c.table.number}: max |diff| {c.max_abs_diff:.3g}, "
                  f"levels {c.counts}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_wavefunction(args, out):
    c = _couplings(args)
    state, reason = classify_level(args.family, c, args.n, args.sign, pairing=args.pairing)
    if reason is not None:
        print(f"level n={args.n} sign={args.sign} rejected: {reason.value}", file=sys.stderr)
        return EXIT_REJECTED
    shift = ShiftParam(args.shift).validate(state.family)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.grid:
            grid = GridSpec.parse(args.grid)
        elif shift.c:
            grid = shifted_grid(state, shift)
        else:
            grid = default_grid(state)
        samples = normalize(sample_wavefunction(state, grid, shift=shift.c))
        residual = kg_residual(state, grid, shift.c)
        nodes = node_count(samples)
    meta = {
        "energy": state.energy,
        "epsilon": state.epsilon,
        "shift": shift.c,
        "residual": residual,
        "node_count": nodes,
        "underflow": samples.underflow,
        "grid": f"{grid.x_min!r}:{grid.x_max!r}:{grid.count}",
    }
    inputs = _coupling_inputs(args) | {"n": args.n, "sign": args.sign, "grid": args.grid,
                                       "shift": args.shift, "pairing": args.pairing}
    x = grid.x
    if args.format == "json":
        results = dict(meta, x=x.tolist(), re_psi=samples.values.real.tolist(),
                       im_psi=samples.values.imag.tolist())
        _emit_json(_record("wavefunction", inputs, results, caught), out)
    else:
        rows = zip(x.tolist(), samples.values.real.tolist(), samples.values.imag.tolist())
        comments = [f"{k}={_num(v) if not isinstance(v, bool) else str(v).lower()}"
                    for k, v in meta.items()]
        comments += [f"warning={w.message}" for w in caught]
        _emit_csv(["x", "re_psi", "im_psi"], rows, out, comments=comments)
    return EXIT_OK


def _shape_grid(family):
    if family is Family.EXP:
        return np.linspace(-2.0, 6.0, 101)
    return np.linspace(-5.0, 5.0, 101)


def _verify_rows(args, report, shift):
    family = report.family
    checks = ("oracle", "shape", "pt") if args.check == "all" else (args.check,)
    rows = []
    if "oracle" in checks:
        cfg = OracleConfig(points=args.oracle_points)
        for r in compare_spectra(report, cfg):
            row = {"check": "oracle"} | r.as_dict()
            if r.skipped:
                row["status"] = "skipped"
            elif r.error is not None:
                row["status"] = "fail"
            else:
                row["status"] = "pass" if r.abs_diff < ORACLE_TOLERANCE else "fail"
            rows.append(row)
    if "shape" in checks:
        x = _shape_grid(family)
        shifts = [0.0] + ([shift.c] if shift.c else [])
        for s in report.accepted:
            for c in shifts:
                defect = shape_invariance_defect(family, s.shape, x, shift=c)
                rows.append({"check": "shape", "n": s.n, "sign": s.branch, "shift": c,
                             "defect": defect,
                             "status": "pass" if defect < SHAPE_TOLERANCE else "fail"})
    if "pt" in checks:
        sym = GridSpec(-5.0, 5.0, 401)
        for s in report.accepted:
            d = pt_defect(family, report.couplings, s.energy, shift, sym)
            # only the tanh family carries the non-PT-symmetric claim
            ok = d > 0 if family is Family.TANH else True
            rows.append({"check": "pt_defect", "n": s.n, "sign": s.branch, "shift": shift.c,
                         "defect": d, "status": "pass" if ok else "fail"})
        for s in report.accepted:
            res = shifted_residual(s, shift)
            rows.append({"check": "shifted_residual", "n": s.n, "sign": s.branch,
                         "shift": shift.c, "residual": res,
                         "status": "pass" if res < RESIDUAL_TOLERANCE else "fail"})
        shifted = shifted_spectrum(family, report.couplings, shift, report.n_max_scan,
                                   report.pairing)
        same = [(s.n, s.sign, s.energy) for s in shifted.accepted] == \
               [(s.n, s.sign, s.energy) for s in report.accepted]
        rows.append({"check": "spectrum_shift_invariance", "shift": shift.c,
                     "status": "pass" if same else "fail"})
    return rows


def cmd_verify(args, out):
    c = _couplings(args)
    family = Family.parse(args.family)
    shift = ShiftParam(DEFAULT_SHIFT if args.shift is None else args.shift).validate(family)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = enumerate_spectrum(family, c, n_max_scan=args.nmax, pairing=args.pairing)
        rows = _verify_rows(args, report, shift)
    ok = all(r["status"] in ("pass", "skipped") for r in rows)
    extra = [f"oracle row n={r['n']} sign={r['sign']} skipped (marginal binding)"
             for r in rows if r["status"] == "skipped"]
    inputs = _coupling_inputs(args) | {"check": args.check, "shift": shift.c,
                                       "oracle_points": args.oracle_points, "nmax": args.nmax,
                                       "pairing": args.pairing}
    if args.format == "csv":
        keys = ["check", "n", "sign", "shift", "closed_form", "oracle", "abs_diff", "defect",
                "residual", "status"]
        notes = [str(w.message) for w in caught] + extra
        _emit_csv(keys, [[r.get(k) for k in keys] for r in rows], out,
                  comments=[f"pass={str(ok).lower()}"] + [f"warning={w}" for w in notes])
    else:
        record = _record("verify", inputs, {"rows": rows, "pass": ok}, caught)
        record["warnings"] += extra
        _emit_json(record, out)
    for r in rows:
        if r["status"] == "fail":
            print(f"FAIL {r}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# --- parser ------------------------------------------------------------------


def _add_couplings(p):
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--m", type=float, required=True, help="rest mass")
    p.add_argument("--s0", type=float, required=True, help="scalar coupling")
    p.add_argument("--v0", type=float, required=True, help="vector coupling")
    p.add_argument("--pairing", choices=["row", "branch"], default="row",
                   help="level acceptance: both branches per n (row) or each branch alone")


def build_parser():
    parser = _Parser(prog="kgshape", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="closed-form bound-state spectrum")
    _add_couplings(p)
    p.add_argument("--nmax", type=int, default=64, help="scan cap on n")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("tables", help="recompute the published reference tables")
    p.add_argument("--table", choices=["1", "2", "3", "4", "all"], default="all")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("wavefunction", help="normalised eigenfunction on a grid")
    _add_couplings(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sign", choices=["plus", "minus"], required=True)
    p.add_argument("--grid", help="min:max:count")
    p.add_argument("--shift", type=float, default=0.0, help="imaginary coordinate shift c")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("verify", help="oracle, shape-invariance and PT checks")
    _add_couplings(p)
    p.add_argument("--check", choices=["oracle", "shape", "pt", "all"], default="all")
    p.add_argument("--oracle-points", type=int, default=6001)
    p.add_argument("--shift", type=float, default=None,
                   help=f"imaginary coordinate shift for the pt check (default {DEFAULT_SHIFT})")
    p.add_argument("--nmax", type=int, default=64)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_verify)
    return parser


def _glue_grid(argv):
    # "--grid -15:15:4001" would be read as an option; bind the value explicitly
    argv = list(argv)
    for i, token in enumerate(argv[:-1]):
        if token == "--grid" and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"--grid={argv[i + 1]}"]
            break
    return argv


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = _glue_grid(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args, out)
    except KGError as exc:
        print(f"kgshape: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
