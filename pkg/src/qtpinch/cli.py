"""
Command-line entry point.

Commands: validate | sigma | flip | cut | rep | degenerate | flipcheck.
Surfaces and curves are read from JSON files or, with the prefix ``corpus:``,
from the built-in corpus (``corpus:once_punctured_torus`` for a surface,
``corpus:once_punctured_torus/a`` for a curve; the curve lives on the
surface's first triangulation).

Exit codes: 0 success, 1 usage, 2 validation, 3 algebraic-check failure,
4 numeric-convergence failure.  ``--json`` switches every command to a
structured report carrying ``"schema": 1``.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .corpus import corpus
from .degeneration import (DegenerationError, NoCrossing, factorization_report,
                           flip_limit_report, pinching_family)
from .flips import FlipError, check_inducedmap
from .pinch import PinchError, cut_along, puncture_checks
from .qalgebra import AlgebraError
from .reps import RepresentationError, RootOfUnity, build_irrep
from .surface import SurfaceError, Triangulation, curve_from_dict, flip

SCHEMA = 1

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_ALGEBRA, EXIT_NUMERIC = 0, 1, 2, 3, 4

CSV_COLUMNS = ("t", "block", "r1", "r2", "r3", "length", "graph_length", "condition")


class CommandError(Exception):
    """Raised inside a command to stop with a given exit code."""

    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CommandError(message, EXIT_USAGE)


# input

def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CommandError("cannot read %s: %s" % (path, exc.strerror or exc), EXIT_USAGE)
    except json.JSONDecodeError as exc:
        raise CommandError("%s is not valid JSON: %s" % (path, exc), EXIT_VALIDATION)


def load_surface(arg):
    if arg.startswith("corpus:"):
        name = arg[len("corpus:"):]
        lib = corpus()
        if name not in lib:
            raise CommandError("unknown corpus surface %r (have %s)"
                               % (name, ", ".join(sorted(lib))), EXIT_USAGE)
        return lib[name].triangulations[0]
    return Triangulation.from_dict(_read_json(arg))


def load_curve(T, arg):
    if arg.startswith("corpus:"):
        surface, _, name = arg[len("corpus:"):].partition("/")
        lib = corpus()
        if surface not in lib or name not in lib[surface].curves:
            raise CommandError("unknown corpus curve %r" % arg, EXIT_USAGE)
        T0, curve = lib[surface].curve(name)
        if T0 != T:
            raise CommandError("corpus curve %r lives on a different triangulation" % arg,
                               EXIT_VALIDATION)
        return curve
    return curve_from_dict(T, _read_json(arg))


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CommandError("%s must be comma-separated numbers" % what, EXIT_USAGE)


def _ints(text, what):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CommandError("%s must be comma-separated integers" % what, EXIT_USAGE)


def _odd_n(text):
    N = int(text)
    if N < 3 or N % 2 == 0:
        raise argparse.ArgumentTypeError("N must be odd and at least 3")
    return N


def _schedule(args):
    if args.ts:
        ts = _floats(args.ts, "--ts")
    else:
        ts = [2.0 ** -k for k in range(13)]
    if not ts or any(not 0 < t <= 1 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise CommandError("--ts must be strictly decreasing values in (0, 1]", EXIT_USAGE)
    return ts


def _p_vector(args, T):
    p = _ints(args.p, "--p") if args.p else [0] * T.s
    if len(p) != T.s:
        raise CommandError("--p needs %d values" % T.s, EXIT_USAGE)
    return p


# output

def _emit(args, payload, text):
    if args.json:
        out = {"schema": SCHEMA, "command": args.command}
        out.update(payload)
        json.dump(out, sys.stdout, indent=2, sort_keys=True, default=_jsonable)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _jsonable(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    raise TypeError(type(obj).__name__)


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _matrix_text(M):
    return "\n".join(" ".join("%3d" % v for v in row) for row in np.asarray(M))


# commands

def cmd_validate(args):
    T = load_surface(args.surface)
    comps = [{"genus": g, "punctures": s, "euler_characteristic": chi}
             for g, s, chi in T.component_data]
    payload = {"triangles": T.triangle_count, "n": T.n, "s": T.s, "genus": T.genus,
               "components": comps, "rep_exponent": T.rep_exponent()}
    lines = ["triangles %d, edges n=%d, punctures s=%d, genus g=%d"
             % (T.triangle_count, T.n, T.s, T.genus)]
    for i, c in enumerate(comps):
        lines.append("component %d: g=%d s=%d chi=%d"
                     % (i, c["genus"], c["punctures"], c["euler_characteristic"]))
    lines.append("representation dimension exponent %d" % T.rep_exponent())
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_sigma(args):
    T = load_surface(args.surface)
    S = T.poisson_matrix()
    _emit(args, {"sigma": S, "punctures": T.puncture_vectors()}, _matrix_text(S))
    return EXIT_OK


def cmd_flip(args):
    T = load_surface(args.surface)
    if not 0 <= args.edge < T.n:
        raise CommandError("edge must be in 0..%d" % (T.n - 1), EXIT_USAGE)
    T2, _, kind = flip(T, args.edge)
    if args.out:
        _write_json(args.out, T2.to_dict())
    _emit(args, {"kind": kind.name, "surface": T2.to_dict()},
          "square kind %s\n%s" % (kind.name, json.dumps(T2.to_dict())))
    return EXIT_OK


def cmd_cut(args):
    T = load_surface(args.surface)
    curve = load_curve(T, args.curve)
    data = cut_along(T, curve)
    tau_ok = bool(np.array_equal(data.tau, data.surface.poisson_matrix()))
    punct = puncture_checks(data)
    bundle = data.to_dict()
    bundle["puncture_map"] = [[list(label), v] for label, v in data.puncture_map()]
    bundle["checks"] = {"tau_equals_sigma": tau_ok,
                        "punctures": all(punct.values())}
    if args.out:
        _write_json(args.out, bundle)
    lines = ["cut surface: g=%d s=%d n=%d (%d component(s))"
             % (data.surface.genus, data.surface.s, data.surface.n,
                len(data.surface.components)),
             "K =", _matrix_text(data.K)]
    for i, c in enumerate(data.crossings):
        lines.append("c[%d] = %s" % (i, list(map(int, c))))
    lines.append("K sigma K^T == sigma(cut): %s" % ("passed" if tau_ok else "FAILED"))
    lines.append("puncture identities: %s" % ("passed" if all(punct.values()) else "FAILED"))
    _emit(args, {"bundle": bundle}, "\n".join(lines))
    return EXIT_OK if tau_ok and all(punct.values()) else EXIT_ALGEBRA


def cmd_rep(args):
    T = load_surface(args.surface)
    x = _floats(args.x, "--x") if args.x else [1.0] * T.n
    p = _p_vector(args, T)
    rep = build_irrep(T, RootOfUnity(args.N, args.a), x, p)
    res = rep.residuals()
    if args.out:
        rep.dump(args.out)
    ok = bool(max(res.values()) <= args.tol)
    text = "d = %d\n" % rep.dim + "\n".join("%-10s %.3e" % kv for kv in sorted(res.items()))
    _emit(args, {"manifest": rep.manifest(), "ok": ok}, text)
    return EXIT_OK if ok else EXIT_NUMERIC


def _family(args, T, curve):
    y = _floats(args.target, "--target") if args.target else None
    return pinching_family(T, curve, y=y, t_min=min(_schedule(args)), spread=args.spread,
                           approach=args.approach, seed=args.seed)


def cmd_degenerate(args):
    T = load_surface(args.surface)
    curve = load_curve(T, args.curve)
    ts = _schedule(args)
    p = _p_vector(args, T)
    path = _family(args, T, curve)
    rep = factorization_report(T, curve, path, args.N, p, ts, a=args.a)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rep.rows:
        writer.writerow(["%.17g" % r.t, "-".join(map(str, r.weights)),
                         "%.6e" % r.r1, "%.6e" % r.r2, "%.6e" % r.r3,
                         ";".join("%.12g" % v for v in r.lengths),
                         ";".join("%.12g" % v for v in r.graph_lengths),
                         "%.6e" % r.condition])
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(buf.getvalue())
    summary = _summary(rep.details)
    summary["verdict"] = "PASS" if rep.verdict else "FAIL"
    text = buf.getvalue() if not args.csv else ""
    text += "verdict %s" % summary["verdict"]
    for key, entry in summary["per_block"].items():
        failed = [name for name, v in entry.items() if not (v["decreasing"] and v["below_threshold"])]
        text += "\nblock %s: %s" % (key, "ok" if not failed else "not converged: " + ", ".join(failed))
    _emit(args, {"summary": summary, "columns": CSV_COLUMNS,
                 "rows": [r.__dict__ for r in rep.rows]}, text)
    return EXIT_OK if rep.verdict else EXIT_NUMERIC


def _summary(details):
    out = dict(details)
    out["per_block"] = {"-".join(map(str, k)): v for k, v in details["per_block"].items()}
    return out


def cmd_flipcheck(args):
    T = load_surface(args.surface)
    curve = load_curve(T, args.curve)
    if not 0 <= args.edge < T.n:
        raise CommandError("edge must be in 0..%d" % (T.n - 1), EXIT_USAGE)
    if args.numeric:
        return _flipcheck_numeric(args, T, curve)
    rep = check_inducedmap(T, curve, args.edge)
    rows = []
    lines = ["case %d%s" % (rep.case, " (checked from the flipped side)" if rep.reversed else "")]
    for i, ok in enumerate(rep.verdicts):
        row = {"generator": i, "verdict": "exact-equal" if ok else "mismatch"}
        if not ok:
            row["lhs"] = rep.lhs[i].to_list()
            row["rhs"] = rep.rhs[i].to_list()
        rows.append(row)
        lines.append("Y'%d  %s" % (i, row["verdict"]))
        if not ok:
            lines.append("   lhs %r\n   rhs %r" % (rep.lhs[i], rep.rhs[i]))
    _emit(args, {"case": rep.case, "reversed": rep.reversed, "generators": rows,
                 "ok": rep.ok}, "\n".join(lines))
    return EXIT_OK if rep.ok else EXIT_ALGEBRA


def _flipcheck_numeric(args, T, curve):
    ts = _schedule(args)
    p = _p_vector(args, T)
    path = _family(args, T, curve)
    rep = flip_limit_report(T, curve, path, args.edge, args.N, p, ts, a=args.a)
    lines = ["direction %s" % rep.details["direction"], "t,generator,gap,condition,x_e"]
    for r in rep.rows:
        lines.append("%.17g,%d,%.6e,%.6e,%.6e" % (r.t, r.generator, r.gap, r.condition, r.pivot))
    lines.append("verdict %s" % ("PASS" if rep.verdict else "FAIL"))
    _emit(args, {"direction": rep.details["direction"],
                 "per_generator": {str(k): v for k, v in rep.details["per_generator"].items()},
                 "rows": [r.__dict__ for r in rep.rows],
                 "verdict": "PASS" if rep.verdict else "FAIL"}, "\n".join(lines))
    return EXIT_OK if rep.verdict else EXIT_NUMERIC


# parser

def _add_family_args(sp):
    sp.add_argument("--N", type=_odd_n, default=3, help="odd root-of-unity order")
    sp.add_argument("--a", type=int, default=1, help="q = exp(2 pi i a / N)")
    sp.add_argument("--p", help="puncture weights, comma separated")
    sp.add_argument("--target", help="limit shear coordinates y on the cut surface")
    sp.add_argument("--ts", help="decreasing t samples (default 2^0..2^-12)")
    sp.add_argument("--spread", type=float, default=20.0,
                    help="bound on |log x| growth at the smallest t")
    sp.add_argument("--approach", type=float, default=0.5,
                    help="size of the cusp-preserving term moving the cut coordinates")
    sp.add_argument("--seed", type=int, default=0, help="seed for randomized choices")


def _command(sub, common, name, **kw):
    return sub.add_parser(name, parents=[common], **kw)


def build_parser():
    ap = _Parser(prog="qtpinch", description=__doc__.split("\n\n")[0].strip())
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--json", action="store_true", help="structured output")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="structured output")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = _command(sub, common, "validate", help="check a surface file")
    sp.add_argument("surface")
    sp.set_defaults(func=cmd_validate)

    sp = _command(sub, common, "sigma", help="print the Poisson matrix")
    sp.add_argument("surface")
    sp.set_defaults(func=cmd_sigma)

    sp = _command(sub, common, "flip", help="flip an edge")
    sp.add_argument("surface")
    sp.add_argument("--edge", type=int, required=True)
    sp.add_argument("--out", help="write the flipped surface file here")
    sp.set_defaults(func=cmd_flip)

    sp = _command(sub, common, "cut", help="pinch along a multicurve")
    sp.add_argument("surface")
    sp.add_argument("curve")
    sp.add_argument("--out", help="write the pinch bundle here")
    sp.set_defaults(func=cmd_cut)

    sp = _command(sub, common, "rep", help="build an irreducible representation")
    sp.add_argument("surface")
    sp.add_argument("--N", type=_odd_n, required=True, help="odd root-of-unity order")
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--x", help="positive shear parameters, comma separated")
    sp.add_argument("--p", help="puncture weights, comma separated")
    sp.add_argument("--tol", type=float, default=1e-10, help="residual tolerance")
    sp.add_argument("--out", help="write matrices here (manifest goes to OUT.json)")
    sp.set_defaults(func=cmd_rep)

    sp = _command(sub, common, "degenerate", help="factorization along a pinching family")
    sp.add_argument("surface")
    sp.add_argument("curve")
    _add_family_args(sp)
    sp.add_argument("--csv", help="write the residual table here instead of stdout")
    sp.set_defaults(func=cmd_degenerate)

    sp = _command(sub, common, "flipcheck", help="compare a flip with the pinching maps")
    sp.add_argument("surface")
    sp.add_argument("curve")
    sp.add_argument("--edge", type=int, required=True)
    sp.add_argument("--numeric", action="store_true", help="flip-limit table along a family")
    _add_family_args(sp)
    sp.set_defaults(func=cmd_flipcheck, spread=30.0)
    return ap


_ERROR_CODES = (
    (SurfaceError, EXIT_VALIDATION),
    (RepresentationError, EXIT_VALIDATION),
    (PinchError, EXIT_ALGEBRA),
    (FlipError, EXIT_ALGEBRA),
    (AlgebraError, EXIT_ALGEBRA),
    (NoCrossing, EXIT_USAGE),
    (DegenerationError, EXIT_NUMERIC),
)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CommandError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.code
    except Exception as exc:
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
