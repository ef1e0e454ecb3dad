"""``fan``: command-line front end.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage or input-schema errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import cones, funcalc, io, restriction, transforms
from .series import TruncatedSeries
from .verify import EXAMPLE_NILPOTENT, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0x5EED


class UsageError(Exception):
    pass


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=d(DEFAULT_SEED),
                        help="RNG seed (default 0x5EED)")
    parser.add_argument("--tol", type=float, default=d(None), help="tolerance override")
    parser.add_argument("--degree", type=int, default=d(None), help="degree cap")
    parser.add_argument("--out", default=d("-"), help="output path, '-' for stdout (or json/csv)")
    parser.add_argument("--format", choices=("json", "csv"), default=d("json"))
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fan", description="Fantappie transform toolkit")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        _common(p, suppress=True)
        return p

    p = add("transform", help="apply a diagonal operator to a series")
    p.add_argument("--op", required=True, choices=("F", "L", "E", "lambda", "gamma"))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--convention", choices=transforms.LAMBDA_CONVENTIONS, default="sphere")

    p = add("cone-test", help="sampled cone-membership tests")
    p.add_argument("--test", required=True, choices=("schur", "op", "kp", "mp"))
    p.add_argument("--in", dest="infile", required=True, help="series JSON (measure JSON for kp)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--radius", type=float, default=0.9)

    p = add("funcalc", help="symmetrized functional calculus checks")
    p.add_argument("--check", required=True, choices=("bound", "eqi8", "positivity"))
    p.add_argument("--in", dest="infile", help="operator tuple JSON")
    p.add_argument("--poly", help="series JSON")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--force", action="store_true", help="skip the numerical range certificate")

    p = add("numrange", help="(joint) numerical radius of an operator tuple")
    p.add_argument("--in", dest="infile", required=True)

    p = add("spectra", help="restriction-operator eigenvalues on a Reinhardt domain")
    p.add_argument("--domain", required=True, help="ball:R or ellipsoid:R1,R2,...")
    p.add_argument("--dim", type=int, default=2, help="dimension for ball domains")

    p = add("verify", help="run a named verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--trials", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--measures", type=int)
    return parser


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise io.SchemaError(f"invalid JSON: {exc.msg}", "") from exc


def _emit(args, payload, csv_rows=None) -> None:
    fmt, out = args.format, args.out
    if out in ("json", "csv"):
        fmt, out = out, "-"
    if fmt == "csv":
        header, rows = csv_rows if csv_rows else (["key", "value"], _flatten(io.to_jsonable(payload)))
        text = io.write_csv(header, rows)
    else:
        text = io.dumps(payload)
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else k))
        return rows
    return [[prefix, obj]]


def _cmd_transform(args) -> int:
    f = io.series_from_json(_read_json(args.infile))
    ops = {
        "F": transforms.fantappie_operator,
        "L": transforms.euler_operator,
        "E": transforms.hardy_euler_operator,
        "lambda": lambda n: transforms.lambda_operator(n, args.convention),
        "gamma": lambda n: transforms.gamma_operator(n, args.convention),
    }
    _emit(args, io.series_to_json(ops[args.op](f.dim)(f)))
    return EXIT_OK


def _cmd_cone(args) -> int:
    doc = _read_json(args.infile)
    tol = args.tol
    if args.test == "kp":
        mu = io.measure_from_json(doc)
        D = 6 if args.degree is None else args.degree
        rep = cones.kp_annihilation_check(mu, D, 1e-12 if tol is None else tol)
    else:
        f = io.series_from_json(doc)
        if args.test == "mp":
            rep = cones.mp_necessary_check(f, 1e-12 if tol is None else tol)
        else:
            rng = np.random.default_rng(args.seed)
            from .measures import random_ball_points

            pts = random_ball_points(rng, args.points, f.dim, args.radius)
            if args.test == "op":
                rep = cones.op_positivity_sample(f, pts, 1e-12 if tol is None else tol)
            else:
                rep = cones.psd_check(cones.schur_kernel_gram(f, pts), 1e-9 if tol is None else tol)
    _emit(args, {"test": args.test, "report": rep})
    return EXIT_OK if rep.verdict == "pass" else EXIT_FAIL


def _cmd_funcalc(args) -> int:
    if args.check == "eqi8":
        A = EXAMPLE_NILPOTENT
        if args.infile:
            T = io.tuple_from_json(_read_json(args.infile))
            if T.n != 1:
                raise io.SchemaError("eqi8 takes a single matrix (n = 1)", "/n")
            A = T[0]
        try:
            rep = funcalc.check_nilpotent_word_bound(args.m, A)
        except funcalc.PreconditionError as exc:
            raise UsageError(str(exc)) from exc
        _emit(args, {"check": "eqi8", "report": rep})
        return EXIT_OK if rep.passed else EXIT_FAIL
    if not args.infile or not args.poly:
        raise UsageError(f"--check {args.check} needs --in tuple.json and --poly series.json")
    T = io.tuple_from_json(_read_json(args.infile))
    p = io.series_from_json(_read_json(args.poly))
    try:
        if args.check == "bound":
            rep = funcalc.verify_calculus_bound(T, p, force=args.force, seed=args.seed)
        else:
            rep = funcalc.check_positive_calc(T, p, force=args.force, seed=args.seed)
    except (funcalc.PreconditionError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, {"check": args.check, "report": rep})
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_numrange(args) -> int:
    T = io.tuple_from_json(_read_json(args.infile))
    tol = 1e-8 if args.tol is None else args.tol
    rep = funcalc.joint_num_radius(T, tol=tol, seed=args.seed)
    _emit(args, {"n": T.n, "d": T.d, "report": rep})
    return EXIT_OK


def _cmd_spectra(args) -> int:
    try:
        dom = restriction.ReinhardtDomain.parse(args.domain, args.dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    D = 8 if args.degree is None else args.degree
    rows = restriction.spectra_table(dom, D)
    tol = 1e-8 if args.tol is None else args.tol
    payload = {
        "domain": {"kind": dom.kind, "radii": [float(r) for r in dom.radii]},
        "rows": [{"alpha": list(a), "lambda": lam, "lambda_quadrature": q, "relative_error": e}
                 for a, lam, q, e in rows],
    }
    header = ["alpha", "lambda", "lambda_quadrature", "relative_error"]
    _emit(args, payload, (header, [[list(a), lam, q, e] for a, lam, q, e in rows]))
    return EXIT_OK if all(r[3] <= tol for r in rows) else EXIT_FAIL


def _cmd_verify(args) -> int:
    overrides = {}
    names = {"trials": "trials", "m_max": "m_max", "points": "points", "measures": "measures"}
    for attr, key in names.items():
        v = getattr(args, attr)
        if v is not None:
            if v < 1:
                raise UsageError(f"--{attr.replace('_', '-')} must be positive")
            overrides[key] = v
    if args.seed != DEFAULT_SEED:
        overrides["seed"] = args.seed
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.degree is not None:
        overrides["degree"] = args.degree
    try:
        result = run_suite(args.suite, **overrides)
    except TypeError as exc:
        raise UsageError(f"suite {args.suite} does not accept these overrides: {exc}") from exc
    payload = {"suite": result.name, "parameters": result.parameters, "passed": result.passed,
               "checks": result.checks}
    rows = [[c.name, c.anchor, c.passed, c.tolerance, c.values] for c in result.checks]
    _emit(args, payload, (["check", "identity", "passed", "tolerance", "values"], rows))
    return EXIT_OK if result.passed else EXIT_FAIL


COMMANDS = {
    "transform": _cmd_transform,
    "cone-test": _cmd_cone,
    "funcalc": _cmd_funcalc,
    "numrange": _cmd_numrange,
    "spectra": _cmd_spectra,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except io.SchemaError as exc:
        print(f"fan: schema error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"fan: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
