"""``subdep`` command line: mu | matrix | bernoulli | clayton-curve | validate.

Exit status: 0 on success (warnings included), 2 for usage or input errors,
3 for numerical failures.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .empirical import BivariateSample, dependence_matrix, empirical_subcopula, mu_empirical
from .parametric import (
    DEFAULT_QUAD_RESOLUTION,
    DEFAULT_REFINE_TOL,
    DEFAULT_RESOLUTION,
    BernoulliPairModel,
    bernoulli_mu_closed,
    bernoulli_pearson,
    bernoulli_subcopula,
    clayton_curve,
)
from .reports import (
    ReportDocument,
    read_csv,
    read_subcopula,
    report_dict,
    rows_to_csv,
    subcopula_dict,
    subcopula_to_csv,
)
from .subcopula import AXIOM_TOL, StructureError, mu_measure, validate

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


def _cols(text: str | None) -> list[str] | None:
    if text is None:
        return None
    names = [c.strip() for c in text.split(",") if c.strip()]
    if not names:
        raise InputError("--cols is empty")
    return names


def _load(args):
    if not args.input:
        raise InputError("--input is required")
    try:
        return read_csv(args.input, args.na_token)
    except FileNotFoundError:
        raise InputError(f"no such file: {args.input}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _base_params(args) -> dict:
    params = {}
    if getattr(args, "seed", None) is not None:
        params["seed"] = args.seed
    return params


def cmd_mu(args) -> tuple[ReportDocument, str | None]:
    data = _load(args)
    names = _cols(args.cols) or data.column_names
    if len(names) != 2:
        raise InputError(f"mu needs exactly two columns, got {names}; use --cols x,y")
    try:
        x, y = data.column(names[0]), data.column(names[1])
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    try:
        sample = BivariateSample.from_arrays(x, y)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = mu_empirical(sample)
    results = report_dict(rep)
    results["m1"], results["m2"] = rep.domain_sizes[0] - 1, rep.domain_sizes[1] - 1
    warnings = list(rep.warnings)
    s = None
    if args.dump_subcopula:
        s = empirical_subcopula(sample)
        results["subcopula"] = subcopula_dict(s)
    params = {"input": args.input, "cols": names, "na_token": args.na_token, **_base_params(args)}
    doc = ReportDocument("mu", params, results, warnings)
    if args.format == "csv":
        keys = ["mu", "d_s", "d_m", "d_w", "n", "dropped", "m1", "m2"]
        text = rows_to_csv(["key", "value"], [[k, results[k]] for k in keys])
        for k in ("mu", "d_s", "d_m", "d_w"):
            text += f"{k}_exact,{results[k + '_exact']}\n"
        if s is not None:
            text += "\n" + subcopula_to_csv(s)
        return doc, text
    return doc, None


def cmd_matrix(args):
    data = _load(args)
    names = _cols(args.cols) or data.column_names
    try:
        cols = {n: data.column(n) for n in names}
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    if len(cols) < 2:
        raise InputError("matrix needs at least two columns")
    dm = dependence_matrix(cols)
    warnings = [f"no complete rows for ({a}, {b}); entry unavailable" for a, b in dm.unavailable]
    warnings += [f"constant variable in ({a}, {b}); mu set to 0" for a, b in dm.degenerate]
    for (a, b), rep in dm.reports.items():
        if rep.dropped:
            warnings.append(f"({a}, {b}): {rep.dropped} incomplete pair(s) dropped")
    results = {
        "names": list(dm.names),
        "mu": [[None if np.isnan(v) else float(v) for v in row] for row in dm.values],
        "n": [[None] * len(names) for _ in names],
    }
    for (a, b), rep in dm.reports.items():
        i, j = names.index(a), names.index(b)
        results["n"][i][j] = results["n"][j][i] = rep.n
    params = {"input": args.input, "cols": list(names), "na_token": args.na_token, **_base_params(args)}
    doc = ReportDocument("matrix", params, results, warnings)
    if args.format == "csv":
        rows = [[n] + ["NA" if np.isnan(v) else float(v) for v in row] for n, row in zip(names, dm.values)]
        return doc, rows_to_csv([""] + list(names), rows)
    return doc, None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def cmd_bernoulli(args):
    t1, t2, a = _rational(args.theta1), _rational(args.theta2), _rational(args.alpha)
    try:
        m = BernoulliPairModel(t1, t2, a)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    closed = bernoulli_mu_closed(m)
    rep = mu_measure(bernoulli_subcopula(m))
    lo, hi = m.alpha_bounds
    results = {
        "mu_closed": float(closed),
        "mu_closed_exact": f"{closed.numerator}/{closed.denominator}",
        "mu_generic": float(rep.mu),
        "mu_generic_exact": f"{rep.mu.numerator}/{rep.mu.denominator}",
        "agree": closed == rep.mu,
        "pearson_r": bernoulli_pearson(m),
        "d_s": float(rep.d_s),
        "d_m": float(rep.d_m),
        "d_w": float(rep.d_w),
        "alpha_range": [float(lo), float(hi)],
    }
    params = {"theta1": str(t1), "theta2": str(t2), "alpha": str(a)}
    doc = ReportDocument("bernoulli", params, results, [])
    if args.format == "csv":
        keys = ["mu_closed", "mu_generic", "pearson_r", "d_s", "d_m", "d_w"]
        return doc, rows_to_csv(["key", "value"], [[k, results[k]] for k in keys])
    return doc, None


def cmd_clayton_curve(args):
    if args.steps < 1:
        raise InputError("--steps must be >= 1")
    if args.theta_min < -1 or args.theta_max < args.theta_min:
        raise InputError("need -1 <= theta-min <= theta-max")
    if args.quad_resolution % 2:
        raise InputError("--quad-resolution must be even")
    thetas = np.linspace(args.theta_min, args.theta_max, args.steps) if args.steps > 1 else [args.theta_min]
    rows = clayton_curve(thetas, args.resolution, args.refine_tol, args.quad_resolution)
    warnings = [f"theta={r.theta:g}: {f}" for r in rows for f in r.flags]
    results = {
        "columns": ["theta", "mu", "tau", "rho"],
        "rows": [[r.theta, r.mu, r.tau, r.rho] for r in rows],
    }
    params = {
        "theta_min": args.theta_min, "theta_max": args.theta_max, "steps": args.steps,
        "resolution": args.resolution, "refine_tol": args.refine_tol,
        "quad_resolution": args.quad_resolution,
    }
    doc = ReportDocument("clayton-curve", params, results, warnings)
    if args.format == "csv":
        return doc, rows_to_csv(results["columns"], results["rows"])
    return doc, None


def cmd_validate(args):
    if not args.input:
        raise InputError("--input is required")
    try:
        s = read_subcopula(args.input)
    except FileNotFoundError:
        raise InputError(f"no such file: {args.input}") from None
    except StructureError as exc:
        raise InputError(f"malformed subcopula: {exc}") from None
    bad = validate(s, args.tol)
    results = {
        "valid": not bad,
        "mode": "exact" if s.exact_mode else "floating",
        "shape": list(s.shape),
        "violations": [
            {
                "axiom": v.axiom,
                "cell": list(v.cell),
                "u": float(s.d1.level(v.cell[0])),
                "v": float(s.d2.level(v.cell[1])),
                "deficit": float(v.deficit),
                **({"rect": list(v.rect)} if v.rect else {}),
            }
            for v in bad
        ],
    }
    params = {"input": args.input, "tol": args.tol if not s.exact_mode else 0.0}
    doc = ReportDocument("validate", params, results, [])
    if args.format == "csv":
        rows = [[v["axiom"], v["cell"][0], v["cell"][1], v["u"], v["v"], v["deficit"]] for v in results["violations"]]
        return doc, rows_to_csv(["axiom", "i", "j", "u", "v", "deficit"], rows)
    return doc, None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None, help="recorded in the report for reproducibility")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="CSV file with a header row")
    data.add_argument("--cols", help="comma-separated column names")
    data.add_argument("--na-token", default="NA")

    numeric = argparse.ArgumentParser(add_help=False)
    numeric.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    numeric.add_argument("--refine-tol", type=float, default=DEFAULT_REFINE_TOL)

    p = argparse.ArgumentParser(prog="subdep", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"subdep {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("mu", parents=[common, data], help="mu of two columns")
    q.add_argument("--dump-subcopula", action="store_true")
    q.set_defaults(func=cmd_mu)

    q = sub.add_parser("matrix", parents=[common, data], help="pairwise mu matrix")
    q.set_defaults(func=cmd_matrix)

    q = sub.add_parser("bernoulli", parents=[common], help="closed form vs generic mu for a Bernoulli pair")
    q.add_argument("--theta1", required=True)
    q.add_argument("--theta2", required=True)
    q.add_argument("--alpha", required=True)
    q.set_defaults(func=cmd_bernoulli)

    q = sub.add_parser("clayton-curve", parents=[common, numeric], help="mu, tau, rho over the Clayton family")
    q.add_argument("--theta-min", type=float, default=-1.0)
    q.add_argument("--theta-max", type=float, default=50.0)
    q.add_argument("--steps", type=int, default=40)
    q.add_argument("--quad-resolution", type=int, default=DEFAULT_QUAD_RESOLUTION)
    q.set_defaults(func=cmd_clayton_curve)

    q = sub.add_parser("validate", parents=[common], help="check a subcopula file against the axioms")
    q.add_argument("--input", help="JSON or three-block CSV subcopula file")
    q.add_argument("--tol", type=float, default=AXIOM_TOL)
    q.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, text = args.func(args)
    except InputError as exc:
        print(f"subdep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"subdep: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for w in doc.warnings:
        print(f"subdep: warning: {w}", file=sys.stderr)
    sys.stdout.write(text if text is not None else doc.to_json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
