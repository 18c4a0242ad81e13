"""Command-line front end.

Exit codes: 0 success, 1 comparison not ordered, 2 bad input, 3 unbounded tail.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import jsonschema

from . import reference
from .errors import ReliabilityError, SpecError, UnboundedTail
from .lifetime import expected_T, reliability_curve
from .oracle import Query, simulate
from .orders import system_st_compare
from .orderstats import SystemSpec, os_mean
from .residual import MRLKind, mrl_curve

_DIST_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["family"],
    "oneOf": [
        {"properties": {"family": {"const": "geometric"}, "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
         "required": ["p"]},
        {"properties": {"family": {"const": "negbinomial"}, "r": {"type": "integer", "minimum": 1},
                        "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
         "required": ["r", "p"]},
        {"properties": {"family": {"const": "dweibull"}, "q": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                        "beta": {"type": "number", "exclusiveMinimum": 0}},
         "required": ["q", "beta"]},
        {"properties": {"family": {"const": "pmf"},
                        "weights": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}}},
         "required": ["weights"]},
    ],
}

SPEC_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["n", "k", "standby"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "active": {"type": "array", "items": _DIST_SCHEMA},
        "iid": _DIST_SCHEMA,
        "standby": _DIST_SCHEMA,
    },
    "oneOf": [{"required": ["active"]}, {"required": ["iid"]}],
}

ET_RESULT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["E_T", "d", "t0", "rule", "certified_error"],
    "properties": {
        "E_T": {"type": "number"},
        "d": {"type": "number", "exclusiveMinimum": 0},
        "t0": {"type": "integer", "minimum": 0},
        "rule": {"type": "string"},
        "certified_error": {"type": "number", "minimum": 0},
    },
}

SIM_RESULT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["estimate", "std_error", "n_samples", "seed"],
    "properties": {
        "estimate": {"type": "number"},
        "std_error": {"type": "number", "minimum": 0},
        "n_samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
}


class InputError(Exception):
    """Bad input file; the message is already formatted for the user."""


def fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.10g}"


def load_spec(path: str) -> SystemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        jsonschema.validate(obj, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{path}: {where}: {exc.message}") from None
    try:
        return SystemSpec.from_json(obj)
    except SpecError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write_csv(out, header: Sequence[str], rows) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def cmd_et(args, out) -> int:
    sys_spec = load_spec(args.spec)
    value, budget = expected_T(sys_spec, args.d)
    if args.json:
        result = {"E_T": value, "d": budget.d, "t0": budget.t0, "rule": budget.bound_used,
                  "certified_error": budget.certified_error}
        out.write(json.dumps(result) + "\n")
    else:
        out.write(f"E_T={value:.4f}\n")
        out.write(f"certified_error={budget.certified_error:.3g}\n")
        out.write(f"t0={budget.t0}\n")
        out.write(f"rule={budget.bound_used}\n")
    return 0


def cmd_reliability(args, out) -> int:
    sys_spec = load_spec(args.spec)
    curve = reliability_curve(sys_spec, args.t_max)
    _write_csv(out, ["t", "P_T_gt_t"], ([t, fmt(v)] for t, v in enumerate(curve)))
    return 0


def cmd_mrl(args, out) -> int:
    sys_spec = load_spec(args.spec)
    curve = mrl_curve(sys_spec, MRLKind(args.kind), range(args.t_max + 1), args.d)
    rows = []
    for p in curve.points:
        rows.append([p.t, "nan", "gap"] if p.gap else [p.t, fmt(p.value), fmt(p.certified_error)])
    _write_csv(out, ["t", "mrl", "err"], rows)
    return 0


def reproduce_table(number: int) -> tuple[list[str], list[list[Any]]]:
    layout = reference.TABLES[number]
    header = [*layout.columns, "n", "k", "E_T", "E_X", "E_T_4dp", "E_X_4dp"]
    rows = []
    for row in layout.rows():
        system = layout.system(row)
        et, _ = expected_T(system, reference.TABLE_D)
        ex = os_mean(system.active, system.k, reference.TABLE_D)
        rows.append([row[0], row[1], row[2], row[3], fmt(et), fmt(ex), f"{et:.4f}", f"{ex:.4f}"])
    return header, rows


def reproduce_figure(number: int) -> tuple[list[str], list[list[Any]]]:
    system = reference.figure_system(number)
    curves = [mrl_curve(system, kind, reference.FIGURE_TS, reference.FIGURE_D)
              for kind in (MRLKind.USUAL, MRLKind.SYSTEM, MRLKind.WORKING)]
    header = ["t", "usual", "usual_err", "system", "system_err", "working", "working_err"]
    rows = []
    for i, t in enumerate(reference.FIGURE_TS):
        row: list[Any] = [t]
        for c in curves:
            p = c.points[i]
            row += ["nan", "gap"] if p.gap else [fmt(p.value), fmt(p.certified_error)]
        rows.append(row)
    return header, rows


def cmd_reproduce(args, out) -> int:
    header, rows = reproduce_table(args.table) if args.table else reproduce_figure(args.figure)
    _write_csv(out, header, rows)
    return 0


def cmd_simulate(args, out) -> int:
    sys_spec = load_spec(args.spec)
    try:
        query = Query.parse(args.query)
    except (SpecError, ValueError) as exc:
        raise InputError(f"--query: {exc}") from None
    res = simulate(sys_spec, query, args.samples, args.seed)
    result = {"estimate": res.estimate, "std_error": res.std_error,
              "n_samples": res.n_samples, "seed": res.seed}
    if args.json:
        out.write(json.dumps(result) + "\n")
    else:
        out.write("".join(f"{k}={fmt(v) if isinstance(v, float) else v}\n" for k, v in result.items()))
    return 0


def cmd_compare(args, out) -> int:
    a, b = load_spec(args.spec_a), load_spec(args.spec_b)
    verdict = system_st_compare(a, b, args.eps)
    out.write(f"ordered={'yes' if verdict.holds else 'no'}\n")
    out.write(f"horizon={verdict.horizon}\n")
    out.write(f"residual_mass={verdict.residual_mass:.3g}\n")
    if verdict.counterexample is not None:
        out.write(f"counterexample_t={verdict.counterexample}\n")
    return 0 if verdict.holds else 1


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kofn-standby",
                                     description="k-out-of-n systems with one cold standby unit")
    parser.add_argument("--out", help="write results to FILE instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("et", help="certified expected lifetime")
    p.add_argument("--spec", required=True)
    p.add_argument("--d", type=_positive, default=1e-4)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_et)

    p = sub.add_parser("reliability", help="P(T > t) for t = 0..t_max as CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--t-max", type=int, required=True)
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("mrl", help="mean residual life curve as CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--kind", choices=["usual", "system", "working"], required=True)
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--d", type=_positive, default=1e-3)
    p.set_defaults(func=cmd_mrl)

    p = sub.add_parser("reproduce", help="benchmark tables and figure data")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--table", type=int, choices=sorted(reference.TABLES))
    group.add_argument("--figure", type=int, choices=[1, 2, 3, 4])
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("simulate", help="Monte Carlo estimate")
    p.add_argument("--spec", required=True)
    p.add_argument("--query", default="ET",
                   help="'ET' or key=value pairs, e.g. stat=sf,condition=usual,t=3,s=2")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="check T_A <=_st T_B")
    p.add_argument("--spec-a", required=True)
    p.add_argument("--spec-b", required=True)
    p.add_argument("--eps", type=_positive, default=1e-10)
    p.set_defaults(func=cmd_compare)

    # accept --out after the subcommand as well
    for action in sub.choices.values():
        action.add_argument("--out", default=argparse.SUPPRESS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    buffer = io.StringIO()
    try:
        code = args.func(args, buffer)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnboundedTail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ReliabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buffer.getvalue())
    else:
        with contextlib.suppress(BrokenPipeError):
            sys.stdout.write(buffer.getvalue())
    return code


if __name__ == "__main__":
    raise SystemExit(main())
