"""Command-line front end.

Exit codes: 0 success or no violation, 2 input error, 3 violation found,
4 reproduction check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .conditions import PositivityError, cd_kmax, cd_nmin, cde_prime_slack
from .counterexample import SearchConfig, repro_report, search_violation
from .graph import FunctionError, Graph, GraphError, format_function, parse_function, parse_graph
from .operators import gamma, gamma2, laplacian

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3
EXIT_REPRO = 4


class InputError(Exception):
    pass


def _num(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, float)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(f"{v:.12g}")
    return v


def canonical(obj):
    """Round every float to 12 significant digits, recursively."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    return _num(obj)


def dump_json(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def _fmt(v) -> str:
    v = _num(v)
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
        return buf.getvalue()
    cells = [columns] + [[_fmt(r[c]) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n" for row in cells)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_graph(path: str) -> Graph:
    try:
        return parse_graph(_read(path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_function(path: str, g: Graph):
    try:
        return parse_function(_read(path), g)
    except FunctionError as exc:
        raise InputError(f"{path}: {exc}") from None


def _vertices(g: Graph, vertex: str | None) -> tuple[str, ...]:
    if vertex is None:
        return g.vertices
    if vertex not in g:
        raise InputError(f"unknown vertex {vertex!r}")
    return (vertex,)


def _dimension(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        n = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension {text!r}") from None
    if not n > 0:
        raise argparse.ArgumentTypeError("dimension must be positive")
    return n


def cmd_ops(args, out) -> int:
    g = _load_graph(args.graph)
    f = _load_function(args.func, g)
    rows = [
        {"vertex": v, "laplacian": laplacian(g, f, v), "gamma": gamma(g, f, f, v), "gamma2": gamma2(g, f, v)}
        for v in _vertices(g, args.vertex)
    ]
    if args.format == "json":
        out.write(dump_json({"operators": rows}))
    else:
        out.write(_table(rows, ["vertex", "laplacian", "gamma", "gamma2"], args.format))
    return EXIT_OK


def cmd_cd(args, out) -> int:
    g = _load_graph(args.graph)
    rows = []
    for v in _vertices(g, args.vertex):
        nmin = cd_nmin(g, v)
        kmax = cd_kmax(g, v, args.n)
        rows.append({
            "vertex": v,
            "n_min": nmin.n_min if nmin.n_min_status == "finite" else nmin.n_min_status,
            "k_max": kmax.k_max,
            "status": nmin.n_min_status,
        })
    if args.format == "json":
        out.write(dump_json({"n": args.n, "curvature": rows}))
    else:
        out.write(_table(rows, ["vertex", "n_min", "k_max", "status"], args.format))
    return EXIT_OK


def cmd_cde_prime(args, out) -> int:
    g = _load_graph(args.graph)
    f = _load_function(args.func, g)
    try:
        reports = [cde_prime_slack(g, v, args.K, args.n, f) for v in _vertices(g, args.vertex)]
    except PositivityError as exc:
        raise InputError(f"{args.func}: {exc}") from None
    violated = any(r.applicable and r.slack < 0 for r in reports)
    if args.format == "json":
        out.write(dump_json({"reports": [r.to_dict() for r in reports], "violation": violated}))
    else:
        rows = [{"vertex": r.vertex, "slack": r.slack, "applicable": r.applicable,
                 **r.components} for r in reports]
        cols = ["vertex", "slack", "applicable", "gamma2", "gamma_correction",
                "rhs_dimension_term", "rhs_curvature_term"]
        out.write(_table(rows, cols, args.format))
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_search(args, out) -> int:
    g = _load_graph(args.graph)
    try:
        config = SearchConfig(restarts=args.restarts, max_iter=args.max_iter, seed=args.seed,
                              tolerance=args.tolerance)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    outcomes = [search_violation(g, v, args.K, args.n, config) for v in _vertices(g, args.vertex)]
    found = [o for o in outcomes if o.witness is not None]
    best = min(found, key=lambda o: o.slack) if found else None
    if args.out and best is not None:
        Path(args.out).write_text(format_function(best.witness, g), encoding="utf-8")
    if args.format == "json":
        out.write(dump_json({"outcomes": [o.to_dict(g) for o in outcomes]}))
    else:
        rows = [{"vertex": o.vertex, "slack": o.slack, "status": o.status,
                 "evaluations": o.evaluations} for o in outcomes]
        out.write(_table(rows, ["vertex", "slack", "status", "evaluations"], args.format))
    return EXIT_VIOLATION if any(o.status == "violation" for o in outcomes) else EXIT_OK


def _repro_text(rep: dict) -> str:
    lines = ["n_min per vertex:"]
    lines += [f"  {v}: {_fmt(n)}" for v, n in rep["n_min"].items()]
    lines.append(f"K_max at x for n=2: {_fmt(rep['k_max_x_n2'])}")
    lines.append("")
    lines.append("family f = (1, y, y^2), CDE'(0,2) at x:")
    lines.append(_table(rep["family_table"], ["y", "lhs", "rhs", "gap", "applicable"], "text").rstrip())
    lines.append("")
    h = rep["h_analysis"]
    lines.append(f"h(1) = {_fmt(h['h_at_1'])}, h'(1) = {_fmt(h['h_prime_at_1'])}, "
                 f"min h'' on (1, {_fmt(h['y_max'])}] = {_fmt(h['min_h_second'])}")
    q = rep["q_factorization"]
    lines.append(f"Q factorization max rel err = {_fmt(q['max_rel_err'])}, "
                 f"Q < 0 on (0, 1): {q['negative_below_1']}")
    lines.append("")
    lines += [f"[{'PASS' if ok else 'FAIL'}] {name}" for name, ok in rep["checks"].items()]
    lines.append(rep["conclusion"])
    return "\n".join(lines) + "\n"


def cmd_repro(args, out) -> int:
    rep = repro_report()
    if args.format == "json":
        out.write(dump_json(rep))
    elif args.format == "csv":
        out.write(_table(rep["family_table"], ["y", "lhs", "rhs", "gap", "applicable"], "csv"))
    else:
        out.write(_repro_text(rep))
    if not rep["passed"]:
        failed = [k for k, ok in rep["checks"].items() if not ok]
        print(f"reproduction failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_REPRO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphcd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, func=False, vertex=True):
        p.add_argument("--graph", required=True, help="edge list file")
        if func:
            p.add_argument("--func", required=True, help="vertex function file")
        if vertex:
            p.add_argument("--vertex")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("ops", help="Laplacian, Gamma and Gamma_2 per vertex")
    common(p, func=True)
    p.set_defaults(handler=cmd_ops)

    p = sub.add_parser("cd", help="exact n_min and K_max(n) per vertex")
    common(p)
    p.add_argument("--n", type=_dimension, default=2.0)
    p.set_defaults(handler=cmd_cd)

    p = sub.add_parser("cde-prime", help="CDE'(K, n) slack per vertex")
    common(p, func=True)
    p.add_argument("--K", type=float, default=0.0)
    p.add_argument("--n", type=_dimension, default=2.0)
    p.set_defaults(handler=cmd_cde_prime)

    p = sub.add_parser("search", help="search for CDE' violations")
    common(p)
    p.add_argument("--K", type=float, default=0.0)
    p.add_argument("--n", type=_dimension, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--out", help="write the best witness as a function file")
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("repro", help="reproduce the path-graph counterexample")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(handler=cmd_repro)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.handler(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
