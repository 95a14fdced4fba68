"""Command-line interface: explain, check, bench.

Exit codes: 0 on success, 1 when a check or cross-strategy verification
fails, 2 on usage or statement errors. The KERNELPLAN_SEED environment
variable overrides the built-in default of --seed; an explicit --seed
always wins.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

import numpy as np

from . import bench as bench_mod
from .checker import run_check
from .errors import EngineError
from .kernels import Workspace
from .lower import lower, render_plan, specialize
from .parser import FUNC_NAMES, TokenKind, parse_statement, tokenize

_MATRIX_DECL = re.compile(r"^([A-Za-z_]\w*):(\d+)x(\d+)$")
_VEC_DECL = re.compile(r"^([A-Za-z_]\w*)(?::(\d+))?$")
_SCALAR_DECL = re.compile(r"^([A-Za-z_]\w*)(?:=([^=]+))?$")


def _env_seed() -> int:
    raw = os.environ.get("KERNELPLAN_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        print(f"kernelplan: invalid KERNELPLAN_SEED {raw!r}"
              " (expected integer)", file=sys.stderr)
        raise SystemExit(2) from None


def _build_explain_workspace(args) -> Workspace:
    ws = Workspace()
    for decl in args.scalar or []:
        m = _SCALAR_DECL.match(decl)
        if not m:
            raise EngineError(f"bad --scalar declaration {decl!r}")
        ws.bind_scalar(m.group(1), float(m.group(2)) if m.group(2) else 1.0)
    for decl in args.matrix or []:
        m = _MATRIX_DECL.match(decl)
        if not m:
            raise EngineError(
                f"bad --matrix declaration {decl!r} (want NAME:RxC)"
            )
        ws.bind_matrix(m.group(1),
                       np.zeros((int(m.group(2)), int(m.group(3)))))
    for decl in args.vec or []:
        m = _VEC_DECL.match(decl)
        if not m:
            raise EngineError(f"bad --vec declaration {decl!r}")
        ws.bind_vector(m.group(1),
                       np.zeros(int(m.group(2)) if m.group(2) else args.len))
    # Any statement identifier still unknown defaults to a vector of --len.
    for tok in tokenize(args.statement):
        if (tok.kind is TokenKind.IDENT and tok.text not in ws
                and tok.text not in FUNC_NAMES):
            ws.bind_vector(tok.text, np.zeros(args.len))
    return ws


def _cmd_explain(args) -> int:
    try:
        ws = _build_explain_workspace(args)
        stmt = parse_statement(args.statement, ws)
        plan = lower(stmt, ws)
        if args.specialize:
            plan = specialize(plan)
    except EngineError as exc:
        print(f"kernelplan explain: {exc}", file=sys.stderr)
        return 2
    print(render_plan(plan))
    return 0


def _cmd_check(args) -> int:
    try:
        report = run_check(trials=args.trials, max_depth=args.max_depth,
                           length=args.len, seed=args.seed)
    except (EngineError, ValueError) as exc:
        print(f"kernelplan check: {exc}", file=sys.stderr)
        return 2
    print(report.summary())
    if report.ok:
        return 0
    for f in report.failures[:20]:
        print(f"FAIL [{f.index}] {f.statement}: {f.detail}", file=sys.stderr)
    if len(report.failures) > 20:
        print(f"... {len(report.failures) - 20} more", file=sys.stderr)
    return 1


def _cmd_bench(args) -> int:
    tests = [1, 2, 3] if args.test == "all" else [int(args.test)]
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    try:
        rows = bench_mod.run_bench(tests, size=args.size, reps=args.reps,
                                   seed=args.seed, strategies=strategies,
                                   log=sys.stderr)
    except ValueError as exc:
        print(f"kernelplan bench: {exc}", file=sys.stderr)
        return 2
    if args.csv == "-":
        bench_mod.write_csv(rows, sys.stdout)
    else:
        with open(args.csv, "w", encoding="utf-8") as fh:
            bench_mod.write_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {args.csv}", file=sys.stderr)
    problems = bench_mod.checksum_mismatches(rows)
    for p in problems:
        print(f"checksum mismatch: {p}", file=sys.stderr)
    return 1 if problems else 0


def _make_parser(default_seed: int) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kernelplan",
        description="Lower linear-algebra statements to kernel plans,"
                    " check them against an elementwise oracle, and run"
                    " the benchmark workloads.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="print the kernel plan of a statement")
    p.add_argument("statement", help="e.g. 'y = y + c1*u1 - cos(c2*u2 + u3)'")
    p.add_argument("--specialize", action="store_true",
                   help="apply the fusion peephole before printing")
    p.add_argument("--vec", action="append", metavar="NAME[:LEN]",
                   help="declare a vector (repeatable)")
    p.add_argument("--matrix", action="append", metavar="NAME:RxC",
                   help="declare a matrix (repeatable)")
    p.add_argument("--scalar", action="append", metavar="NAME[=VAL]",
                   help="declare a scalar (repeatable)")
    p.add_argument("--len", type=int, default=8,
                   help="length of auto-declared vectors (default 8)")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("check",
                       help="randomized lowered-plan vs oracle differential")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--len", type=int, default=128)
    p.add_argument("--seed", type=int, default=default_seed)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("bench", help="run the performance workloads")
    p.add_argument("--test", choices=["1", "2", "3", "all"], default="all")
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--reps", type=int, default=None,
                   help="override the per-test default repetition count")
    p.add_argument("--strategies", default=",".join(bench_mod.STRATEGIES))
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--csv", default="-", metavar="PATH",
                   help="CSV output path ('-' for stdout)")
    p.set_defaults(func=_cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = _make_parser(_env_seed())
    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
