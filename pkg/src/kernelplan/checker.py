"""Randomized differential checking of lowered plans against the oracle.

For each generated statement the same initial workspace is run three ways:
single-loop oracle, lowered plan, and specialized plan. The oracle is the
reference; the two plan runs must match it within the reassociation
tolerance and must match each other bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import exec_plan
from .lower import lower, specialize
from .oracle import eval_stmt
from .randomstmt import iter_cases

REL_TOL = 1e-12  # reassociation-only error budget, double precision


def rel_err(got: np.ndarray, want: np.ndarray) -> float:
    """Max componentwise |got-want| scaled by max(1, |want|)."""
    return float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))


@dataclass
class CheckFailure:
    index: int
    statement: str
    detail: str


@dataclass
class CheckReport:
    trials: int
    max_rel_err: float = 0.0
    failures: list[CheckFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def passes(self) -> int:
        return self.trials - len(self.failures)

    def summary(self) -> str:
        return (
            f"{self.passes}/{self.trials} pass,"
            f" max rel err {self.max_rel_err:.3e}"
        )


def run_check(trials: int, max_depth: int = 6, length: int = 128,
              seed: int = 0, tol: float = REL_TOL) -> CheckReport:
    """Run the lowered-vs-oracle differential over random statements."""
    report = CheckReport(trials=trials)
    for idx, case in enumerate(iter_cases(trials, max_depth, length, seed)):
        stmt, base = case.statement, case.workspace
        text = case.text

        ws_oracle = base.copy()
        eval_stmt(stmt, ws_oracle)
        want = ws_oracle.vectors[stmt.dst]

        plan = lower(stmt, base)
        ws_plan = base.copy()
        exec_plan(plan, ws_plan)
        got = ws_plan.vectors[stmt.dst]

        fused = specialize(plan)
        ws_fused = base.copy()
        exec_plan(fused, ws_fused)
        got_fused = ws_fused.vectors[stmt.dst]

        err = rel_err(got, want)
        report.max_rel_err = max(report.max_rel_err, err)
        if err > tol:
            report.failures.append(CheckFailure(
                idx, text, f"plan vs oracle rel err {err:.3e} > {tol:.0e}"
            ))
            continue
        if not np.array_equal(got_fused, got):
            report.failures.append(CheckFailure(
                idx, text, "specialized plan is not bit-identical"
            ))
            continue
        if len(fused.instrs) > len(plan.instrs):
            report.failures.append(CheckFailure(
                idx, text, "specialization grew the plan"
            ))
    return report
