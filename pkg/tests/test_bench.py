import io

import numpy as np
import pytest

from kernelplan import bench
from kernelplan.kernels import exec_plan
from kernelplan.lower import lower, specialize
from kernelplan.parser import parse_statement


def test_default_repetition_counts():
    assert bench.workload(1).reps == 1000
    assert bench.workload(2).reps == 100000
    assert bench.workload(3).reps == 50000


def test_workload_statements_are_fixed():
    assert bench.workload(1).statements == ("x = A*y", "y = y + c*x")
    assert bench.workload(2).statements[0].count("*") == 7
    assert "log(u1)" in bench.workload(3).statements[0]


def test_workload_validation():
    with pytest.raises(ValueError):
        bench.workload(4)
    with pytest.raises(ValueError):
        bench.workload(1, size=0)
    with pytest.raises(ValueError):
        bench.workload(1, reps=0)


def test_log_inputs_stay_in_domain():
    ws = bench.make_workspace(bench.workload(3, size=512, seed=99))
    assert (ws.vectors["u1"] > 0).all()


def test_all_strategies_agree_on_each_workload():
    rows = bench.run_bench([1, 2, 3], size=48, reps=25, seed=21)
    assert len(rows) == 12
    assert bench.checksum_mismatches(rows) == []
    by_wl = {}
    for r in rows:
        by_wl.setdefault(r.workload, set()).add(r.strategy)
    assert all(len(s) == 4 for s in by_wl.values())


def test_degenerate_size_one():
    rows = bench.run_workload(bench.workload(1, size=1, reps=5, seed=2))
    assert len(rows) == 4
    assert bench.checksum_mismatches(rows) == []


def test_csv_format_and_stability():
    def rows_text(seed):
        rows = bench.run_bench([2], size=32, reps=10, seed=seed)
        buf = io.StringIO()
        bench.write_csv(rows, buf)
        return buf.getvalue().splitlines()

    a, b = rows_text(5), rows_text(5)
    assert a[0] == bench.CSV_HEADER == \
        "workload,strategy,size,reps,seconds,checksum"
    assert len(a) == 5
    strip_secs = lambda lines: [
        ",".join(f.split(",")[:4] + f.split(",")[5:]) for f in lines
    ]
    assert strip_secs(a) == strip_secs(b)
    different = rows_text(6)
    assert strip_secs(a) != strip_secs(different)


def test_naive_strategy_allocates_fresh_temporaries():
    wl = bench.workload(2, size=16, reps=1, seed=0)
    ws = bench.make_workspace(wl)
    stmt = parse_statement(wl.statements[0], ws)
    value = bench._naive_value(stmt.rhs, ws)
    assert value is not ws.vectors["y"]
    value[0] = 1e9
    assert ws.vectors["y"][0] != 1e9


def test_single_loop_matches_plan_execution():
    for test in (1, 2, 3):
        wl = bench.workload(test, size=24, reps=7, seed=4)
        base = bench.make_workspace(wl)
        stmts = [parse_statement(s, base) for s in wl.statements]
        plans = [lower(s, base) for s in stmts]

        ws_loop = base.copy()
        bench._run_single_loop(wl, stmts, ws_loop, wl.reps)
        ws_plan = base.copy()
        for _ in range(wl.reps):
            for p in plans:
                exec_plan(p, ws_plan)
        assert np.allclose(ws_loop.vectors["y"], ws_plan.vectors["y"],
                           rtol=1e-12, atol=1e-14)


def test_specialized_plans_match_reference_for_workloads():
    for test in (1, 2, 3):
        wl = bench.workload(test, size=16, reps=3, seed=13)
        base = bench.make_workspace(wl)
        stmts = [parse_statement(s, base) for s in wl.statements]
        w1, w2 = base.copy(), base.copy()
        for _ in range(wl.reps):
            for s in stmts:
                exec_plan(lower(s, base), w1)
                exec_plan(specialize(lower(s, base)), w2)
        assert np.array_equal(w1.vectors["y"], w2.vectors["y"])


def test_unknown_strategy_rejected():
    with pytest.raises(ValueError, match="unknown strategy"):
        bench.run_workload(bench.workload(1, size=4, reps=1),
                           strategies=("typo",))
