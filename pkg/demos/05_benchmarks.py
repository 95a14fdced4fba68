# The benchmark workloads
#
# Three fixed workloads compare four ways of executing the same statements:
#
#   naive                    temporaries allocated at every operator
#   oracle-loop              one fused loop per statement (JIT-compiled)
#   kernel-plan              the lowered instruction sequence
#   kernel-plan-specialized  same, after peephole fusion
#
# Checksums must agree across strategies; times are hardware-dependent and
# carry no pass/fail threshold. This demo runs a scaled-down version so it
# finishes in seconds; use the CLI for the full-size runs:
#
#   kernelplan bench --test all --size 1000 --csv results.csv

import sys

from kernelplan import bench

rows = bench.run_bench([1, 2, 3], size=256, reps=2000, seed=0,
                       log=sys.stderr)

print(f"{'workload':<9} {'strategy':<24} {'seconds':>9}  checksum")
for r in rows:
    print(f"{r.workload:<9} {r.strategy:<24} {r.seconds:>9.4f}  {r.checksum}")

mismatches = bench.checksum_mismatches(rows)
print("\nchecksum agreement:", "ok" if not mismatches else mismatches)

per_wl = {}
for r in rows:
    per_wl.setdefault(r.workload, {})[r.strategy] = r.seconds
print("\nspeed relative to the naive strategy (higher = faster):")
for wl, times in per_wl.items():
    base = times["naive"]
    ratios = ", ".join(
        f"{s}: {base / t:.2f}x" for s, t in times.items() if s != "naive"
    )
    print(f"  {wl}: {ratios}")
