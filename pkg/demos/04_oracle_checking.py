# Differential checking against the single-loop oracle
#
# The oracle computes every component of the right-hand side in one naive
# recursive pass -- the obviously-correct reference. The checker generates
# random well-shaped statements, runs the lowered plan (plain and
# specialized) and the oracle on identical workspaces, and compares.

from kernelplan import run_check
from kernelplan.randomstmt import iter_cases

# A taste of what the generator produces:
print("sample statements:")
for case in iter_cases(trials=8, max_depth=5, length=16, seed=12):
    print("  ", case.text)

# The differential itself. Failures would carry the offending statement;
# the worst observed error stays a couple of orders below the 1e-12 budget
# because only reassociation separates the two routes.
report = run_check(trials=400, max_depth=6, length=128, seed=12)
print("\n" + report.summary())
for failure in report.failures:
    print("  FAIL", failure.statement, failure.detail)
