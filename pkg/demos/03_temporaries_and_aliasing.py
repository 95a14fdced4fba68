# Temporaries and aliasing
#
# Two situations force scratch vectors: an elementwise function applied to
# a whole expression (the kernel can only map over one stored vector), and
# a destination that appears in its own right-hand side anywhere except the
# leftmost position.

import numpy as np

from kernelplan import (
    Workspace,
    eval_stmt,
    exec_plan,
    lower,
    parse_statement,
)

rng = np.random.default_rng(0)
ws = Workspace()
for name in ("X", "A", "B", "C", "y", "x"):
    ws.bind_vector(name, rng.uniform(0.5, 1.5, 6))
ws.bind_scalar("c", 0.8)
ws.bind_matrix("M", rng.uniform(-1.0, 1.0, (6, 6)))


def show(text):
    plan = lower(parse_statement(text, ws), ws)
    print(f"\n$ {text}")
    print(plan.render() or "(empty plan)")
    return plan


# sin of a sum: the argument is evaluated into t0, mapped, and t0 is freed.
show("X = sin(A + B + C)")

# A leaf argument needs no temporary at all:
show("X = A + log(B)")

# Aliasing, case 1: destination leads the chain -> runs in place, the
# would-be copy of y onto itself is elided.
show("y = y + c*x")

# Aliasing, case 2: destination anywhere else -> whole rhs goes through a
# temporary, then one copy back.
show("y = c*x + y")

# Aliasing, case 3: destination inside a product is never safe in place.
show("y = M*y")

# The oracle defines what aliasing must mean: rhs reads the pre-statement
# destination. Compare both routes on the matrix case:
stmt = parse_statement("y = M*y", ws)
w_plan, w_oracle = ws.copy(), ws.copy()
exec_plan(lower(stmt, ws), w_plan)
eval_stmt(stmt, w_oracle)
print("\nplan vs oracle on y = M*y, max abs diff:",
      float(np.max(np.abs(w_plan.vectors['y'] - w_oracle.vectors['y']))))
