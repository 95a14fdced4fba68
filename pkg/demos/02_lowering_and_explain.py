# Lowering statements to kernel plans
#
# A statement is decomposed into a flat sequence of BLAS-shaped calls:
# the first additive unit is assigned into the destination, every further
# unit is folded in with an axpy/gemv/map carrying the propagated sign.
# The same plans are what `kernelplan explain` prints.

import numpy as np

from kernelplan import Workspace, lower, parse_statement, specialize

ws = Workspace()
for name in ("X", "A", "B", "C", "y", "x"):
    ws.bind_vector(name, np.zeros(8))
ws.bind_matrix("M", np.zeros((8, 8)))
ws.bind_scalar("c", 0.5)


def explain(text, fuse=False):
    plan = lower(parse_statement(text, ws), ws)
    if fuse:
        plan = specialize(plan)
    print(f"\n$ {text}" + ("   [specialized]" if fuse else ""))
    print(plan.render() or "(empty plan)")


# The canonical chain: one copy, then one axpy per remaining term.
explain("X = A + B + C")

# Sign propagation: the minus distributes over the parenthesized group,
# so B enters negative and C comes back positive.
explain("X = A - (B - C)")

# Augmented assignment starts accumulating directly; no initial copy.
explain("X += A - B")

# Products cannot be applied term by term, so they get dedicated kernels:
explain("X = M*y + c*x")

# The peephole fuses copy+unit-axpy into a single vector add:
explain("X = A + B")
explain("X = A + B", fuse=True)
explain("X = A + B + C", fuse=True)
