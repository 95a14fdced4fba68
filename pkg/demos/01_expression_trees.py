# Building expression trees
#
# Statements never compute when they are built: `A + B + C` produces an
# immutable tree, and only shape checking or evaluation touches storage.

import numpy as np

from kernelplan import (
    Sign,
    Workspace,
    combine_signs,
    mat,
    render_expr,
    shape_of,
    vec,
)

# Operator sugar on leaves builds trees, exactly like the overloaded
# operators of a C++ vector class would:
A, B, C = vec("A"), vec("B"), vec("C")
tree = A + B + C
print("tree:", tree)
print("text:", render_expr(tree))

# A matrix-vector product and a scaled term:
expr = mat("M") * (A + B) - 0.5 * C
print("mixed:", render_expr(expr))

# Shapes need a workspace. Note the tree above was built with no bindings
# at all -- construction is pure syntax.
ws = Workspace()
ws.bind_vector("A", np.arange(4.0))
ws.bind_vector("B", np.ones(4))
ws.bind_vector("C", np.full(4, 2.0))
ws.bind_matrix("M", np.eye(4))
print("shape of mixed expression:", shape_of(expr, ws))

# The sign algebra drives subtraction handling during lowering. Two nested
# minuses cancel; a single minus flips:
print("\nsign combination table")
for a in Sign:
    for b in Sign:
        print(f"  {a.value} o {b.value} -> {combine_signs(a, b).value}")
