"""Independent single-loop evaluator used as the correctness reference.

The whole right-hand side is computed one component at a time by recursing
over the tree, the way a fused per-element loop would. This is deliberately
the dumbest correct implementation: it shares no code with the lowering
pass or the vectorized kernels (only the libm function table), so agreement
between the two routes is meaningful evidence.

Aliasing is defined here, not discovered: when the destination appears in
the right-hand side, the loop reads a snapshot taken before any component
is written. The lowering pass's alias guard is validated against exactly
these semantics.
"""

from __future__ import annotations

from types import SimpleNamespace

from .errors import DomainError, ShapeError, UnboundNameError
from .expr import (
    Binary,
    BinOp,
    ExprNode,
    Func,
    FuncId,
    MatLeaf,
    ScalarLeaf,
    VecLeaf,
    iter_nodes,
    vector_length,
)
from .kernels import FUNC_TABLE, Workspace
from .lower import Mode, Statement


def _lookup(pool: dict, name: str, what: str):
    try:
        return pool[name]
    except KeyError:
        raise UnboundNameError(f"{what} {name!r} is not bound") from None


def eval_at(e: ExprNode, i: int, env) -> float:
    """The i-th component of a vector expression.

    ``env`` is a Workspace or anything exposing .vectors/.matrices/.scalars.
    Pure: no writes, same arguments give the same value.
    """
    if isinstance(e, VecLeaf):
        v = _lookup(env.vectors, e.name, "vector")
        if not 0 <= i < v.size:
            raise IndexError(f"component {i} out of range for {e.name!r}")
        return v[i]
    if isinstance(e, ScalarLeaf):
        if isinstance(e.ref, str):
            return _lookup(env.scalars, e.ref, "scalar")
        return e.ref
    if isinstance(e, Func):
        x = eval_at(e.arg, i, env)
        if e.func is FuncId.LOG and x <= 0.0:
            raise DomainError(
                f"log of non-positive element at index {i}: {x!r}",
                index=i, value=float(x),
            )
        return FUNC_TABLE[e.func](x)
    if isinstance(e, Binary):
        if e.op is BinOp.ADD:
            return eval_at(e.left, i, env) + eval_at(e.right, i, env)
        if e.op is BinOp.SUB:
            return eval_at(e.left, i, env) - eval_at(e.right, i, env)
        if e.op is BinOp.SCALMUL:
            c = eval_at_scalar(e.left, env)
            return c * eval_at(e.right, i, env)
        # matvec: row-i inner product, columns left to right
        assert isinstance(e.left, MatLeaf)
        m = _lookup(env.matrices, e.left.name, "matrix")
        if not 0 <= i < m.shape[0]:
            raise IndexError(f"row {i} out of range for {e.left.name!r}")
        acc = 0.0
        for j in range(m.shape[1]):
            acc += m[i, j] * eval_at(e.right, j, env)
        return acc
    raise ShapeError(f"not a vector expression: {e!r}")


def eval_at_scalar(e: ExprNode, env) -> float:
    if not isinstance(e, ScalarLeaf):
        raise ShapeError(f"not a scalar operand: {e!r}")
    if isinstance(e.ref, str):
        return _lookup(env.scalars, e.ref, "scalar")
    return e.ref


def eval_stmt(stmt: Statement, env: Workspace) -> None:
    """Execute a statement with one loop over components.

    If the destination occurs in the rhs, rhs components are evaluated
    against a snapshot of the destination so aliasing is value-correct.
    """
    dst = env.vector(stmt.dst)
    n = vector_length(stmt.rhs, env)
    if n != dst.size:
        raise ShapeError(
            f"cannot assign length {n} to {stmt.dst!r} of length {dst.size}"
        )
    reads_dst = any(
        isinstance(node, VecLeaf) and node.name == stmt.dst
        for node in iter_nodes(stmt.rhs)
    )
    if reads_dst:
        read_env = SimpleNamespace(
            vectors={**env.vectors, stmt.dst: dst.copy()},
            matrices=env.matrices,
            scalars=env.scalars,
        )
    else:
        read_env = env
    if stmt.mode is Mode.ASSIGN:
        for i in range(n):
            dst[i] = eval_at(stmt.rhs, i, read_env)
    elif stmt.mode is Mode.PLUS_ASSIGN:
        for i in range(n):
            dst[i] = dst[i] + eval_at(stmt.rhs, i, read_env)
    else:
        for i in range(n):
            dst[i] = dst[i] - eval_at(stmt.rhs, i, read_env)
