"""Random well-shaped statements with matching workspaces.

Used by the differential checker and by the property tests. Every case is a
fresh workspace plus one statement whose shapes are guaranteed consistent:
all vectors share one length and matrices are square of that length, so any
combination type-checks.

Log arguments are drawn from a positivity-closed sub-grammar (positive
leaves combined with addition and positive scaling) so evaluation never
leaves the domain; sin/cos take arbitrary subtrees. Scalar literals are
non-negative because the surface grammar has no unary minus; negative
constants enter through named scalars, whose values cover [-2, 2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import (
    Binary,
    BinOp,
    ExprNode,
    Func,
    FuncId,
    MatLeaf,
    ScalarLeaf,
    VecLeaf,
)
from .kernels import Workspace
from .lower import Mode, Statement, render_statement

_VEC_NAMES = ("v0", "v1", "v2", "v3", "v4")
_POS_NAMES = ("p0", "p1", "p2")
_SCL_NAMES = ("s0", "s1", "s2")
_POS_SCL_NAMES = ("q0", "q1")
_MAT_NAMES = ("m0", "m1")
_DST = "acc"


@dataclass
class RandomCase:
    workspace: Workspace
    statement: Statement

    @property
    def text(self) -> str:
        return render_statement(self.statement)


def _workspace(rng: np.random.Generator, length: int) -> Workspace:
    ws = Workspace()
    for name in _VEC_NAMES + (_DST,):
        ws.bind_vector(name, rng.uniform(-2.0, 2.0, length))
    for name in _POS_NAMES:
        ws.bind_vector(name, rng.uniform(0.5, 1.5, length))
    for name in _SCL_NAMES:
        ws.bind_scalar(name, rng.uniform(-2.0, 2.0))
    for name in _POS_SCL_NAMES:
        ws.bind_scalar(name, rng.uniform(0.1, 2.0))
    for name in _MAT_NAMES:
        ws.bind_matrix(name, rng.uniform(-1.0, 1.0, (length, length)))
    return ws


def _coeff(rng: np.random.Generator) -> ScalarLeaf:
    if rng.random() < 0.5:
        return ScalarLeaf(float(round(rng.uniform(0.0, 2.0), 4)))
    return ScalarLeaf(str(rng.choice(_SCL_NAMES)))


def _pos_coeff(rng: np.random.Generator) -> ScalarLeaf:
    if rng.random() < 0.5:
        return ScalarLeaf(float(round(rng.uniform(0.1, 2.0), 4)))
    return ScalarLeaf(str(rng.choice(_POS_SCL_NAMES)))


def _vec_leaf(rng: np.random.Generator) -> VecLeaf:
    return VecLeaf(str(rng.choice(_VEC_NAMES + _POS_NAMES)))


def random_vector_expr(rng: np.random.Generator, depth: int) -> ExprNode:
    if depth <= 0 or rng.random() < 0.3:
        return _vec_leaf(rng)
    r = rng.random()
    if r < 0.30:
        return Binary(BinOp.ADD, random_vector_expr(rng, depth - 1),
                      random_vector_expr(rng, depth - 1))
    if r < 0.55:
        return Binary(BinOp.SUB, random_vector_expr(rng, depth - 1),
                      random_vector_expr(rng, depth - 1))
    if r < 0.72:
        return Binary(BinOp.SCALMUL, _coeff(rng),
                      random_vector_expr(rng, depth - 1))
    if r < 0.82:
        # Matvec operands stay shallow: the reference oracle re-derives the
        # operand per (row, column) pair, so an n x n product over a deep
        # subtree is O(n^2 * subtree) and nested products are O(n^3)+.
        # Shallow operands keep the checker fast while still covering the
        # materialization path; nested products get dedicated unit tests.
        return Binary(BinOp.MATVEC, MatLeaf(str(rng.choice(_MAT_NAMES))),
                      _matvec_operand(rng))
    func = FuncId(str(rng.choice([f.value for f in FuncId])))
    if func is FuncId.LOG:
        return Func(FuncId.LOG, _positive_expr(rng, depth - 1))
    return Func(func, random_vector_expr(rng, depth - 1))


def _matvec_operand(rng: np.random.Generator) -> ExprNode:
    r = rng.random()
    if r < 0.6:
        return _vec_leaf(rng)
    if r < 0.8:
        return Binary(BinOp.ADD if rng.random() < 0.5 else BinOp.SUB,
                      _vec_leaf(rng), _vec_leaf(rng))
    return Binary(BinOp.SCALMUL, _coeff(rng), _vec_leaf(rng))


def _positive_expr(rng: np.random.Generator, depth: int) -> ExprNode:
    """A positivity-closed expression (componentwise > 0), fit for log()."""
    if depth <= 0 or rng.random() < 0.5:
        return VecLeaf(str(rng.choice(_POS_NAMES)))
    if rng.random() < 0.6:
        return Binary(BinOp.ADD, _positive_expr(rng, depth - 1),
                      _positive_expr(rng, depth - 1))
    return Binary(BinOp.SCALMUL, _pos_coeff(rng),
                  _positive_expr(rng, depth - 1))


def random_case(rng: np.random.Generator, max_depth: int = 6,
                length: int = 128) -> RandomCase:
    """One workspace plus one statement exercising every lowering path.

    Roughly: 55% plain statements, 25% in-place destinations (bare head or
    scaled head), 20% destinations buried in the rhs (temp-rewrite path).
    Modes mix '=', '+=' and '-='.
    """
    ws = _workspace(rng, length)
    rhs = random_vector_expr(rng, max_depth - 1)
    mode = Mode(str(rng.choice(["=", "+=", "-="], p=[0.7, 0.15, 0.15])))
    shape = rng.random()
    if shape < 0.15:
        # in-place head: acc = acc + <rest>
        rhs = Binary(BinOp.ADD, VecLeaf(_DST), rhs)
    elif shape < 0.25:
        # in-place scaled head: acc = c*acc +/- <rest>, or a pure rescale
        head = Binary(BinOp.SCALMUL, _coeff(rng), VecLeaf(_DST))
        if rng.random() < 0.3:
            rhs = head
        else:
            rhs = Binary(BinOp.ADD, head, rhs)
    elif shape < 0.38:
        # destination in a later term: forces the whole-rhs temporary
        rhs = Binary(BinOp.SUB, rhs, VecLeaf(_DST))
    elif shape < 0.45:
        # destination inside a product: also forces the temporary
        rhs = Binary(
            BinOp.ADD, rhs,
            Binary(BinOp.MATVEC, MatLeaf(str(rng.choice(_MAT_NAMES))),
                   VecLeaf(_DST)),
        )
    return RandomCase(ws, Statement(_DST, mode, rhs))


def iter_cases(trials: int, max_depth: int = 6, length: int = 128,
               seed: int = 0):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        yield random_case(rng, max_depth, length)
