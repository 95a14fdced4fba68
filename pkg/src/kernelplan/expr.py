"""Expression trees for dense linear algebra statements.

An expression is an immutable tree of leaves (vectors, scalars, matrices)
and operator nodes (add, sub, scalar multiply, matrix-vector product,
elementwise functions). Building a tree never evaluates anything and never
touches a workspace; only :func:`shape_of` and the evaluators need bindings.

Also home of the two-valued sign algebra used by the lowering pass to fold
nested additions/subtractions into a single +/- per term.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union, TYPE_CHECKING

from .errors import KindError, ShapeError

if TYPE_CHECKING:  # pragma: no cover
    from .kernels import Workspace


class Sign(Enum):
    PLUS = "+"
    MINUS = "-"

    def flipped(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS


def combine_signs(a: Sign, b: Sign) -> Sign:
    """Combine two nested signs: equal signs give plus, unequal give minus.

    This is the full four-row addition rule; it makes the sign algebra a
    two-element group with PLUS as identity and every element self-inverse.
    """
    return Sign.PLUS if a is b else Sign.MINUS


class FuncId(Enum):
    SIN = "sin"
    COS = "cos"
    LOG = "log"  # strictly positive arguments at evaluation time


class BinOp(Enum):
    ADD = "+"
    SUB = "-"
    SCALMUL = "scalmul"
    MATVEC = "matvec"


class _Node:
    """Operator sugar shared by all node classes.

    ``a + b``, ``a - b``, ``2.0 * a`` and ``mat('M') * v`` build trees, they
    do not compute. Misuse raises KindError from the builders.
    """

    def __add__(self, other):
        return build_add(self, _as_node(other))

    def __sub__(self, other):
        return build_sub(self, _as_node(other))

    def __mul__(self, other):
        return _star(self, _as_node(other))

    def __rmul__(self, other):
        return _star(_as_node(other), self)


@dataclass(frozen=True)
class VecLeaf(_Node):
    name: str


@dataclass(frozen=True)
class ScalarLeaf(_Node):
    """A scalar operand: either a literal value or a workspace scalar name."""

    ref: Union[float, str]


@dataclass(frozen=True)
class MatLeaf(_Node):
    """A matrix name; only legal as the left operand of a matvec product."""

    name: str


@dataclass(frozen=True)
class Binary(_Node):
    op: BinOp
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Func(_Node):
    func: FuncId
    arg: "ExprNode"


ExprNode = Union[VecLeaf, ScalarLeaf, MatLeaf, Binary, Func]


def vec(name: str) -> VecLeaf:
    return VecLeaf(name)


def mat(name: str) -> MatLeaf:
    return MatLeaf(name)


def scl(ref: Union[float, int, str]) -> ScalarLeaf:
    return ScalarLeaf(float(ref) if isinstance(ref, (int, float)) else ref)


def _as_node(x) -> ExprNode:
    if isinstance(x, (VecLeaf, ScalarLeaf, MatLeaf, Binary, Func)):
        return x
    if isinstance(x, (int, float)):
        return ScalarLeaf(float(x))
    raise KindError(f"cannot use {x!r} as an expression operand")


def kind(e: ExprNode) -> str:
    """Static kind of an expression: 'scalar', 'vector' or 'matrix'.

    All binary and function nodes are vector-valued; only leaves can be
    scalars or matrices. Kinds are known without any workspace.
    """
    if isinstance(e, ScalarLeaf):
        return "scalar"
    if isinstance(e, MatLeaf):
        return "matrix"
    return "vector"


def render_expr(e: ExprNode) -> str:
    """Fully parenthesized text for a tree.

    Literals are emitted with repr (exact float round trip). Note the
    grammar has no unary minus, so trees holding negative literals render
    but do not re-parse; use named scalars for negative constants.
    """
    if isinstance(e, (VecLeaf, MatLeaf)):
        return e.name
    if isinstance(e, ScalarLeaf):
        return e.ref if isinstance(e.ref, str) else repr(e.ref)
    if isinstance(e, Func):
        return f"{e.func.value}({render_expr(e.arg)})"
    if e.op in (BinOp.ADD, BinOp.SUB):
        return f"({render_expr(e.left)} {e.op.value} {render_expr(e.right)})"
    return f"({render_expr(e.left)}*{render_expr(e.right)})"


def iter_nodes(e: ExprNode) -> Iterator[ExprNode]:
    """Pre-order walk over all nodes of a tree."""
    yield e
    if isinstance(e, Binary):
        yield from iter_nodes(e.left)
        yield from iter_nodes(e.right)
    elif isinstance(e, Func):
        yield from iter_nodes(e.arg)


def _require_vector(e: ExprNode, where: str) -> None:
    if kind(e) != "vector":
        raise KindError(
            f"{where} must be a vector expression, got {kind(e)}:"
            f" {render_expr(e)}"
        )


def build_add(left: ExprNode, right: ExprNode) -> Binary:
    _require_vector(left, "left operand of '+'")
    _require_vector(right, "right operand of '+'")
    return Binary(BinOp.ADD, left, right)


def build_sub(left: ExprNode, right: ExprNode) -> Binary:
    _require_vector(left, "left operand of '-'")
    _require_vector(right, "right operand of '-'")
    return Binary(BinOp.SUB, left, right)


def build_scalmul(coeff, operand: ExprNode) -> Binary:
    """Scalar times vector. The scalar is normalized to the left slot."""
    if isinstance(coeff, (int, float, str)):
        coeff = scl(coeff)
    if not isinstance(coeff, ScalarLeaf):
        raise KindError(
            f"scalar factor must be a literal or scalar name, got"
            f" {render_expr(coeff)}"
        )
    _require_vector(operand, "vector operand of scalar multiply")
    return Binary(BinOp.SCALMUL, coeff, operand)


def build_matvec(matrix, operand: ExprNode) -> Binary:
    if isinstance(matrix, str):
        matrix = MatLeaf(matrix)
    if not isinstance(matrix, MatLeaf):
        raise KindError(
            f"matrix factor must be a matrix name, got {render_expr(matrix)}"
        )
    _require_vector(operand, "vector operand of matrix-vector product")
    return Binary(BinOp.MATVEC, matrix, operand)


def build_func(func: FuncId, arg: ExprNode) -> Func:
    _require_vector(arg, f"argument of {func.value}()")
    return Func(func, arg)


def _star(left: ExprNode, right: ExprNode) -> Binary:
    kl, kr = kind(left), kind(right)
    if kl == "matrix" and kr == "vector":
        return build_matvec(left, right)
    if kl == "scalar" and kr == "vector":
        return build_scalmul(left, right)
    if kl == "vector" and kr == "scalar":
        return build_scalmul(right, left)
    if kl == "vector" and kr == "vector":
        raise KindError(
            f"cannot multiply two vectors: {render_expr(left)} *"
            f" {render_expr(right)}"
        )
    if kl == "scalar" and kr == "scalar":
        raise KindError(
            "product of two scalars is not supported; fold constants first"
        )
    raise KindError(
        f"cannot multiply {kl} {render_expr(left)} by {kr}"
        f" {render_expr(right)}"
    )


# --- shapes -----------------------------------------------------------------

@dataclass(frozen=True)
class ScalarShape:
    pass


@dataclass(frozen=True)
class VectorShape:
    length: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("vector length must be positive")


@dataclass(frozen=True)
class MatrixShape:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")


Shape = Union[ScalarShape, VectorShape, MatrixShape]


def shape_of(e: ExprNode, env: "Workspace") -> Shape:
    """Shape of ``e`` with every name resolved in ``env``.

    Deterministic and side-effect free. Raises UnboundNameError for unknown
    names, KindError when a leaf is bound with a different kind, ShapeError
    (from the combination rules) naming both shapes and the node.
    """
    if isinstance(e, VecLeaf):
        got = env.shape_of_name(e.name)
        if not isinstance(got, VectorShape):
            raise KindError(f"{e.name!r} is not bound as a vector")
        return got
    if isinstance(e, MatLeaf):
        got = env.shape_of_name(e.name)
        if not isinstance(got, MatrixShape):
            raise KindError(f"{e.name!r} is not bound as a matrix")
        return got
    if isinstance(e, ScalarLeaf):
        if isinstance(e.ref, str):
            got = env.shape_of_name(e.ref)
            if not isinstance(got, ScalarShape):
                raise KindError(f"{e.ref!r} is not bound as a scalar")
        return ScalarShape()
    if isinstance(e, Func):
        return shape_of(e.arg, env)
    if e.op in (BinOp.ADD, BinOp.SUB):
        ls = shape_of(e.left, env)
        rs = shape_of(e.right, env)
        if ls != rs:
            raise ShapeError(
                f"operands of '{e.op.value}' have different lengths"
                f" ({ls} vs {rs}) in {render_expr(e)}"
            )
        return ls
    if e.op is BinOp.SCALMUL:
        shape_of(e.left, env)  # validates a named scalar binding
        return shape_of(e.right, env)
    # matvec
    ms = shape_of(e.left, env)
    vs = shape_of(e.right, env)
    assert isinstance(ms, MatrixShape) and isinstance(vs, VectorShape)
    if ms.cols != vs.length:
        raise ShapeError(
            f"matrix-vector mismatch ({ms.rows}x{ms.cols} vs length"
            f" {vs.length}) in {render_expr(e)}"
        )
    return VectorShape(ms.rows)


def vector_length(e: ExprNode, env: "Workspace") -> int:
    s = shape_of(e, env)
    if not isinstance(s, VectorShape):
        raise KindError(f"expected a vector expression, got {render_expr(e)}")
    return s.length
