"""Lowering of assignment statements into ordered kernel plans.

A statement ``dst op rhs`` (op one of ``=``, ``+=``, ``-=``) is decomposed
recursively: the leftmost unit of the additive chain is *assigned* into the
destination, every further unit is *applied* with an accumulated sign
obtained from :func:`kernelplan.expr.combine_signs`. Units a kernel cannot
consume directly (function arguments, product operands that are themselves
expressions) are materialized into scratch vectors first.

The result is a :class:`KernelPlan`: a flat, immutable, inspectable list of
BLAS-shaped instructions plus a table of temporaries. Plans are pure data;
execution lives in :mod:`kernelplan.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union, TYPE_CHECKING

from .errors import KindError, PlanError, ShapeError
from .expr import (
    Binary,
    BinOp,
    ExprNode,
    Func,
    FuncId,
    MatLeaf,
    ScalarLeaf,
    Sign,
    VecLeaf,
    VectorShape,
    combine_signs,
    iter_nodes,
    render_expr,
    shape_of,
    vector_length,
)

if TYPE_CHECKING:  # pragma: no cover
    from .kernels import Workspace


class Mode(Enum):
    ASSIGN = "="
    PLUS_ASSIGN = "+="
    MINUS_ASSIGN = "-="


@dataclass(frozen=True)
class Statement:
    dst: str
    mode: Mode
    rhs: ExprNode


def render_statement(stmt: Statement) -> str:
    return f"{stmt.dst} {stmt.mode.value} {render_expr(stmt.rhs)}"


@dataclass(frozen=True)
class TempId:
    index: int

    def __str__(self) -> str:
        return f"t{self.index}"


VecRef = Union[str, TempId]      # workspace vector name or temporary
ScalarRef = Union[float, str]    # literal or workspace scalar name


@dataclass(frozen=True)
class Copy:
    dst: VecRef
    src: VecRef


@dataclass(frozen=True)
class ScaledCopy:
    """dst := alpha * src"""

    dst: VecRef
    alpha: ScalarRef
    src: VecRef


@dataclass(frozen=True)
class Axpy:
    """dst := dst +/- alpha * src"""

    dst: VecRef
    sign: Sign
    alpha: ScalarRef
    src: VecRef


@dataclass(frozen=True)
class Scal:
    """dst := alpha * dst"""

    dst: VecRef
    alpha: ScalarRef


@dataclass(frozen=True)
class Gemv:
    """dst := alpha*M*src, or dst := dst +/- alpha*M*src when mode is a sign."""

    dst: VecRef
    mode: Optional[Sign]  # None = overwrite, Sign = accumulate with that sign
    alpha: ScalarRef
    mat: str
    src: VecRef


@dataclass(frozen=True)
class Map:
    """dst := f(src) elementwise, or dst := dst +/- f(src) when mode is a sign."""

    dst: VecRef
    mode: Optional[Sign]
    func: FuncId
    src: VecRef


@dataclass(frozen=True)
class VAdd:
    """Fused dst := a + b, produced only by the specializer."""

    dst: VecRef
    a: VecRef
    b: VecRef


@dataclass(frozen=True)
class AllocTemp:
    temp: TempId
    length: int


@dataclass(frozen=True)
class FreeTemp:
    temp: TempId


Instruction = Union[
    Copy, ScaledCopy, Axpy, Scal, Gemv, Map, VAdd, AllocTemp, FreeTemp
]


@dataclass(frozen=True)
class KernelPlan:
    """An ordered, immutable kernel call sequence for one statement.

    ``temps`` maps each temporary to its length, in allocation order.
    Plans are safe to share between threads and to execute repeatedly.
    """

    instrs: tuple[Instruction, ...]
    temps: dict[TempId, int]
    dst: VecRef = ""
    source_stmt: Optional[str] = None

    def render(self) -> str:
        return render_plan(self)

    def records(self) -> list[dict]:
        return plan_records(self)


class PlanBuilder:
    """Mutable accumulator the lowering recursion appends to."""

    def __init__(self):
        self.instrs: list[Instruction] = []
        self.temps: dict[TempId, int] = {}

    def emit(self, ins: Instruction) -> None:
        self.instrs.append(ins)

    def new_temp(self, length: int) -> TempId:
        t = TempId(len(self.temps))
        self.temps[t] = length
        self.emit(AllocTemp(t, length))
        return t

    def free(self, t: TempId) -> None:
        self.emit(FreeTemp(t))


class AliasDecision(Enum):
    NO_ALIAS = "no-alias"    # dst does not occur in rhs
    IN_PLACE = "in-place"    # dst is the head unit; evaluate in place
    SPILL = "spill"          # dst occurs elsewhere; route rhs via a temp


def _head_unit(e: ExprNode) -> ExprNode:
    """Leftmost unit of the top-level additive chain."""
    while isinstance(e, Binary) and e.op in (BinOp.ADD, BinOp.SUB):
        e = e.left
    return e


def alias_guard(stmt: Statement) -> AliasDecision:
    """Decide how a statement whose rhs mentions its destination is lowered.

    The destination may be consumed in place only when it is the head unit
    of the additive chain, either bare or scaled by a constant: those lower
    to elided-copy / in-place scal / same-index axpy, all of which read the
    destination component being written and nothing else. Any other
    occurrence (later term, product operand, function argument) forces the
    whole rhs through a fresh temporary.
    """
    occurrences = sum(
        1
        for n in iter_nodes(stmt.rhs)
        if isinstance(n, VecLeaf) and n.name == stmt.dst
    )
    if occurrences == 0:
        return AliasDecision.NO_ALIAS
    head = _head_unit(stmt.rhs)
    head_is_dst_leaf = isinstance(head, VecLeaf) and head.name == stmt.dst
    head_is_dst_scal = (
        isinstance(head, Binary)
        and head.op is BinOp.SCALMUL
        and isinstance(head.right, VecLeaf)
        and head.right.name == stmt.dst
    )
    if occurrences == 1 and (head_is_dst_leaf or head_is_dst_scal):
        return AliasDecision.IN_PLACE
    return AliasDecision.SPILL


_MODE_SIGN = {Mode.PLUS_ASSIGN: Sign.PLUS, Mode.MINUS_ASSIGN: Sign.MINUS}

_OP_SIGN = {BinOp.ADD: Sign.PLUS, BinOp.SUB: Sign.MINUS}


def lower(stmt: Statement, env: "Workspace") -> KernelPlan:
    """Lower a statement into a validated kernel plan.

    Deterministic: identical statements produce identical plans. The plan,
    executed on any workspace conforming to the shapes seen here, computes
    the same values as the single-loop oracle up to floating-point
    reassociation.
    """
    dst_shape = env.shape_of_name(stmt.dst)
    if not isinstance(dst_shape, VectorShape):
        raise KindError(f"destination {stmt.dst!r} is not a vector")
    rhs_shape = shape_of(stmt.rhs, env)
    if rhs_shape != dst_shape:
        raise ShapeError(
            f"cannot assign {rhs_shape} to {stmt.dst!r} of {dst_shape}"
        )

    b = PlanBuilder()
    decision = alias_guard(stmt)
    if decision is AliasDecision.SPILL:
        t = materialize(stmt.rhs, b, env)
        if stmt.mode is Mode.ASSIGN:
            b.emit(Copy(stmt.dst, t))
        else:
            b.emit(Axpy(stmt.dst, _MODE_SIGN[stmt.mode], 1.0, t))
        b.free(t)
    elif stmt.mode is Mode.ASSIGN:
        lower_assign(stmt.rhs, stmt.dst, b, env)
    else:
        lower_operate(stmt.rhs, stmt.dst, _MODE_SIGN[stmt.mode], b, env)

    plan = KernelPlan(
        instrs=tuple(b.instrs),
        temps=dict(b.temps),
        dst=stmt.dst,
        source_stmt=render_statement(stmt),
    )
    validate_plan(plan)
    return plan


def lower_assign(e: ExprNode, dst: VecRef, b: PlanBuilder,
                 env: "Workspace") -> None:
    """Emit instructions for ``dst := e``.

    When ``e`` is an additive node the left child is assigned and the right
    child applied under the node's sign; the leftmost unit therefore always
    lands with sign plus.
    """
    if isinstance(e, VecLeaf):
        if e.name != dst:
            b.emit(Copy(dst, e.name))
        # dst := dst is the sanctioned in-place head: nothing to do
        return
    if isinstance(e, Func):
        src = _operand_ref(e.arg, b, env)
        b.emit(Map(dst, None, e.func, src.ref))
        src.release()
        return
    if isinstance(e, Binary):
        if e.op in (BinOp.ADD, BinOp.SUB):
            lower_assign(e.left, dst, b, env)
            lower_operate(e.right, dst, _OP_SIGN[e.op], b, env)
            return
        if e.op is BinOp.SCALMUL:
            alpha = _alpha_of(e.left)
            if isinstance(e.right, VecLeaf) and e.right.name == dst:
                b.emit(Scal(dst, alpha))
                return
            src = _operand_ref(e.right, b, env)
            b.emit(ScaledCopy(dst, alpha, src.ref))
            src.release()
            return
        # matvec
        src = _operand_ref(e.right, b, env)
        b.emit(Gemv(dst, None, 1.0, _mat_name(e.left), src.ref))
        src.release()
        return
    raise KindError(f"cannot assign non-vector {render_expr(e)} to a vector")


def lower_operate(e: ExprNode, dst: VecRef, sign: Sign, b: PlanBuilder,
                  env: "Workspace") -> None:
    """Emit instructions for ``dst := dst +/- e`` under the given sign."""
    if isinstance(e, VecLeaf):
        b.emit(Axpy(dst, sign, 1.0, e.name))
        return
    if isinstance(e, Func):
        src = _operand_ref(e.arg, b, env)
        b.emit(Map(dst, sign, e.func, src.ref))
        src.release()
        return
    if isinstance(e, Binary):
        if e.op in (BinOp.ADD, BinOp.SUB):
            lower_operate(e.left, dst, sign, b, env)
            lower_operate(e.right, dst, combine_signs(sign, _OP_SIGN[e.op]),
                          b, env)
            return
        if e.op is BinOp.SCALMUL:
            src = _operand_ref(e.right, b, env)
            b.emit(Axpy(dst, sign, _alpha_of(e.left), src.ref))
            src.release()
            return
        src = _operand_ref(e.right, b, env)
        b.emit(Gemv(dst, sign, 1.0, _mat_name(e.left), src.ref))
        src.release()
        return
    raise KindError(f"cannot accumulate non-vector {render_expr(e)}")


def materialize(e: ExprNode, b: PlanBuilder, env: "Workspace") -> TempId:
    """Evaluate ``e`` into a fresh temporary and return its id.

    The caller frees the temporary after its last use.
    """
    t = b.new_temp(vector_length(e, env))
    lower_assign(e, t, b, env)
    return t


class _OperandRef:
    """A vector operand ref: a plain leaf read directly, or a temporary.

    Leaves are not routed through scratch storage; anything else is
    materialized and released by the caller once consumed.
    """

    def __init__(self, ref: VecRef, builder: Optional[PlanBuilder] = None):
        self.ref = ref
        self._builder = builder

    def release(self) -> None:
        if self._builder is not None:
            self._builder.free(self.ref)


def _operand_ref(e: ExprNode, b: PlanBuilder, env: "Workspace") -> _OperandRef:
    if isinstance(e, VecLeaf):
        return _OperandRef(e.name)
    return _OperandRef(materialize(e, b, env), b)


def _alpha_of(e: ExprNode) -> ScalarRef:
    if not isinstance(e, ScalarLeaf):
        raise KindError(
            f"scalar factor must be a literal or name, got {render_expr(e)}"
        )
    return e.ref


def _mat_name(e: ExprNode) -> str:
    if not isinstance(e, MatLeaf):
        raise KindError(f"matrix factor must be a name, got {render_expr(e)}")
    return e.name


# --- specialization peephole --------------------------------------------------

def specialize(plan: KernelPlan) -> KernelPlan:
    """Rewrite common adjacent pairs into fused kernels.

    Copy+unit-axpy becomes a single vector add; copy+scal becomes a scaled
    copy. Both fusions perform the identical per-element arithmetic in the
    identical order, so results are bit-identical on the reference backend.
    The pass is idempotent and never grows the plan.
    """
    instrs = plan.instrs
    out: list[Instruction] = []
    i = 0
    while i < len(instrs):
        a = instrs[i]
        nxt = instrs[i + 1] if i + 1 < len(instrs) else None
        if (
            isinstance(a, Copy)
            and isinstance(nxt, Axpy)
            and nxt.dst == a.dst
            and nxt.sign is Sign.PLUS
            and isinstance(nxt.alpha, float)
            and nxt.alpha == 1.0
            and len({a.dst, a.src, nxt.src}) == 3
        ):
            out.append(VAdd(a.dst, a.src, nxt.src))
            i += 2
            continue
        if isinstance(a, Copy) and isinstance(nxt, Scal) and nxt.dst == a.dst:
            out.append(ScaledCopy(a.dst, nxt.alpha, a.src))
            i += 2
            continue
        out.append(a)
        i += 1
    fused = KernelPlan(tuple(out), dict(plan.temps), plan.dst,
                       plan.source_stmt)
    validate_plan(fused)
    return fused


# --- validation and rendering --------------------------------------------------

def _reads_writes(ins: Instruction) -> tuple[list[VecRef], list[VecRef]]:
    """(reads, overwrites) of vector refs; read-modify-write dsts count as reads."""
    if isinstance(ins, Copy):
        return [ins.src], [ins.dst]
    if isinstance(ins, ScaledCopy):
        return [ins.src], [ins.dst]
    if isinstance(ins, Axpy):
        return [ins.src, ins.dst], [ins.dst]
    if isinstance(ins, Scal):
        return [ins.dst], [ins.dst]
    if isinstance(ins, (Gemv, Map)):
        reads = [ins.src] + ([ins.dst] if ins.mode is not None else [])
        return reads, [ins.dst]
    if isinstance(ins, VAdd):
        return [ins.a, ins.b], [ins.dst]
    return [], []


def validate_plan(plan: KernelPlan) -> None:
    """Check temp discipline: alloc before use, one free after last use,
    no read of a temp that was never written."""
    live: set[TempId] = set()
    written: set[TempId] = set()
    seen: set[TempId] = set()
    for ins in plan.instrs:
        if isinstance(ins, AllocTemp):
            if ins.temp in seen:
                raise PlanError(f"temp {ins.temp} allocated twice")
            if plan.temps.get(ins.temp) != ins.length:
                raise PlanError(f"temp {ins.temp} missing from temp table")
            live.add(ins.temp)
            seen.add(ins.temp)
            continue
        if isinstance(ins, FreeTemp):
            if ins.temp not in live:
                raise PlanError(f"temp {ins.temp} freed while not live")
            live.discard(ins.temp)
            continue
        reads, writes = _reads_writes(ins)
        for r in reads:
            if isinstance(r, TempId):
                if r not in live:
                    raise PlanError(f"temp {r} used while not live")
                if r not in written:
                    raise PlanError(f"temp {r} read before first write")
        for w in writes:
            if isinstance(w, TempId):
                if w not in live:
                    raise PlanError(f"temp {w} written while not live")
                written.add(w)
    if live:
        raise PlanError(f"temps never freed: {sorted(str(t) for t in live)}")
    if seen != set(plan.temps):
        raise PlanError("temp table does not match allocations")


def _fmt_scalar(ref: ScalarRef) -> str:
    if isinstance(ref, str):
        return ref
    if float(ref).is_integer() and abs(ref) < 1e16:
        return str(int(ref))
    return repr(ref)


def _fmt_mode(mode: Optional[Sign]) -> str:
    return "assign" if mode is None else f"acc{mode.value}"


def instruction_record(ins: Instruction) -> dict[str, str]:
    """Stable key-value serialization of one instruction."""
    if isinstance(ins, Copy):
        return {"op": "COPY", "dst": str(ins.dst), "src": str(ins.src)}
    if isinstance(ins, ScaledCopy):
        return {"op": "SCALEDCOPY", "dst": str(ins.dst),
                "alpha": _fmt_scalar(ins.alpha), "src": str(ins.src)}
    if isinstance(ins, Axpy):
        return {"op": "AXPY", "dst": str(ins.dst), "sign": ins.sign.value,
                "alpha": _fmt_scalar(ins.alpha), "src": str(ins.src)}
    if isinstance(ins, Scal):
        return {"op": "SCAL", "dst": str(ins.dst),
                "alpha": _fmt_scalar(ins.alpha)}
    if isinstance(ins, Gemv):
        return {"op": "GEMV", "dst": str(ins.dst), "mode": _fmt_mode(ins.mode),
                "alpha": _fmt_scalar(ins.alpha), "mat": ins.mat,
                "src": str(ins.src)}
    if isinstance(ins, Map):
        return {"op": "MAP", "dst": str(ins.dst), "mode": _fmt_mode(ins.mode),
                "func": ins.func.value, "src": str(ins.src)}
    if isinstance(ins, VAdd):
        return {"op": "VADD", "dst": str(ins.dst), "a": str(ins.a),
                "b": str(ins.b)}
    if isinstance(ins, AllocTemp):
        return {"op": "ALLOCTEMP", "id": str(ins.temp), "len": str(ins.length)}
    assert isinstance(ins, FreeTemp)
    return {"op": "FREETEMP", "id": str(ins.temp)}


def render_instruction(ins: Instruction) -> str:
    rec = instruction_record(ins)
    op = rec.pop("op")
    if not rec:
        return op
    return op + " " + " ".join(f"{k}={v}" for k, v in rec.items())


def render_plan(plan: KernelPlan) -> str:
    """One instruction per line, the `explain` text format."""
    return "\n".join(render_instruction(i) for i in plan.instrs)


def plan_records(plan: KernelPlan) -> list[dict]:
    return [instruction_record(i) for i in plan.instrs]
