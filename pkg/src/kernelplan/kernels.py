"""Reference execution backend: named dense storage plus BLAS-shaped kernels.

The kernels are numpy-vectorized but their evaluation order is pinned so
that results are bit-identical to an elementwise reference loop: axpy/scal/
map round each element exactly like ``d[i] = d[i] + alpha*s[i]`` would, and
gemv accumulates inner products left-to-right over columns (one column-axpy
per column). That pinning is what lets golden tests and the single-loop
oracle compare results exactly instead of within sloppy tolerances.

A Workspace is single-writer: :func:`exec_plan` assumes exclusive access for
its duration. Distinct workspaces may execute plans concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BindingError,
    DomainError,
    PlanError,
    ShapeError,
    UnboundNameError,
)
from .expr import (
    FuncId,
    MatrixShape,
    ScalarShape,
    Shape,
    Sign,
    VectorShape,
)
from .lower import (
    AllocTemp,
    Axpy,
    Copy,
    FreeTemp,
    Gemv,
    KernelPlan,
    Map,
    Scal,
    ScaledCopy,
    TempId,
    VAdd,
    VecRef,
    ScalarRef,
)

FUNC_TABLE = {
    FuncId.SIN: np.sin,
    FuncId.COS: np.cos,
    FuncId.LOG: np.log,
}


def apply_func(func: FuncId, x):
    """Elementwise function shared by kernels and oracle (same libm)."""
    return FUNC_TABLE[func](x)


class Workspace:
    """Named dense float64 storage: vectors, row-major matrices, scalars.

    Names are unique across the three maps. Shapes are fixed at first
    binding; rebinding with a different shape raises BindingError,
    rebinding with the same shape replaces the values.
    """

    def __init__(self):
        self.vectors: dict[str, np.ndarray] = {}
        self.matrices: dict[str, np.ndarray] = {}
        self.scalars: dict[str, float] = {}

    def _check_unique(self, name: str, target: dict) -> None:
        for pool in (self.vectors, self.matrices, self.scalars):
            if pool is not target and name in pool:
                raise BindingError(
                    f"name {name!r} is already bound with a different kind"
                )

    def bind_vector(self, name: str, values) -> np.ndarray:
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ShapeError(f"vector {name!r} must be 1-D and non-empty")
        self._check_unique(name, self.vectors)
        old = self.vectors.get(name)
        if old is not None and old.shape != arr.shape:
            raise BindingError(
                f"cannot rebind vector {name!r} from length {old.size}"
                f" to {arr.size}"
            )
        self.vectors[name] = arr
        return arr

    def bind_matrix(self, name: str, values) -> np.ndarray:
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ShapeError(f"matrix {name!r} must be 2-D and non-empty")
        self._check_unique(name, self.matrices)
        old = self.matrices.get(name)
        if old is not None and old.shape != arr.shape:
            raise BindingError(
                f"cannot rebind matrix {name!r} from {old.shape} to {arr.shape}"
            )
        self.matrices[name] = arr
        return arr

    def bind_scalar(self, name: str, value: float) -> float:
        self._check_unique(name, self.scalars)
        self.scalars[name] = float(value)
        return self.scalars[name]

    def __contains__(self, name: str) -> bool:
        return (
            name in self.vectors
            or name in self.matrices
            or name in self.scalars
        )

    def kind_of(self, name: str) -> str:
        if name in self.vectors:
            return "vector"
        if name in self.matrices:
            return "matrix"
        if name in self.scalars:
            return "scalar"
        raise UnboundNameError(f"name {name!r} is not bound")

    def shape_of_name(self, name: str) -> Shape:
        if name in self.vectors:
            return VectorShape(self.vectors[name].size)
        if name in self.matrices:
            r, c = self.matrices[name].shape
            return MatrixShape(r, c)
        if name in self.scalars:
            return ScalarShape()
        raise UnboundNameError(f"name {name!r} is not bound")

    def vector(self, name: str) -> np.ndarray:
        try:
            return self.vectors[name]
        except KeyError:
            raise UnboundNameError(f"vector {name!r} is not bound") from None

    def matrix(self, name: str) -> np.ndarray:
        try:
            return self.matrices[name]
        except KeyError:
            raise UnboundNameError(f"matrix {name!r} is not bound") from None

    def scalar(self, name: str) -> float:
        try:
            return self.scalars[name]
        except KeyError:
            raise UnboundNameError(f"scalar {name!r} is not bound") from None

    def copy(self) -> "Workspace":
        ws = Workspace()
        ws.vectors = {k: v.copy() for k, v in self.vectors.items()}
        ws.matrices = {k: v.copy() for k, v in self.matrices.items()}
        ws.scalars = dict(self.scalars)
        return ws


@dataclass
class ExecState:
    """Workspace plus the live temporaries of one plan execution."""

    workspace: Workspace
    temps: dict[TempId, np.ndarray] = field(default_factory=dict)


# --- kernels -------------------------------------------------------------------

def _check_len(dst: np.ndarray, src: np.ndarray) -> None:
    if dst.size != src.size:
        raise ShapeError(f"length mismatch: {dst.size} vs {src.size}")


def k_copy(dst: np.ndarray, src: np.ndarray) -> None:
    _check_len(dst, src)
    np.copyto(dst, src)


def k_scaledcopy(dst: np.ndarray, alpha: float, src: np.ndarray) -> None:
    _check_len(dst, src)
    np.multiply(src, alpha, out=dst)


def k_axpy(dst: np.ndarray, sign: Sign, alpha: float,
           src: np.ndarray) -> None:
    _check_len(dst, src)
    if sign is Sign.PLUS:
        dst += alpha * src
    else:
        dst -= alpha * src


def k_scal(dst: np.ndarray, alpha: float) -> None:
    dst *= alpha


def k_vadd(dst: np.ndarray, a: np.ndarray, b: np.ndarray) -> None:
    _check_len(dst, a)
    _check_len(dst, b)
    np.add(a, b, out=dst)


def matvec_product(mat: np.ndarray, src: np.ndarray) -> np.ndarray:
    """M*src with inner products accumulated left-to-right over columns."""
    rows, cols = mat.shape
    if src.size != cols:
        raise ShapeError(
            f"matrix-vector mismatch: {rows}x{cols} vs length {src.size}"
        )
    acc = np.zeros(rows)
    for j in range(cols):
        acc += mat[:, j] * src[j]
    return acc


def k_gemv(dst: np.ndarray, mode: Optional[Sign], alpha: float,
           mat: np.ndarray, src: np.ndarray) -> None:
    acc = matvec_product(mat, src)
    if dst.size != acc.size:
        raise ShapeError(f"length mismatch: {dst.size} vs {acc.size}")
    if alpha != 1.0:
        acc *= alpha
    if mode is None:
        np.copyto(dst, acc)
    elif mode is Sign.PLUS:
        dst += acc
    else:
        dst -= acc


def k_map(dst: np.ndarray, mode: Optional[Sign], func: FuncId,
          src: np.ndarray) -> None:
    _check_len(dst, src)
    if func is FuncId.LOG:
        bad = src <= 0.0
        if bad.any():
            i = int(np.argmax(bad))
            raise DomainError(
                f"log of non-positive element at index {i}: {src[i]!r}",
                index=i, value=float(src[i]),
            )
    if mode is None:
        FUNC_TABLE[func](src, out=dst)
    elif mode is Sign.PLUS:
        dst += FUNC_TABLE[func](src)
    else:
        dst -= FUNC_TABLE[func](src)


class ReferenceBackend:
    """The sequential pinned-order kernel set.

    This is the seam where a vendor-accelerated backend could plug in; the
    reference implementation is the only one shipped, and anything swapped
    in must honor the same elementwise rounding contract to keep the
    bit-exact tests meaningful.
    """

    copy = staticmethod(k_copy)
    scaledcopy = staticmethod(k_scaledcopy)
    axpy = staticmethod(k_axpy)
    scal = staticmethod(k_scal)
    vadd = staticmethod(k_vadd)
    gemv = staticmethod(k_gemv)
    map_ = staticmethod(k_map)


DEFAULT_BACKEND = ReferenceBackend()


def _resolve_vec(state: ExecState, ref: VecRef) -> np.ndarray:
    if isinstance(ref, TempId):
        try:
            return state.temps[ref]
        except KeyError:
            raise PlanError(f"temp {ref} is not live") from None
    return state.workspace.vector(ref)


def _resolve_scalar(ws: Workspace, ref: ScalarRef) -> float:
    if isinstance(ref, str):
        return ws.scalar(ref)
    return float(ref)


def exec_plan(plan: KernelPlan, ws: Workspace,
              backend: ReferenceBackend = DEFAULT_BACKEND,
              state: Optional[ExecState] = None) -> None:
    """Run a plan against a workspace, mutating it in instruction order.

    Temporaries are released on completion or error. Errors abort the plan
    without rolling back earlier instructions (documented contract: no
    shadow copies). A pre-built ``state`` may be passed for instrumentation.
    """
    if state is None:
        state = ExecState(ws)
    try:
        for ins in plan.instrs:
            if isinstance(ins, AllocTemp):
                if ins.temp in state.temps:
                    raise PlanError(f"temp {ins.temp} allocated twice")
                state.temps[ins.temp] = np.empty(ins.length)
            elif isinstance(ins, FreeTemp):
                if ins.temp not in state.temps:
                    raise PlanError(f"temp {ins.temp} freed while not live")
                del state.temps[ins.temp]
            elif isinstance(ins, Copy):
                backend.copy(_resolve_vec(state, ins.dst),
                             _resolve_vec(state, ins.src))
            elif isinstance(ins, ScaledCopy):
                backend.scaledcopy(_resolve_vec(state, ins.dst),
                                   _resolve_scalar(ws, ins.alpha),
                                   _resolve_vec(state, ins.src))
            elif isinstance(ins, Axpy):
                backend.axpy(_resolve_vec(state, ins.dst), ins.sign,
                             _resolve_scalar(ws, ins.alpha),
                             _resolve_vec(state, ins.src))
            elif isinstance(ins, Scal):
                backend.scal(_resolve_vec(state, ins.dst),
                             _resolve_scalar(ws, ins.alpha))
            elif isinstance(ins, Gemv):
                backend.gemv(_resolve_vec(state, ins.dst), ins.mode,
                             _resolve_scalar(ws, ins.alpha),
                             ws.matrix(ins.mat),
                             _resolve_vec(state, ins.src))
            elif isinstance(ins, Map):
                backend.map_(_resolve_vec(state, ins.dst), ins.mode,
                             ins.func, _resolve_vec(state, ins.src))
            elif isinstance(ins, VAdd):
                backend.vadd(_resolve_vec(state, ins.dst),
                             _resolve_vec(state, ins.a),
                             _resolve_vec(state, ins.b))
            else:  # pragma: no cover - exhaustive over Instruction
                raise PlanError(f"unknown instruction {ins!r}")
    finally:
        state.temps.clear()
