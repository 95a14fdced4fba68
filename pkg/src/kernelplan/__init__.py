"""kernelplan: a dense linear-algebra expression engine.

Statements like ``X = A + B + C`` are built (or parsed) into immutable
expression trees, lowered into an ordered plan of BLAS-style kernel calls
(copy, axpy, scal, gemv, elementwise map), optionally run through a fusion
peephole, executed on a named workspace, and verified against an
independent single-loop elementwise oracle.

The benchmarking pieces live in :mod:`kernelplan.bench` (imported lazily:
it pulls in the JIT toolchain).
"""

from .errors import (
    BindingError,
    DomainError,
    EngineError,
    KindError,
    ParseError,
    PlanError,
    ShapeError,
    UnboundNameError,
)
from .expr import (
    Binary,
    BinOp,
    ExprNode,
    Func,
    FuncId,
    MatLeaf,
    MatrixShape,
    ScalarLeaf,
    ScalarShape,
    Shape,
    Sign,
    VecLeaf,
    VectorShape,
    build_add,
    build_func,
    build_matvec,
    build_scalmul,
    build_sub,
    combine_signs,
    iter_nodes,
    kind,
    mat,
    render_expr,
    scl,
    shape_of,
    vec,
)
from .lower import (
    AliasDecision,
    AllocTemp,
    Axpy,
    Copy,
    FreeTemp,
    Gemv,
    Instruction,
    KernelPlan,
    Map,
    Mode,
    PlanBuilder,
    Scal,
    ScaledCopy,
    Statement,
    TempId,
    VAdd,
    alias_guard,
    lower,
    lower_assign,
    lower_operate,
    materialize,
    plan_records,
    render_instruction,
    render_plan,
    render_statement,
    specialize,
    validate_plan,
)
from .kernels import (
    DEFAULT_BACKEND,
    ExecState,
    ReferenceBackend,
    Workspace,
    apply_func,
    exec_plan,
    k_axpy,
    k_copy,
    k_gemv,
    k_map,
    k_scal,
    k_scaledcopy,
    k_vadd,
    matvec_product,
)
from .oracle import eval_at, eval_stmt
from .parser import Token, TokenKind, parse, parse_expr, parse_statement, tokenize
from .checker import CheckReport, rel_err, run_check
from .randomstmt import RandomCase, iter_cases, random_case

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
