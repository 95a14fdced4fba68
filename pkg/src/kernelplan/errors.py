"""Exception types shared across the engine.

Everything raised on purpose derives from EngineError so callers (and the
CLI) can separate engine diagnostics from genuine bugs.
"""


class EngineError(Exception):
    """Base class for all engine-level errors."""


class KindError(EngineError):
    """An operand has the wrong kind (scalar/vector/matrix) for its position."""


class ShapeError(EngineError):
    """Shapes are inconsistent: length or dimension mismatch."""


class UnboundNameError(EngineError):
    """An identifier is not bound in the workspace."""


class BindingError(EngineError):
    """Illegal workspace binding: duplicate name or shape change on rebind."""


class DomainError(EngineError):
    """An elementwise function was applied outside its domain.

    Carries the first offending component index and its value.
    """

    def __init__(self, message: str, index: int | None = None,
                 value: float | None = None):
        super().__init__(message)
        self.index = index
        self.value = value


class PlanError(EngineError):
    """A kernel plan is malformed (temp discipline violated, bad ref, ...)."""


class ParseError(EngineError):
    """Statement text is invalid. ``pos`` is the 1-based column."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (column {pos})")
        self.pos = pos
