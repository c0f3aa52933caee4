"""Exception hierarchy shared by every module."""


class ConjTensorError(Exception):
    """Base class for all library errors."""


class DimensionError(ConjTensorError, ValueError):
    """Shapes or vector lengths do not match."""


class ArgumentError(ConjTensorError, ValueError):
    """An argument is out of its admissible range."""


class StructureError(ConjTensorError, ValueError):
    """A tensor or polynomial lacks the structure an operation requires."""


class ParseError(ConjTensorError, ValueError):
    """Polynomial text does not conform to the grammar."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConvergenceError(ConjTensorError, RuntimeError):
    """No start of an iterative solver reached its tolerance."""

    def __init__(self, message, best_residual=float("inf")):
        super().__init__(f"{message}; best residual {best_residual:.3e}")
        self.best_residual = best_residual


class RelationError(ConjTensorError, RuntimeError):
    """A verified relation between two eigenvalue notions failed."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class InternalError(ConjTensorError, RuntimeError):
    """An internal invariant broke; indicates an upstream structure violation."""


class DegenerateRecovery(ConjTensorError, RuntimeError):
    """The recovery vector of the Hermitian equivalence is undefined."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
