"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class PinvUpdateError(Exception):
    """Base class for all errors raised by :mod:`pinvupdate`."""


class ShapeError(PinvUpdateError, ValueError):
    """Operands have incompatible dimensions."""


class HypothesisError(PinvUpdateError, ValueError):
    """A structural hypothesis of an update identity does not hold.

    ``hypothesis`` is a short machine-readable tag naming the violated
    condition (e.g. ``"B1 singular"``).
    """

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class PreconditionError(PinvUpdateError, ValueError):
    """An input is outside the domain of the requested identity."""


class SingularUpdateError(PinvUpdateError, ArithmeticError):
    """The updated matrix is singular, so no ordinary inverse exists."""


class ConvergenceError(PinvUpdateError, ArithmeticError):
    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class MatrixParseError(PinvUpdateError, ValueError):
    """Malformed matrix or dataset text. ``line``/``column`` are 1-based."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}" if line else message)
        self.line = line
        self.column = column
