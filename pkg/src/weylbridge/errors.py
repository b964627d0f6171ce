"""Exception hierarchy shared by every module."""


class WeylBridgeError(Exception):
    """Base class for all library errors."""


class ContractViolation(WeylBridgeError, ValueError):
    """An input violated a documented precondition (wrong kind, non-unit T, ...)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ChartSyntaxError(WeylBridgeError, ValueError):
    """A chart document or expression could not be parsed."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class EvaluationDomainError(WeylBridgeError, ArithmeticError):
    """An expression was evaluated outside its domain (log of x <= 0, 1/0, ...)."""
