"""Exception types shared across the toolkit."""


class ParetopolyError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(ParetopolyError):
    pass


class SolverFailure(ParetopolyError):
    pass


class EmptyRegion(ParetopolyError):
    pass


class InvalidBound(ParetopolyError):
    pass


class UnsupportedRegion(ParetopolyError):
    pass


class UnsupportedDimension(ParetopolyError):
    pass


class UnsupportedShape(ParetopolyError):
    pass


class IncompatiblePlan(ParetopolyError):
    pass


class PlanError(ParetopolyError):
    pass


class Unsupported(PlanError):
    pass


class BadStatus(ParetopolyError):
    pass


class BadGrid(ParetopolyError):
    pass


class NotContained(ParetopolyError):
    pass


class Infeasible(ParetopolyError):
    pass


class ParseError(ParetopolyError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Stalled(SolverFailure):
    """Interior-point iteration limit reached without a conclusive status."""

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution


class NumericalBreakdown(SolverFailure):
    """KKT system became singular beyond what regularization can absorb."""
