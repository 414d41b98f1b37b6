"""Shared exception types."""


class GraphboError(Exception):
    """Base class for errors raised by this package."""


class InvalidVariableError(GraphboError, ValueError):
    """A sub-graph or variable declaration is malformed."""


class VertexBoundsError(GraphboError, IndexError):
    """A vertex index falls outside its variable's category range."""


class NumericError(GraphboError, RuntimeError):
    """A matrix factorization or decomposition failed beyond recovery."""


class EnumerationRefusedError(GraphboError, RuntimeError):
    """A brute-force operation was asked to enumerate too large a space."""


class SearchSpaceExhaustedError(GraphboError, RuntimeError):
    """Every vertex of the search space has already been evaluated."""


class WcnfParseError(GraphboError, ValueError):
    """Malformed DIMACS WCNF input.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
