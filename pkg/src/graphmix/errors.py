"""Exception types raised by graphmix.

Each maps to one failure mode so callers can route them to exit codes
without string matching.
"""


class GraphmixError(Exception):
    pass


class ParseError(GraphmixError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidInputError(GraphmixError, ValueError):
    pass


class InvalidStateError(GraphmixError, RuntimeError):
    """Internal structure failed a consistency check."""


class SamplingExhaustedError(GraphmixError):
    """No candidates remain for a constrained random draw."""


class InsufficientDataError(GraphmixError):
    """A contingency table is too degenerate to fit the requested model."""


class DegenerateSeriesError(GraphmixError):
    """A series never visits one of the two states."""


class DegenerateChainError(GraphmixError):
    """The two-state chain has no mixing dynamics (frozen edge, gamma = 0)."""


class UndefinedMetricError(GraphmixError):
    """The metric does not exist for this graph (e.g. no wedges)."""


class ConvergenceError(GraphmixError):
    """Iteration budget exhausted. `estimate` holds the best value so far."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
