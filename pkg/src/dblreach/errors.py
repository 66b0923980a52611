"""Exception types shared across the package."""


class DblError(Exception):
    """Base class for all dblreach errors."""


class VertexRangeError(DblError, IndexError):
    """A vertex id is outside the graph's current id range."""


class EdgeListFormatError(DblError, ValueError):
    """An edge-list or temporal-edge line could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ConfigError(DblError, ValueError):
    """An index configuration value is invalid for the given graph."""


class IndexGraphMismatchError(DblError):
    """Index and graph disagree on the vertex count (stale index)."""


class MissingEdgeError(DblError, KeyError):
    """delete_edge was asked to remove an edge that is not present."""


class WorkloadExhaustedError(DblError, RuntimeError):
    """A workload generator ran out of candidates (e.g. no free edge slots)."""


class NotFittedError(DblError, AttributeError):
    """The estimator was used before fit() was called."""
