"""
Exception hierarchy shared by the graph, complex and homology layers
"""
from typing import Any, Dict, Optional


class MarkedGraphError(Exception):
    """Base class for every error raised by the package"""


class GraphValidationError(MarkedGraphError):
    """
    A graph record is structurally malformed (bad endpoint, self-loop, disconnected).
    Not a ValueError, so it passes through pydantic validators unwrapped.
    """

    def __init__(self, message: str, edge_index: Optional[int] = None):
        super().__init__(message)
        self.edge_index = edge_index


class InadmissibleMarkingError(MarkedGraphError, ValueError):
    """Two marked elements of a marking conflict with each other"""


class SystemMismatchError(MarkedGraphError, ValueError):
    """Two conflict systems that should correspond element by element do not"""


class UnknownDifferentialError(MarkedGraphError, ValueError):
    """Requested differential kind is not one of the supported kinds"""


class ResourceLimitError(MarkedGraphError):
    """A configured vertex or basis bound would be exceeded"""


class ComplexError(MarkedGraphError):
    """Consecutive differentials do not compose to zero"""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}
