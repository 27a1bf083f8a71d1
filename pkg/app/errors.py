"""
Exception hierarchy shared by the services, the CLI and the HTTP layer
"""
from typing import Optional


class SpectraError(Exception):
    """Base class for every error raised by the package"""


class InvalidDimensionError(SpectraError, ValueError):
    """Dimension d < 1"""


class SizeError(SpectraError, ValueError):
    """Point counts that are negative, too large, or not a perfect d-th power"""


class DomainError(SpectraError, ValueError):
    """Argument outside the domain of a closed-form expression"""


class DimensionMismatchError(SpectraError, ValueError):
    """Two point sets or points of different dimension"""


class IsolatedVertexError(SpectraError, ValueError):
    """A vertex of degree zero where a random walk step is required"""

    def __init__(self, vertex: int, message: Optional[str] = None):
        self.vertex = vertex
        super().__init__(message or f"vertex {vertex} is isolated (degree 0)")


class NotBijectiveError(SpectraError, ValueError):
    """A vertex alignment that is not a permutation"""


class DegenerateGridError(SpectraError, ValueError):
    """Step width not smaller than the approximation domain"""


class NotGridError(SpectraError, ValueError):
    """A grid-only operation received a sampled point set"""


class ConfigurationError(SpectraError, ValueError):
    """Invalid experiment or command-line configuration"""


class EmptyRecordsError(SpectraError, ValueError):
    """Nothing to export"""


class ConvergenceError(SpectraError, ArithmeticError):
    """The eigensolver exceeded its sweep cap"""


class MatchingError(SpectraError, RuntimeError):
    """No perfect matching was found where one must exist"""


class ExportError(SpectraError, OSError):
    """File output failed; the message carries the path"""

    def __init__(self, path: str, cause: Exception):
        self.path = path
        super().__init__(f"cannot write {path}: {cause}")
