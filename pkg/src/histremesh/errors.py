"""Exception types raised across the package.

Every error that the command line surfaces maps to one of these classes;
``cli`` translates them into stable one-line categories and exit codes.
"""


class HistremeshError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(HistremeshError):
    """Invalid run configuration (bad key, unparsable value, bad combination)."""


class MeshBuildError(HistremeshError):
    """Mesh connectivity or geometry rejected at construction time."""

    def __init__(self, message: str, triangle: int | None = None):
        if triangle is not None:
            message = f"{message} (triangle {triangle})"
        super().__init__(message)
        self.triangle = triangle


class NonManifoldError(MeshBuildError):
    """An edge with more than two incident triangles."""


class DegenerateElementError(HistremeshError):
    """An element too close to zero area for the requested operation."""

    def __init__(self, message: str, element: int | None = None):
        if element is not None:
            message = f"{message} (element {element})"
        super().__init__(message)
        self.element = element


class GeometryError(HistremeshError):
    """A geometric precondition does not hold (open surface, bad boundary, ...)."""


class SearchError(HistremeshError):
    """Nearest-element search could not produce a result."""


class TransferError(HistremeshError):
    """Configuration transfer failed for a node."""

    def __init__(self, message: str, node: int | None = None):
        if node is not None:
            message = f"{message} (node {node})"
        super().__init__(message)
        self.node = node


class SimulationDivergedError(HistremeshError):
    """Time integration produced non-finite positions."""

    def __init__(self, time: float, node: int):
        super().__init__(
            f"simulation diverged at t={time:.6g} (first non-finite node {node})"
        )
        self.time = time
        self.node = node


class FileFormatError(HistremeshError):
    """Mesh file could not be parsed or is inconsistent."""
