"""Exception types shared across the toolkit."""


class HelicoidError(Exception):
    """Base class for all toolkit errors."""


class InvalidSpecError(HelicoidError):
    """A segment spec violates a hard geometric invariant."""


class DegenerateGeometryError(HelicoidError):
    """Derived geometry is undefined for these parameters."""


class SchemaError(HelicoidError):
    """A design file does not match the documented JSON schema."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class SolverError(HelicoidError):
    """Static solve failed (singular or indefinite system)."""

    def __init__(self, message: str, n_zero_modes: int = 0):
        self.n_zero_modes = n_zero_modes
        super().__init__(message)


class MeshError(HelicoidError):
    """Mesh generation or export failed."""


class GeometryInfeasibleError(MeshError):
    """The requested solid would self-intersect or degenerate."""


class InfeasiblePlateError(HelicoidError):
    """Plate geometry leaves no room for compression."""


class InfeasibleConfigError(HelicoidError):
    """A configuration violates a kinematic limit."""

    def __init__(self, message: str, limit: str = ""):
        self.limit = limit
        super().__init__(message)


class NoFeasibleDesignError(HelicoidError):
    """Every candidate evaluated by the optimizer violated a hard constraint."""

    def __init__(self, message: str, nearest=None):
        self.nearest = nearest
        super().__init__(message)
