"""Exception types shared across the engine."""


class LandcoreError(Exception):
    """Base class for all engine errors."""


class ValidationError(LandcoreError, ValueError):
    """Input violates a documented invariant (geometry, schema, config)."""


class PartitionError(ValidationError):
    """Input polygons do not form a clean planar partition."""


class SnappingError(PartitionError):
    """Shared boundaries disagree beyond the vertex snapping tolerance."""


class IntegrityError(LandcoreError, RuntimeError):
    """A stored structure is internally inconsistent (dangling reference,
    broken chain, edge missing from a windowed selection)."""


class TriangulationError(LandcoreError, RuntimeError):
    """Triangulation cannot proceed (degenerate input, broken cavity)."""


class NotFoundError(LandcoreError, KeyError):
    """A named feature does not resolve."""


class DataError(LandcoreError, ValueError):
    """Observation data is incomplete or inconsistent with the plan."""
