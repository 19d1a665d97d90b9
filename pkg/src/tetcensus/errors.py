"""Exception types shared across the package."""


class TriangulationError(Exception):
    """Base class for all structural triangulation errors."""


class NotClosed(TriangulationError):
    """Operation requires a triangulation with no open faces."""


class NotConnected(TriangulationError):
    """Operation requires a connected triangulation."""


class NotOrientable(TriangulationError):
    """Operation is only defined for orientable triangulations."""


class SelfGluingForbidden(TriangulationError):
    """Closing an edge would glue a face to itself; the branch is dead."""


class InvalidFace(TriangulationError):
    """Face does not satisfy the preconditions of a 2-3 move."""


class InvalidEdge(TriangulationError):
    """Edge does not satisfy the preconditions of a 3-2 move."""


class FlatOrNegative(TriangulationError):
    """A move would create a flat or negatively oriented tetrahedron."""


class DegenerateShape(TriangulationError):
    """Shape parameter is 0 or 1."""


class NotCTT(TriangulationError):
    """Triangulation is not a combinatorial tetrahedral tessellation."""


class GeometryError(Exception):
    """Base class for errors of the exact/certified geometry pipeline."""


class IndeterminateDivision(GeometryError):
    """Interval division with a denominator enclosure containing 0."""


class OriginInRectangle(GeometryError):
    """Complex interval argument with a rectangle containing 0."""


class PrecisionExhausted(GeometryError):
    """Interval refinement hit the precision ceiling without a decision."""


class InconsistentHolonomy(GeometryError):
    """Cusp cross-section propagation produced two lengths for one edge."""


class FieldViolation(GeometryError):
    """A quantity left the number field guaranteed by the target-area choice."""


class NotProtoCanonical(GeometryError):
    """A face tilt is positive; the triangulation is not proto-canonical."""

    def __init__(self, face, tilt=None):
        super().__init__(f"positive tilt on face class {face}")
        self.face = face
        self.tilt = tilt


class Indeterminate(GeometryError):
    """A certified inequality could not be decided at maximum precision."""


class CanonizationFailed(GeometryError):
    """Canonization did not reach a proto-canonical triangulation in budget."""

    def __init__(self, message, steps=None, retries=None):
        super().__init__(message)
        self.steps = steps
        self.retries = retries


class InconsistentCells(GeometryError):
    """Opacity data does not assemble into a valid cell decomposition."""
