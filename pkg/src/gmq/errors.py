"""Exception hierarchy shared across the library."""


class GmqError(Exception):
    """Base class for all library errors."""


class DegenerateBasis(GmqError):
    """Cross-product basis construction received near-parallel vectors."""


class BehindCamera(GmqError):
    """Gaussian mean is behind (or grazing) the camera's near plane."""


class CameraInsideGaussian(GmqError):
    """Camera center lies inside the 1-level ellipsoid; no tangent cone exists."""


class NotAnEllipse(GmqError):
    """The projected conic is not an ellipse (degenerate or hyperbolic)."""


class DimensionMismatch(GmqError):
    """Two grids that must share a shape do not."""


class TooSmall(GmqError):
    """Image too small for a windowed metric."""


class AllProjectionsDegenerate(GmqError):
    """Every Gaussian in every image failed projection; no gradient signal."""


class ConfigInvalid(GmqError):
    """A fit configuration violates its invariants."""


class IoError(GmqError):
    """File could not be read or written."""


class UnsupportedFormat(GmqError):
    """Image file is not a format the mask loader accepts."""


class ParseError(GmqError):
    """Structured model/manifest text is malformed.

    Carries the path to the offending field when known.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class InvariantViolation(GmqError):
    """A parsed value is well-formed but violates a model invariant."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
