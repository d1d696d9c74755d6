"""Exception types shared across the package."""


class RimuOptError(Exception):
    """Base class for every error raised by this package."""


class NotSymmetric(RimuOptError):
    """A matrix required to be symmetric is asymmetric beyond tolerance."""


class NotPositiveDefinite(RimuOptError):
    """A matrix required to be positive (semi)definite fails its pivot/eigenvalue check."""


class DimensionMismatch(RimuOptError):
    """Array shapes are incompatible for the requested operation."""


class SingularInformation(RimuOptError):
    """The information matrix H^T R^-1 H is (numerically) rank deficient."""


class NotOrthogonal(RimuOptError):
    """A matrix required to be orthogonal fails ||C^T C - I|| <= tolerance."""


class InvalidConfiguration(RimuOptError):
    """Sensor axes do not form a valid configuration (shape, row norms, count)."""


class UnboundedBelow(RimuOptError):
    """The polynomial has no finite minimum."""


class NonFiniteCoefficient(RimuOptError):
    """A polynomial coefficient is NaN or infinite."""


class IndexOutOfRange(RimuOptError, IndexError):
    """A coordinate index lies outside 1..3."""


class DegenerateInit(RimuOptError):
    """Random initialization failed to produce a full-rank configuration."""


class DegenerateDirection(RimuOptError):
    """A row update direction S* c_i has vanishing norm."""


class SurrogateIndefinite(RimuOptError):
    """The linearized matrix Phi(H; H_t) is not positive definite."""


class InvalidSensorCount(RimuOptError):
    """The requested reference geometry is degenerate for this sensor count."""
