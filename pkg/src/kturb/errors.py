"""Exception types shared across the package."""


class KturbError(Exception):
    """Base class for all package-specific errors."""


class NonPositiveOmega(KturbError):
    """The dissipation-rate field dropped to or below the positivity floor,
    so the eddy viscosity b/omega cannot be formed."""


class PositivityViolation(KturbError):
    """A time step produced min(omega) or min(b) at or below the floor.
    Usually means the step size is too large or the data is inadmissible."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class BlowUp(KturbError):
    """A norm became NaN or infinite during time marching."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class Kappa2TooSmall(KturbError):
    """Raised where a formula requires kappa2 > 1/2."""


class InconclusiveTail(KturbError):
    """The infinite-horizon sign analysis of the existence margin could not
    be decided on the sampled range (possible for 1/2 < kappa2 < 1)."""


class VerificationFailure(KturbError):
    """A measured norm violated its analytic envelope beyond tolerance."""

    def __init__(self, message, t=None, bound=None, report=None):
        super().__init__(message)
        self.t = t
        self.bound = bound
        self.report = report


class ConfigError(KturbError):
    """Malformed or incomplete run configuration."""
