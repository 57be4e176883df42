"""Exception types raised by the pricing routines."""


class PricingError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""


class StripViolation(PricingError):
    """A complex frequency left the strip where the Levy exponent is finite."""


class NonIntegrable(PricingError):
    """The model has no finite exponential moment E exp(Z_1)."""


class SlowDecay(PricingError):
    """A Fourier integrand did not decay enough for the quadrature grid."""


class NoRoot(PricingError):
    """The first-order condition for the optimal threshold has no sign change."""


class FlatObjective(PricingError):
    """The lower-bound objective does not vary over the search bracket."""


class BracketTooSmall(PricingError):
    """The minimiser sits on the bracket edge even after one expansion."""


class DegenerateW(PricingError):
    """Conditioning variable with non-positive variance."""


class EmptyLongLeg(PricingError):
    """Basket spread without any long asset."""


class CholeskyFailure(PricingError):
    """Correlation matrix is not positive semidefinite."""


class RouteMismatch(PricingError):
    """Two independent quadrature routes disagree beyond tolerance."""


class ValidationError(ValueError):
    """Invalid model, measure or scenario input (CLI exit code 2)."""
