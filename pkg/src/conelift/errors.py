"""Exception taxonomy shared across the library."""


class ConeliftError(Exception):
    """Base class for all library errors."""


class SingularMetric(ConeliftError):
    """Metric grid is not invertible / not positive definite at a point."""


class DomainError(ConeliftError):
    """Point lies outside (or too close to the boundary of) a chart domain."""


class DerivativeError(ConeliftError):
    """A differentiation request could not be carried out."""


class RankDeficient(ConeliftError):
    """Differential of an immersion drops rank at a point."""


class NotNormal(ConeliftError):
    """Section fails the normality precondition of a shape-operator call."""


class NotLegendrian(ConeliftError):
    """Entry fails the Legendrian gate of a contact-geometry check."""


class NotSphereAmbient(ConeliftError):
    """Check requires a round-sphere ambient with a flat metric cone."""


class DimensionMismatch(ConeliftError):
    """Input dimensions are inconsistent with the operation's contract."""


class DegenerateCurve(ConeliftError):
    """Discrete curve has a collapsed segment."""


class NoDescentStep(ConeliftError):
    """Backtracking line search exhausted its halving budget."""
