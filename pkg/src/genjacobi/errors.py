"""Exception and warning types raised across the package."""


class GenJacobiError(Exception):
    """Base class for all package errors."""


class PoleError(GenJacobiError, ValueError):
    """Argument of the gamma function sits on (or within tolerance of) a pole."""


class NoConvergence(GenJacobiError, RuntimeError):
    """An iterative solver hit its iteration cap or failed its exit check."""


class GeometryError(GenJacobiError, ValueError):
    """Invalid contour geometry (touches a branch point, bad radius, ...)."""


class BranchPointError(GenJacobiError, ValueError):
    """The weight was requested exactly at one of its branch points."""


class RefinementLimit(GenJacobiError, RuntimeError):
    """Adaptive sampling or quadrature exhausted its depth cap."""


class DivergentIntegral(GenJacobiError, ValueError):
    """The requested integrand is not integrable on the given contour."""


class IntegerParameter(GenJacobiError, ValueError):
    """alpha, beta or alpha+beta is an integer (within tolerance)."""


class KappaZero(GenJacobiError, ValueError):
    """kappa_n(alpha, beta) vanishes, the zero-count formula does not apply."""


class CapExceeded(GenJacobiError, ValueError):
    """Degree above the configured root-finding cap."""


class IllConditioned(GenJacobiError, RuntimeError):
    """Moment system too ill-conditioned to trust."""


class RegimeNotCharacterizing(GenJacobiError, ValueError):
    """The regime's conditions do not determine the polynomial."""


class ConditionViolated(GenJacobiError, ValueError):
    """Parameters violate the Riemann-Hilbert solvability condition."""


class TooCloseToContour(GenJacobiError, ValueError):
    """Evaluation point lies within the clearance distance of the contour."""


class SelfIntersectionTooClose(GenJacobiError, ValueError):
    """Jump check requested too close to a self-intersection of the contour."""


class DegreeReduction(UserWarning):
    """P_n has degree < n for these parameters (-n-alpha-beta in {1,...,n})."""
