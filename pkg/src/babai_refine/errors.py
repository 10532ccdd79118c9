"""Exception types raised across the package."""


class BabaiRefineError(Exception):
    """Base class for all package errors."""


class InvalidParams(BabaiRefineError, ValueError):
    """Lattice parameters outside the supported region (rho >= 1, 0 < rho*cos(theta) < 1/2)."""


class OutOfCell(BabaiRefineError, ValueError):
    """A point fell outside the zero-centred Babai cell (-1/2,1/2] x (-H/2,H/2]."""


class InvalidDistribution(BabaiRefineError, ValueError):
    """Probability vector with a negative entry or mass not summing to one."""


class DegenerateInterval(BabaiRefineError, ValueError):
    """An interval of the quantizer partition has zero length (hexagonal limit)."""


class QuadratureFailure(BabaiRefineError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class BudgetTooSmall(BabaiRefineError, ValueError):
    """Rate budget below the rate of the coarsest quantizer."""
