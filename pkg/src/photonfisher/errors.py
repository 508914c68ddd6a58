"""Exception types raised by photonfisher.

All errors are recoverable conditions; library code never exits the process.
"""


class PhotonFisherError(Exception):
    """Base class for all library errors."""


class InvalidParameter(PhotonFisherError, ValueError):
    """A distribution or operation parameter is outside its valid range."""


class VacuumOverlap(InvalidParameter):
    """Small-peak inner distribution puts probability on the vacuum."""


class Infeasible(InvalidParameter):
    """Mean constraint lies outside the support interval."""


class Unsupported(PhotonFisherError):
    """No closed-form moments are available for this family."""


class NotConvergedInput(PhotonFisherError):
    """Moments were passed on without a convergence verdict."""


class NonPositiveQfi(PhotonFisherError, ValueError):
    """Cramer-Rao bound requested for a QFI that is zero or negative."""


class DivergentQfi(PhotonFisherError, ValueError):
    """Cramer-Rao bound requested for a state with infinite QFI."""


class InstanceTooLarge(PhotonFisherError, ValueError):
    """Brute-force oracle asked to search too large a support."""


class DegenerateSweep(PhotonFisherError, ValueError):
    """Scaling sweep does not cover enough points or decades of N."""


class DivergentMember(PhotonFisherError):
    """A point of a scaling sweep has divergent variance."""
