"""Exception types raised across the package."""


class PhotonOpsError(Exception):
    """Base class for all errors raised by photonops."""


class SingularParameter(PhotonOpsError):
    """A hypergeometric lower parameter hits a pole before the series terminates."""


class NonConvergence(PhotonOpsError):
    """A series did not meet its stopping rule within the term budget."""


class CutoffOverflow(PhotonOpsError):
    """The requested Fock cutoff exceeds the hard ceiling."""


class CutoffInadequate(PhotonOpsError):
    """The outermost retained Fock shell still contributes above tolerance."""


class NullState(PhotonOpsError):
    """The transformed operator has (numerically) vanishing trace."""


class UnsupportedBranch(PhotonOpsError):
    """A closed form is not available for this parameter region."""


class UndefinedQ(PhotonOpsError):
    """Mandel Q is undefined because the mean photon number vanishes."""
