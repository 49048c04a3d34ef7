"""Exception types shared across the package."""


class TruncationError(Exception):
    """Boson-space cutoff too small for the requested coherent amplitude."""


class SingularMomentMatrix(Exception):
    """CMX moment matrix is numerically singular (condition above 1e12)."""


class ZeroLinearTerm(Exception):
    """Series reversion requires a non-zero linear coefficient."""


class VanishingDenominator(Exception):
    """CSM derivative ratio has a vanishing denominator."""


class NoMinimumFound(Exception):
    """Every multi-start of the variational minimization diverged."""


class NoPhysicalSolution(Exception):
    """No acceptable stationary point near the variational optimum."""


class AmbiguousParity(Exception):
    """Eigenvector parity expectation not close to +1 or -1."""
