"""Exception hierarchy shared by every biwalk module.

Everything raised on bad domain input derives from :class:`BiwalkError`, so
callers (the CLI in particular) can separate domain failures from bugs.
"""


class BiwalkError(Exception):
    """Base class for domain errors."""


# numkit
class NonSymmetricError(BiwalkError):
    pass


class NonHermitianError(BiwalkError):
    pass


class NoConvergenceError(BiwalkError):
    pass


# graphs
class NotBipartiteError(BiwalkError):
    pass


class DuplicateEdgeError(BiwalkError):
    pass


class IsolatedVertexError(BiwalkError):
    pass


class BadSizeError(BiwalkError):
    pass


# embeddings
class NotPrimeError(BiwalkError):
    pass


class NotPrimePowerError(BiwalkError):
    pass


class InvalidRotationError(BiwalkError):
    pass


# walk
class DisconnectedError(BiwalkError):
    pass


class SpectralMismatchError(BiwalkError):
    pass


class NotUnitError(BiwalkError):
    pass


class MismatchError(BiwalkError):
    """Two constructions that should agree do not; ``deviation`` holds the max-abs gap."""

    def __init__(self, message, deviation=float("nan")):
        super().__init__(message)
        self.deviation = deviation


# hamiltonian
class MinusOnePersistsError(BiwalkError):
    """-1 is still an eigenvalue of U**power, so no Hamiltonian of the form iS exists."""


class InternalInconsistencyError(BiwalkError):
    pass


class NotIsomorphicError(BiwalkError):
    pass


class NoGammaError(BiwalkError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


# pst
class DriftExceededError(BiwalkError):
    pass


class NotUniversalError(BiwalkError):
    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)
