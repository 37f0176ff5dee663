"""Exception hierarchy.

Everything raised on bad input derives from :class:`HadwigerError`, which is
itself a :class:`ValueError`, so callers that only care about "invalid
argument" can keep catching ``ValueError``.
"""


class HadwigerError(ValueError):
    pass


class DimensionTooSmallError(HadwigerError):
    pass


class IncompatibleDimensionsError(HadwigerError):
    pass


class InvalidIdError(HadwigerError, IndexError):
    pass


class DomainError(HadwigerError):
    pass


class DisconnectedInteriorError(DomainError):
    pass


class DisconnectedComplementError(DomainError):
    pass


class IncompleteBoundaryError(DomainError):
    pass


class BoundaryFaceError(DomainError):
    """A flip or assignment targeted a face outside the free interior."""


class UndeterminedVertexError(DomainError):
    pass


class InfeasibleBoundaryError(DomainError):
    pass


class CorruptCountsError(HadwigerError):
    pass


class NonPeierlsError(HadwigerError):
    """The requested ground set is infinite (non-Peierls transition line)."""


class NotAGroundConfigurationError(HadwigerError):
    pass


class UnknownPresetError(HadwigerError, KeyError):
    def __str__(self):  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class TooLargeError(HadwigerError):
    """Exhaustive enumeration requested above the configured face cap."""


class WrongRegionError(HadwigerError):
    pass


class CertificateFailedError(HadwigerError):
    pass


class OutOfRangeError(HadwigerError):
    pass
