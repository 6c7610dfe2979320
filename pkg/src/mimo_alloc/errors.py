"""Exception types raised by mimo_alloc."""


class MimoAllocError(ValueError):
    """Base class for all package errors."""


class InvalidConfig(MimoAllocError):
    pass


class UnsupportedLayout(MimoAllocError):
    pass


class DegeneratePlacement(MimoAllocError):
    pass


class InvalidAntennaCount(MimoAllocError):
    pass


class ZeroSpectralEfficiency(MimoAllocError):
    pass


class OutOfBracket(MimoAllocError):
    pass


class NonFiniteObjective(MimoAllocError):
    pass


class InvalidPilot(MimoAllocError):
    pass


class IOFailure(MimoAllocError, OSError):
    pass
