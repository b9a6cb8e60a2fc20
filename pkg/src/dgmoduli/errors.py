"""Exception types shared by the library and mapped to CLI exit codes."""


class DGModuliError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(DGModuliError):
    """Malformed input: bad shapes, non-chain maps, unknown vertices."""

    exit_code = 2


class CoefficientMismatch(ValidationError):
    """Objects over different coefficient fields were combined."""


class PreconditionError(DGModuliError):
    """A documented precondition was refused (characteristic, bounds, generator)."""

    exit_code = 3


class UnsupportedCharacteristic(PreconditionError):
    pass


class BoundExceeded(PreconditionError):
    """A search would exceed its enumeration bound."""

    def __init__(self, msg, size=None):
        super().__init__(msg)
        self.size = size


class Undetermined(DGModuliError):
    """A decision was required but the computation could not settle it."""

    exit_code = 4
