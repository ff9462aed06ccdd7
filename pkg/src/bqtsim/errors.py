"""Exception hierarchy shared by every module in the package."""


class QSimError(Exception):
    """Base class for all simulator errors."""


class ArgumentError(QSimError, ValueError):
    """Malformed input: bad targets, unnormalized amplitudes, p outside [0, 1]."""


class CapacityError(QSimError):
    """The requested register exceeds the configured qubit capacity."""


class ContractError(QSimError):
    """An operator set violates the algebraic contract of the call."""


class InvalidBranchError(QSimError):
    """A measurement branch with (numerically) zero probability was requested."""


class PreconditionError(QSimError):
    """A state lies outside the subspace an operation is defined on."""
