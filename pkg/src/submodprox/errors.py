"""Exception hierarchy shared by all modules."""


class SubmodProxError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SubmodProxError, ValueError):
    """Malformed or out-of-range input."""


class CapacityError(SubmodProxError):
    """Instance too large for an exhaustive or exponential-time routine."""


class ConstructionError(SubmodProxError):
    """A network could not be built (e.g. a negative capacity would appear)."""


class UnsupportedPenaltyError(SubmodProxError):
    """The penalty is not graph-representable by any available construction."""


class ContractViolation(SubmodProxError):
    """A routine was called outside of its documented precondition."""


class NumericalError(SubmodProxError, ArithmeticError):
    """A balance equation or iterative solve failed numerically."""
