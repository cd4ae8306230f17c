"""Exception hierarchy shared by all modules."""


class UleError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(UleError, ValueError):
    """An operation was called with input violating its precondition."""


class ResourceError(UleError):
    """A configured enumeration or dimension cap would be exceeded."""


class NumericError(UleError, ArithmeticError):
    """A non-finite value appeared in an intermediate computation."""


class DegenerateLanguageError(UleError):
    """Every product of some fixed length vanishes, so growth rates are undefined."""


class InputDataError(UleError, ValueError):
    """User-supplied application data is internally inconsistent."""


class InternalConsistencyError(UleError, AssertionError):
    """A property guaranteed by the theory failed; indicates a bug."""
