"""Exception types and non-error verdict sentinels shared across modules."""


class ImmersionKitError(Exception):
    """Base class for every error raised by this package."""


class GraphError(ImmersionKitError, ValueError):
    """Malformed graph or an operation applied outside its domain."""


class PreconditionError(ImmersionKitError, ValueError):
    """An operation was called with arguments violating its precondition."""


class InvalidCertificateError(ImmersionKitError, ValueError):
    """A certificate refers to ids that do not exist in the graphs it names."""


class InvalidDecompositionError(ImmersionKitError, ValueError):
    pass


class CapExceededError(ImmersionKitError):
    """A desk-scale enumeration cap would be exceeded."""


class BoundViolationError(ImmersionKitError, AssertionError):
    """A construction produced output outside its guaranteed bounds."""


class BudgetExceeded:
    """Sentinel returned (never raised) when a search ran out of budget."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BUDGET_EXCEEDED"


BUDGET_EXCEEDED = BudgetExceeded()
