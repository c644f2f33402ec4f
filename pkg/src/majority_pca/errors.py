"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A parameter, configuration or shape violates its contract."""


class BudgetError(ValueError):
    """An exact enumeration was asked to exceed its size budget."""


class PreconditionError(ValueError):
    """An inequality required by a bound does not hold."""


class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""
