"""Exception types shared across the package."""


class NpikitError(Exception):
    """Base class for all package errors."""


class ComplexError(NpikitError):
    """A 2-complex or subcomplex violates a structural invariant."""


class MapError(NpikitError):
    """A combinatorial map violates its invariants."""


class PreconditionError(NpikitError):
    """An operation was called outside its stated preconditions."""


class ExponentSumError(NpikitError):
    """Some closed path has nonzero exponent sum.

    Carries the offending cycle as a tuple of signed traversals.
    """

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class BudgetExceededError(NpikitError):
    """An exhaustive search ran out of its configured budget."""


class InternalInvariantError(NpikitError):
    """An internally re-verified identity failed; indicates a bug."""
