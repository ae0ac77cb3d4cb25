"""Exception types shared across the package."""


class ModelViolation(RuntimeError):
    """An oracle was used outside the access rules of its model."""


class RandomizedFailure(RuntimeError):
    """A randomized subroutine exhausted its collision or draw budget.

    Retryable: rerunning with a fresh random stream succeeds with high
    probability whenever the inputs satisfy the documented preconditions.
    """


class InconsistencyError(RuntimeError):
    """An internal certificate check failed; indicates a bug, not bad luck."""
