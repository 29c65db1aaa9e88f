"""Exception types shared across the package.

Plain ``ValueError`` is used for malformed inputs (bad parameters, bad
shapes); the classes below mark conditions callers may want to handle
separately, and the CLI maps them to distinct exit codes.
"""


class DisconnectedGraphError(ValueError):
    """Raised when an operation defined only for connected graphs gets a
    disconnected one."""


class SizeLimitError(ValueError):
    """Raised when an exact combinatorial routine is asked to exceed its
    configured size cap."""


class SamplingError(RuntimeError):
    """Rejection sampling exhausted its try budget.

    Carries the number of attempts made in ``attempts``.
    """

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge or diverged."""
