"""Exception types shared across the package."""


class HeartQcnnError(Exception):
    """Base class for all package-specific errors."""


class InvalidInput(HeartQcnnError):
    """An argument violates a documented precondition."""


class InvalidGate(HeartQcnnError):
    """A gate is malformed or incompatible with the target register."""


class SegmentationFailed(HeartQcnnError):
    """The envelope peak picker could not find enough cardiac cycles."""


class Unsupported(HeartQcnnError):
    """The request is valid but outside what this implementation covers."""


class OptimizerFailure(HeartQcnnError):
    """The objective returned a non-finite value during optimization.

    Carries the best point seen so far, so callers can salvage a result.
    """

    def __init__(self, message, best_x=None, best_fun=None, n_evals=0):
        super().__init__(message)
        self.best_x = best_x
        self.best_fun = best_fun
        self.n_evals = n_evals
