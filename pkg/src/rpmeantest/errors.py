"""Exception types raised by rpmeantest."""


class RPMeanTestError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(RPMeanTestError, ValueError):
    pass


class DimensionMismatchError(RPMeanTestError, ValueError):
    pass


class NotPositiveDefiniteError(RPMeanTestError, ValueError):
    pass


class DegenerateVarianceError(RPMeanTestError, ValueError):
    pass


class InsufficientSamplesError(RPMeanTestError, ValueError):
    pass


class InvalidProjectionError(RPMeanTestError, ValueError):
    pass


class InvalidRatioError(RPMeanTestError, ValueError):
    pass


class SingularCovarianceError(RPMeanTestError, ValueError):
    pass


class ProjectedSingularityError(RPMeanTestError, ArithmeticError):
    """``G^T S G`` could not be factored for one of the projection draws."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"projected covariance is singular for projection draw {index}")


class UndefinedRatioError(RPMeanTestError, ZeroDivisionError):
    pass


class MomentUndefinedError(RPMeanTestError, ValueError):
    pass


class ReplicationError(RPMeanTestError):
    """Wraps an error raised inside one replication of a simulation."""

    def __init__(self, replication, role, cause):
        self.replication = replication
        self.role = role
        self.cause = cause
        super().__init__(f"replication {replication} ({role}): {cause!r}")
