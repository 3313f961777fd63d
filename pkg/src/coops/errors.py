"""Exception types raised by the engine."""


class CoopsError(Exception):
    pass


class UsageError(CoopsError, ValueError):
    """Bad arguments: mixed generator systems, violated preconditions, ..."""


class TruncationError(CoopsError):
    """A degree window reaches past the range where a structure is complete."""


class ConsistencyError(CoopsError):
    """Two independent computations of the same object disagree."""


class ExactnessError(ConsistencyError):
    pass


class WindowTooLargeError(CoopsError):
    pass
