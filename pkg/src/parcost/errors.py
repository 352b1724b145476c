"""Exception types shared across the package."""


class InstanceError(ValueError):
    """A problem instance violates a structural invariant."""


class ParameterError(ValueError):
    """A parameter is outside its documented range."""


class GuardError(RuntimeError):
    """An enumeration guard would be exceeded.

    Raised instead of silently starting a factorial-sized search. Guards are
    explicit keyword arguments on the affected solvers and can be raised by
    callers who are prepared to wait.
    """
