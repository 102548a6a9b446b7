"""Exception types shared across the toolkit."""


class PufbindError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(PufbindError, ValueError):
    """An argument violates an operation's precondition."""


class CapacityError(PufbindError):
    """A size knob exceeds what the construction can carry."""


class EnrollmentError(PufbindError):
    """Enrollment could not produce a usable helper record."""


class StateError(PufbindError):
    """An operation was invoked on an object in the wrong mode."""
