"""Exception hierarchy shared by every curvegame module."""


class CurveGameError(Exception):
    """Base class for all library errors."""


class ValidationError(CurveGameError, ValueError):
    """Invalid model input. ``field`` names the offending input."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class EmptyClass(ValidationError):
    def __init__(self):
        super().__init__("class must contain at least one student", field="alpha")


class AbilityOutOfRange(ValidationError):
    def __init__(self, index, value):
        super().__init__(
            f"alpha[{index}] = {value!r} is outside the open interval (0, 1)",
            field=f"alpha[{index}]",
        )
        self.index = index
        self.value = value


class TargetOutOfRange(ValidationError):
    def __init__(self, value):
        super().__init__(
            f"target mean m = {value!r} is outside the open interval (0, 1)",
            field="m",
        )
        self.value = value


class DomainError(CurveGameError, ValueError):
    """A formula was evaluated outside the set where it is defined."""


class InternalConsistencyError(CurveGameError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class NonConvergence(CurveGameError, RuntimeError):
    """Best-response iteration hit its iteration cap."""

    def __init__(self, message, last_steps=()):
        super().__init__(message)
        self.last_steps = tuple(last_steps)


class OrderViolation(CurveGameError, RuntimeError):
    """A default-seeded extremal trajectory stopped being monotone."""
