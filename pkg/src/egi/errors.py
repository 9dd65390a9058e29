"""Exception types raised across the package."""


class NonFiniteValueError(ValueError):
    """A series value is NaN or infinite."""

    def __init__(self, index: int, value: float):
        super().__init__(f"non-finite value {value!r} at index {index}")
        self.index = index
        self.value = value


class InputTooShortError(ValueError):
    """The series is too short for the requested window length."""


class NoInformativeRulesError(RuntimeError):
    """Every ensemble member produced an all-zero rule density curve."""
