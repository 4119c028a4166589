"""Exception types raised by mumkit.

All of them derive from ``ValueError`` so callers that only care about bad
input can catch that.
"""


class MumkitError(ValueError):
    """Base class for all mumkit errors."""


class InvalidDimensionError(MumkitError):
    pass


class InvalidOffsetError(MumkitError):
    pass


class InvalidShapeError(MumkitError):
    pass


class NormalizationError(MumkitError):
    pass


class InfeasibleParametersError(MumkitError):
    """A spectrum entry drops below the positivity bound ``-1/d``."""

    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value


class InfeasibleCompletionError(MumkitError):
    """Pair completion has a negative discriminant."""

    def __init__(self, message, discriminant):
        super().__init__(message)
        self.discriminant = discriminant


class InvalidSpectrumError(MumkitError):
    pass


class UnsupportedDimensionError(MumkitError):
    pass


class NotUnitaryError(MumkitError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotTracelessError(MumkitError):
    pass


class DegeneratePurityError(MumkitError):
    pass


class InvalidPermutationError(MumkitError):
    pass


class OrthonormalityError(MumkitError):
    pass


class InvalidStateError(MumkitError):
    pass


class IncompleteFamilyError(MumkitError):
    pass


class UnsupportedPurityError(MumkitError):
    pass


class InvalidConfigError(MumkitError):
    pass
