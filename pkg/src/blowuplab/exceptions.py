class BlowuplabError(Exception):
    """Base class for every error raised by blowuplab."""

    exit_code = 2


class ValidationFailure(BlowuplabError):
    """Inputs violate a parameter invariant; nothing was computed."""

    exit_code = 1


class NumericalFailure(BlowuplabError):
    """A numerical procedure failed or a verification check could not hold."""

    exit_code = 2


class DomainError(ValidationFailure, ValueError):
    pass


class Divergent(ValidationFailure, ValueError):
    """The requested integral does not converge for these parameters."""


class NonConvergence(NumericalFailure):
    pass


class SingularFit(NumericalFailure):
    pass


class NoSignChange(NumericalFailure):
    pass


class VanishingConstant(NoSignChange):
    """The function vanishes identically up to rounding, so it has no sign to change."""


class MultipleRoots(NumericalFailure):
    pass


class RegimeError(NumericalFailure):
    """No positive-scale critical point exists at leading order."""
