"""Exception and warning classes raised by the solver."""


class StekloffError(Exception):
    """Base class for all errors raised by this package."""


class NumericalFailure(StekloffError):
    """A computation lost its accuracy guarantee (CLI exit code 1)."""


class InvalidInput(StekloffError, ValueError):
    """Inputs violate a documented precondition (CLI exit code 2)."""


# specfun
class DegreeTooLarge(InvalidInput):
    pass


class SingularArgument(InvalidInput):
    pass


class LossOfPrecision(NumericalFailure):
    pass


# surface
class DegreeOutOfRange(InvalidInput):
    pass


class ZeroModePresent(InvalidInput):
    pass


class SpectrumMismatch(InvalidInput):
    pass


class SpectrumTooSmall(InvalidInput):
    pass


# radial
class InvalidMedium(InvalidInput):
    pass


class DegenerateTrace(NumericalFailure):
    pass


class InteriorResonance(StekloffError):
    """The TE boundary value f(R) vanishes, so the mode has no finite eigenvalue."""

    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"TE interior resonance at degree l={degree}")


# stekloff
class AssumptionViolated(InvalidInput):
    def __init__(self, degrees, message=None):
        self.degrees = list(degrees)
        super().__init__(
            message or f"wavenumber is resonant for degrees {self.degrees}"
        )


class ShiftIsEigenvalue(InvalidInput):
    pass


class RankOutOfRange(InvalidInput):
    pass


# scattering
class IllPosedParameter(InvalidInput):
    pass


class NoRootInWindow(NumericalFailure):
    pass


class DegenerateMoebius(NumericalFailure):
    pass


class ResonanceWarning(UserWarning):
    """A degree was dropped from a spectrum because of an interior resonance."""


class IllPosedParameterWarning(UserWarning):
    """An auxiliary problem was evaluated with Im(lambda) < 0."""
