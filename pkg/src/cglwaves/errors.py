"""Exception hierarchy shared by all solver modules."""


class CGLWavesError(Exception):
    """Base class for all package errors."""


class BadParameter(CGLWavesError):
    """A physical or numerical parameter violates its admissibility range."""


class GridTooCoarse(BadParameter):
    """Requested grid has too few points to be meaningful."""


class WrongDomain(CGLWavesError):
    """Operation requires the other domain kind (ball vs whole space)."""


class WrongNormalization(CGLWavesError):
    """Operation requires a specific value of the linear coefficient rho."""


class FieldGridMismatch(CGLWavesError):
    """Two fields living on different grids were combined."""


class NonConvergence(CGLWavesError):
    """Iterative solver exhausted its iteration budget."""


class NegativeSolution(CGLWavesError):
    """Newton iteration converged to a sign-changing solution."""


class SingularBorderedSystem(CGLWavesError):
    """The bordered Newton system could not be solved."""


class TargetOutsideRange(BadParameter):
    """Continuation target lies outside the admissible phase interval."""


class StepUnderflow(CGLWavesError):
    """Continuation step shrank below the minimum step size.

    Carries the partial path computed so far in ``partial_path``.
    """

    def __init__(self, message, partial_path=None):
        super().__init__(message)
        self.partial_path = partial_path


class NumericalBlowup(CGLWavesError):
    """Time integration exceeded the blowup guard.

    ``blowup_time`` records the first sample time at which the guard fired.
    """

    def __init__(self, message, blowup_time=None, summary=None):
        super().__init__(message)
        self.blowup_time = blowup_time
        self.summary = summary
