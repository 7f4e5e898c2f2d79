"""Exception hierarchy for solitonlab."""


class SolitonLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParamsError(SolitonLabError, ValueError):
    pass


class DomainTooSmallError(SolitonLabError):
    """The periodic box is too short for the field's tails."""


class SupportOverflowError(DomainTooSmallError):
    """A transformed field no longer fits inside the box."""


class GridMismatchError(SolitonLabError, ValueError):
    pass


class SolverBlowupError(SolitonLabError, FloatingPointError):
    """NaN/overflow detected during time stepping."""


class TailOverflowError(SolitonLabError):
    """Field amplitude reached the box boundary during a run."""


class ExtractionError(SolitonLabError):
    """The skew-orthogonal decomposition could not be computed."""


class NoConvergenceError(ExtractionError):
    pass


class NonPositiveScalingError(ExtractionError):
    pass


class ConstraintViolationError(SolitonLabError, ValueError):
    pass


class DegenerateDataError(SolitonLabError, ValueError):
    pass


class StepSizeError(SolitonLabError, ValueError):
    pass
