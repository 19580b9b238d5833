"""Exception types raised by the numerical routines."""


class ConeSolitonError(Exception):
    """Base class for every error raised by this package."""


class GridTooCoarse(ConeSolitonError):
    pass


class NonPositiveProfile(ConeSolitonError):
    pass


class NoTip(ConeSolitonError):
    pass


class BetaOutOfRange(ConeSolitonError, ValueError):
    pass


class NonIntegrableFactor(ConeSolitonError):
    pass


class NotEmbeddable(ConeSolitonError):
    """Raised when |h'| > 1 somewhere, so no surface of revolution exists."""

    def __init__(self, index, slope):
        self.index = int(index)
        self.slope = float(slope)
        super().__init__(f"|h'| = {abs(slope):.6g} > 1 at grid index {self.index}")


class StepUnderflow(ConeSolitonError):
    pass


class OnSeparatrix(ConeSolitonError):
    pass


class BranchMismatch(ConeSolitonError, ValueError):
    pass


class Unclassifiable(ConeSolitonError):
    def __init__(self, message, events=()):
        self.events = list(events)
        super().__init__(message)


class DegenerateTangency(ConeSolitonError, ValueError):
    pass


class ClosureResidualTooLarge(ConeSolitonError):
    pass


class ProfileCollapsed(ConeSolitonError):
    pass


class StabilityViolation(ConeSolitonError):
    pass


class NotClosed(ConeSolitonError):
    pass


class NotCritical(ConeSolitonError, ValueError):
    pass


class LeftAdmissibleRegion(ConeSolitonError):
    pass


class TailTooShort(ConeSolitonError):
    pass
