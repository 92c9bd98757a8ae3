"""Exception and warning types shared by all modules.

Every numerical failure derives from NumericalFailure and every input problem from
ValidationError, so the CLI can map them to exit codes 3 and 2.
"""


class DPWError(Exception):
    """Base class."""


class ValidationError(DPWError, ValueError):
    """Bad user input or parameters."""


class NumericalFailure(DPWError, ArithmeticError):
    """A numerical procedure did not reach its tolerance."""


class SingularLoop(NumericalFailure):
    pass


class SingularInput(ValidationError):
    pass


class NoConvergence(NumericalFailure):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class NotSL2(NumericalFailure):
    pass


class OutsideBigCell(NumericalFailure):
    def __init__(self, msg, cond=None):
        super().__init__(msg)
        self.cond = cond


class BadParams(ValidationError):
    pass


class NotPlusLoop(ValidationError):
    pass


class StepUnderflow(NumericalFailure):
    pass


class DetDrift(NumericalFailure):
    pass


class BadFamily(ValidationError):
    pass


class NotUnitary(NumericalFailure):
    pass


class BadGammas(ValidationError):
    pass


class ZeroQ(ValidationError):
    pass


class ProjectionPole(NumericalFailure):
    pass


class PathThroughPole(ValidationError):
    pass


class UnknownSurface(ValidationError):
    pass


class NoClosing(ValidationError):
    pass


class NotClosed(ValidationError):
    pass


class DegenerateAxis(ValidationError):
    pass


class DegenerateMetric(NumericalFailure):
    pass


class BranchPointRisk(UserWarning):
    """Upper-right entry of the lambda^-1 coefficient vanishes somewhere on the sampled domain."""
