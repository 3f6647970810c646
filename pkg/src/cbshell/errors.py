"""Exception hierarchy.

Every error raised by the package derives from :class:`ShellError` so that
callers (the CLI in particular) can map failures to exit codes.
"""


class ShellError(Exception):
    """Base class for all package errors."""


class SingularMatrix(ShellError):
    pass


class NoConvergence(ShellError):
    pass


class ParseError(ShellError):
    pass


class ValidationError(ShellError):
    pass


class DegenerateNormal(ShellError):
    pass


class InvertedElement(ShellError):
    pass


class DegenerateTangent(ShellError):
    pass


class DegenerateDirector(ShellError):
    pass


class NonPositiveThickness(ShellError):
    pass


class InvalidParameter(ValidationError):
    """Material parameter outside its admissible range."""


class DegenerateNormalStiffness(ShellError):
    pass


class NonPositiveLumpedMass(ShellError):
    pass


class NonFiniteState(ShellError):
    """Raised by the time integrator when the solution diverges."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class UnknownExperiment(ShellError):
    pass


class ShootingFailure(ShellError):
    pass


class ZeroReference(ShellError):
    pass
