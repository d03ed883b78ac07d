class DerlieError(Exception):
    """Base class for errors raised by this package."""


class NotASubalgebraError(DerlieError):
    pass


class NotAnIdealError(DerlieError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotNilpotentError(DerlieError):
    pass


class NotContainedError(DerlieError):
    pass


class DependentError(DerlieError):
    """Input vectors were expected to be linearly independent over R."""


class GuaranteeViolation(DerlieError):
    """A step that the underlying theorem guarantees to succeed failed.

    Seeing this is a defect in the implementation, not in the input.
    """
