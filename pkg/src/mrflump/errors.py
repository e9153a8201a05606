"""Exception hierarchy shared by all modules."""


class MrfLumpError(Exception):
    """Base class for every error raised by this package."""


class VertexError(MrfLumpError, ValueError):
    pass


class StateSpaceError(MrfLumpError):
    """Raised when a dense table would exceed the configured state-space cap."""


class NotChordalError(MrfLumpError):
    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__(f"graph is not chordal; chordless cycle {self.witness}")


class UndefinedConditionalError(MrfLumpError, ZeroDivisionError):
    """Conditioning event has probability zero."""


class NotMRFError(MrfLumpError):
    """A table is not a Markov random field on the graph an operation requires."""

    def __init__(self, message, offending=None):
        self.offending = offending
        super().__init__(message)


class IllDefinedPotentialError(MrfLumpError):
    """A lumped potential would take two different values on one lumped configuration."""


class InvariantViolation(MrfLumpError, AssertionError):
    """A proven identity failed numerically. Always a bug or a violated precondition."""
