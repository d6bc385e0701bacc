"""Exception hierarchy shared by the whole package."""


class AlignError(Exception):
    """Base class for every error raised by bestalign."""


class ValidationError(AlignError, ValueError):
    """Input violates a structural invariant (empty, non-finite, malformed)."""


class DimensionError(ValidationError):
    """Embedding dimensionalities do not agree."""


class LengthError(ValidationError):
    """An alignment does not have one entry per audio frame."""


class AlignmentIndexError(ValidationError, IndexError):
    """An alignment points past the end of the text sequence."""


class InstanceTooLarge(AlignError):
    """Brute-force enumeration would exceed its configured cap."""


class NonDifferentiablePoint(AlignError):
    """The frame metric has no gradient at one of the aligned pairs."""


class DegenerateBaseline(AlignError):
    """Random-pair distances have zero spread, so z-scores are undefined."""


class DivergenceDetected(AlignError):
    """Gradient descent blew the loss up past its allowed growth factor."""

    def __init__(self, step, loss, initial_loss):
        self.step = step
        self.loss = loss
        self.initial_loss = initial_loss
        super().__init__(
            f"loss {loss:.6g} at step {step} exceeds 10x the initial loss "
            f"{initial_loss:.6g}; learning rate too large"
        )
