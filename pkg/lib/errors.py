"""Exception hierarchy for the neutral FSDE toolkit.

Library code raises these; only the CLI layer turns them into messages and exit codes.
"""


class NeutralSdeError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidParameterError(NeutralSdeError, ValueError):
    """A numeric argument is outside its documented range."""


class DimensionMismatchError(NeutralSdeError, ValueError):
    """State vectors, segments or matrices disagree on the state dimension."""

    def __init__(self, expected: int, actual: int, what: str = "state") -> None:
        super().__init__(f"{what} dimension mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class GridMismatchError(NeutralSdeError, ValueError):
    """A step size, delay or horizon is not compatible with the simulation grid."""


class NonFiniteStateError(NeutralSdeError, ArithmeticError):
    """
    Raised when an integrated state becomes NaN or infinite.

    Attributes:
        step: Index of the first step whose result is non-finite
        trials: Indices (within the batch) of the offending trials

    """

    def __init__(self, step: int, trials: list[int] | None = None) -> None:
        trials = trials or []
        super().__init__(f"non-finite state at step {step} (trials: {trials[:10]})")
        self.step = step
        self.trials = trials


class InvalidModelError(NeutralSdeError, ValueError):
    """Model coefficients or hypothesis constants violate their invariants."""


class UnknownModelError(NeutralSdeError, LookupError):
    """No built-in model is registered under the requested name."""

    def __init__(self, name: str, available: list[str]) -> None:
        super().__init__(f"unknown model '{name}'. Available models: {', '.join(available)}")
        self.name = name


class SingularDiffusionError(NeutralSdeError, ValueError):
    """The diffusion matrix cannot be inverted, so no change of measure exists."""


class InvalidObservableError(NeutralSdeError, ValueError):
    """An observable is unknown or does not meet an estimator's requirements."""


class ConfigError(NeutralSdeError, ValueError):
    """An experiment file cannot be parsed or fails validation."""


class UnknownTaskError(NeutralSdeError, LookupError):
    """No estimator task is registered under the requested name."""

    def __init__(self, name: str, available: list[str]) -> None:
        super().__init__(f"unknown task '{name}'. Available tasks: {', '.join(available)}")
        self.name = name
