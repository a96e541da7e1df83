"""Exception hierarchy shared by the solver modules."""


class AsmopError(Exception):
    """Base class for every error raised by this package."""


class InputError(AsmopError, ValueError):
    """Malformed arguments: bad shapes, out-of-range indices, invalid labels."""


class NumericError(AsmopError, ArithmeticError):
    """An oracle produced a non-finite value."""

    def __init__(self, message, component=None, sample=None, iteration=None):
        super().__init__(message)
        self.component = component
        self.sample = sample
        self.iteration = iteration


class InvariantError(AsmopError, AssertionError):
    """An internal guarantee failed (e.g. Cauchy decrease after construction)."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class ConfigError(AsmopError, ValueError):
    """Configuration validation failed; ``problems`` lists every issue found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
