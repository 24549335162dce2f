"""Exception types shared across the package."""


class CutjumpError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CutjumpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(CutjumpError, ValueError):
    """An invalid configuration value (named in the message)."""


class InputError(CutjumpError, ValueError):
    """Input data is structurally unusable (too short, non-finite, ...)."""


class ParseError(CutjumpError, ValueError):
    """A coefficient file failed to parse.

    Attributes
    ----------
    line : int
        1-based line number at which parsing failed.
    """

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConvergenceError(CutjumpError, RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget.

    Carries the best available estimate so callers can decide whether the
    partial answer is still usable.

    Attributes
    ----------
    value : float
        Best estimate at the point the budget ran out.
    error_estimate : float
        Error bound attached to ``value``.
    evaluations : int
        Number of integrand evaluations performed.
    """

    def __init__(self, message, value, error_estimate, evaluations):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations
