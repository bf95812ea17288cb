"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class EvaluationError(NumericalError):
    """An integrand produced a non-finite value.

    The offending abscissa is kept on ``abscissa``.
    """

    def __init__(self, message, abscissa):
        super().__init__(message)
        self.abscissa = abscissa


class ConsistencyError(RuntimeError):
    """A structural assumption about a computed object did not hold."""


class ConfigError(ValueError):
    """A run configuration is incomplete or invalid."""
