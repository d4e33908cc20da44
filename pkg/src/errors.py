from typing import Any


class PlbecError(Exception): ...


class ConfigError(PlbecError, ValueError): ...


class DomainError(PlbecError, ValueError): ...


class DivergenceError(PlbecError, ArithmeticError): ...


class RegularizationRequiredError(DivergenceError): ...


class ConvergenceError(PlbecError, ArithmeticError):
    """
    A bracketed solve could not find a sign change or did not converge.

    ``diagnostic`` holds whatever the solver knew at the point of failure (bracket ends, function
    values), so the CLI can print something more useful than "no root".
    """

    def __init__(self, message: str, diagnostic: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}

    def __str__(self) -> str:
        if not self.diagnostic:
            return super().__str__()
        details = ', '.join(
            f'{key}={value:.6g}' if isinstance(value, float) else f'{key}={value}'
            for key, value in self.diagnostic.items()
        )
        return f'{super().__str__()} ({details})'


class AccuracyError(PlbecError, ArithmeticError):
    """Requested tolerance was not met. Carries the best estimate and its error."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error

    def __str__(self) -> str:
        return f'{super().__str__()} (estimate={self.estimate:.6g}, error={self.error:.3g})'
