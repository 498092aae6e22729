"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration, domain,
regime, and calibration problems exit with code 2 (invalid input or
out-of-regime request), failed numerical self-checks exit with code 3.
"""


class ConfigurationError(ValueError):
    """Invalid or inconsistent configuration input."""


class DomainError(ValueError):
    """Argument outside the domain an operation is defined on."""


class RegimeError(RuntimeError):
    """Requested quantity is undefined in the current physical regime."""


class CalibrationError(RuntimeError):
    """Root search for a calibration target failed."""


class NumericalCheckError(RuntimeError):
    """A numerical self-check (conservation, convergence) exceeded tolerance.

    Carries a ``diagnostics`` dict with the offending values.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
