"""Exception types shared across the package.

The CLI maps each family onto a process exit code, so library code raises
the most specific class that applies.
"""


class RobustPriorsError(Exception):
    """Base class for all package errors."""


class InputError(RobustPriorsError, ValueError):
    """Malformed or out-of-alphabet input data."""


class ContractError(InputError):
    """Arguments with inconsistent dimensions."""


class ConfigError(RobustPriorsError, ValueError):
    """Invalid configuration values."""


class DegenerateDirectionError(RobustPriorsError, ArithmeticError):
    """A shared-scalar fit along a direction whose image ``X @ q`` is zero."""


class NumericalError(RobustPriorsError, ArithmeticError):
    """A solver produced non-finite values or failed to factorize."""
