"""Exception taxonomy shared across the package.

CLI exit-code mapping: InputError and its subclasses exit with 2,
InternalError with 70.
"""


class MinfeatError(Exception):
    """Base class for all package errors."""


class InputError(MinfeatError):
    """Caller-correctable problem: bad file, bad argument, bad value."""


class ConfigError(InputError):
    """Invalid, unknown, or out-of-range configuration."""


class NumericError(InputError):
    """Non-finite values where finite numbers are required."""


class InternalError(MinfeatError):
    """An internal invariant failed; indicates a bug, not a user error."""
