"""Exception types shared across the toolkit.

Two broad categories are distinguished because the command-line front end
maps them to different exit codes: configuration problems (bad files,
inconsistent options) and physics-domain problems (quantities outside
their physical range, regimes where an operation is undefined).
"""


class ConfigError(ValueError):
    """Invalid configuration or input data (CLI exit code 2)."""


class DomainError(ValueError):
    """Physically invalid argument or regime (CLI exit code 3)."""


class NoExceptionalPointError(DomainError):
    """The requested exceptional-point quantity does not exist for these rates."""
