"""Exception types shared across the simulator.

The CLI maps these onto distinct exit codes, so keep the taxonomy small:
configuration problems, geometric infeasibility, numerical degeneracy.
Plain ``ValueError`` is used for ordinary argument validation.
"""


class TenprecError(Exception):
    """Base class for simulator-specific failures."""


class ConfigError(TenprecError):
    """Invalid, inconsistent, or unparsable scenario configuration."""


class InfeasibilityError(TenprecError):
    """Requested precoder cannot exist for the given array geometry."""


class DegeneracyError(TenprecError):
    """Numerically degenerate input, e.g. a zero channel or a projection
    that annihilates the target direction."""
