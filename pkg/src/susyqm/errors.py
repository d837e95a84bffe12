"""Exception types shared across the package."""


class SusyError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SusyError):
    """Invalid user-facing parameters (CLI exit code 2)."""


class SingularTransformError(SusyError):
    """A transformation function (seed, Wronskian or w) has an interior node.

    Carries the approximate node location so callers can report it.
    """

    def __init__(self, message, x_node=None):
        super().__init__(message)
        self.x_node = x_node


class InconsistentSeedError(SusyError):
    """Seed data contradicts itself (e.g. vanishing at both ends below E0)."""


class ParameterDegeneracyError(SusyError):
    """Special-function parameters hit a pole/degenerate configuration."""


class TruncationError(SusyError):
    """A series did not converge within the allowed number of terms."""


class IntegratorAccuracyError(SusyError):
    """An integration accuracy guard tripped (e.g. transfer-matrix det drift)."""
