"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/precondition problems
exit with 2, numerical/solver obstructions with 3.
"""


class QslinkyError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(QslinkyError):
    """Bad configuration or violated precondition (exit code 2)."""


class SolverError(QslinkyError):
    """Numerical obstruction or solver breakdown (exit code 3)."""


class DimensionOverflow(ValidationError):
    """Requested basis would exceed the configured memory cap."""


class NotNormalized(ValidationError):
    """State vector norm deviates from 1 beyond tolerance."""


class InvalidMu(ValidationError):
    """Unit-cell origin outside the allowed range [1, n]."""


class LeakyRestriction(ValidationError):
    """Initial-state restriction loses more weight than allowed."""


class NoEdgeStates(ValidationError):
    """Edge-state selection came up empty (trivial phase or wrong cut)."""


class BandTouching(SolverError):
    """Adjacent bands degenerate on the grid; per-band phases undefined."""


class SolverFailure(SolverError):
    """Eigensolver or propagator failed to converge."""


class NormDriftExceeded(SolverError):
    """Propagated state drifted off the unit sphere."""


class NoOscillation(SolverError):
    """No spectral peak stands out of the noise floor."""
