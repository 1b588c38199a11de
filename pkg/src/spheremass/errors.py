"""Exception hierarchy shared across the toolkit."""


class SphereMassError(Exception):
    """Base class for all toolkit errors."""


class ChartDomainError(SphereMassError):
    """A point was queried outside the metric's chart domain."""


class MetricDefinitenessError(SphereMassError):
    """The metric failed the positive-definiteness check at a queried point."""


class GeometryError(SphereMassError):
    """Surface construction failed (conjugate point, degenerate induced metric,
    or ODE breakdown)."""


class GateError(SphereMassError):
    """A surface failed the positive-Gauss-curvature gate required for
    isometric embedding."""


class EmbeddingConvergenceError(SphereMassError):
    """The embedding solver did not reach its residual tolerance."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history or [])


class FitRankDeficientError(SphereMassError):
    """The least-squares design matrix is numerically rank deficient
    (ladder too narrow for the requested exponents)."""


class ConfigError(SphereMassError):
    """Invalid run configuration; ``errors`` lists one message per field."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
