"""Exception types raised across the package."""


class SRDEError(Exception):
    """Base class for all package errors."""


class InvalidCutoffError(SRDEError, ValueError):
    """Slow cutoff outside ``1 <= N < M``."""


class InvalidStepError(SRDEError, ValueError):
    """Non-positive time step."""


class DegenerateDecayError(SRDEError, ValueError):
    """A noise-forced mode has zero (or negative) decay rate, so no stationary law exists."""


class NotForcedError(SRDEError, ValueError):
    """A slow mode was asked for fast-mode statistics."""


class DivergenceError(SRDEError, FloatingPointError):
    """A trajectory produced non-finite values.

    Attributes
    ----------
    time : float
        Time (in the integrator's own clock) at which the blow-up was detected.
    """

    def __init__(self, time, message=None):
        self.time = float(time)
        super().__init__(message or f"non-finite state at t={self.time:g}")


class CovarianceError(SRDEError, ValueError):
    """Covariance matrix is not symmetric positive semidefinite within tolerance."""


class GridMismatchError(SRDEError, ValueError):
    """Two trajectories that must share a time grid do not."""


class EnsembleFailureError(SRDEError, RuntimeError):
    """Too many (or all) trajectories of an ensemble diverged."""


class ScenarioError(SRDEError, ValueError):
    """Invalid scenario configuration; message carries the offending field path."""
