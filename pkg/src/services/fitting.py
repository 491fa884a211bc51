"""Least-squares fits on transformed coordinates."""

import numpy as np
from scipy import stats

from src.errors import FitError
from src.schemas import LinearFit


def linfit(xs, ys) -> LinearFit:
    """
    Ordinary least squares y = intercept + slope * x.

    The slope standard error comes from the residual variance.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("x and y data must be one-dimensional and of the same size")
    if len(x) < 3:
        raise FitError(f"need at least 3 points for a fit, got {len(x)}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitError("fit data must be finite")
    if np.all(x == x[0]):
        raise FitError("cannot fit a line when all x values are identical")

    res = stats.linregress(x, y)
    r_squared = 1.0 if np.all(y == y[0]) else float(np.clip(res.rvalue**2, 0.0, 1.0))
    return LinearFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        slope_stderr=float(res.stderr),
        intercept_stderr=float(res.intercept_stderr),
        r_squared=r_squared,
        n=len(x),
    )


def residuals(fit: LinearFit, xs, ys) -> np.ndarray:
    """y - (intercept + slope * x) for every point."""
    x = np.asarray(xs, dtype=np.float64)
    return np.asarray(ys, dtype=np.float64) - (fit.intercept + fit.slope * x)


def power_law_fit(xs, ys) -> LinearFit:
    """Fit y = a * x**slope on log-log scales; all values must be positive."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("power-law fit needs positive x and y")
    return linfit(np.log(x), np.log(y))
