"""
Inverse statistics: first-passage times, their distribution and its mode,
the Brownian reference density and the scaling fits.
"""

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from src.errors import DataValidationError, FitError, IndexRangeError
from src.schemas import FitResult, FptDistribution, HorizonPoint, LogSeries, ReturnLevel
from src.services import kernels
from src.services.fitting import linfit, power_law_fit, residuals
from src.services.pool import ordered_map

logger = logging.getLogger(__name__)

_series: Optional[np.ndarray] = None


def first_passage(s: LogSeries, t: int, level: ReturnLevel, tau_max: int) -> Optional[int]:
    """
    Smallest dt >= 1 with s(t+dt) - s(t) crossing the level, or None when censored.
    """
    if t < 0 or t >= len(s):
        raise IndexRangeError(f"start {t} outside a series of length {len(s)}")
    tau = kernels.first_passage_one(s.s, t, level.rho, tau_max)
    return None if tau < 0 else int(tau)


def _init_series(s: np.ndarray) -> None:
    global _series
    _series = s


def _count_chunk(args: tuple[float, int, int, int]) -> tuple[np.ndarray, int]:
    rho, tau_max, lo, hi = args
    return kernels.passage_counts(_series, rho, tau_max, lo, hi)


def fpt_distribution(s: LogSeries, level: ReturnLevel, tau_max: int, workers: int = 1) -> FptDistribution:
    """
    Aggregate first passages over every start t in [0, length-2].

    Start indices are split across workers and the per-worker counts are added.
    """
    if len(s) < 2:
        raise DataValidationError("a first-passage distribution needs a series of length >= 2")
    if tau_max < 1:
        raise DataValidationError("tau_max must be >= 1")
    n_starts = len(s) - 1
    if workers <= 1:
        counts, censored = kernels.passage_counts(s.s, level.rho, tau_max, 0, n_starts)
    else:
        edges = np.linspace(0, n_starts, workers + 1).astype(int)
        items = [(level.rho, tau_max, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        parts = ordered_map(_count_chunk, items, workers, initializer=_init_series, initargs=(s.s,))
        counts = np.sum([p[0] for p in parts], axis=0)
        censored = sum(int(p[1]) for p in parts)
    return from_dense(counts, n_starts, int(censored), tau_max, level)


def from_dense(
    counts: np.ndarray, total_starts: int, censored: int, tau_max: int, level: Optional[ReturnLevel] = None
) -> FptDistribution:
    """Distribution from dense counts indexed by tau; empty bins are dropped."""
    nz = np.flatnonzero(counts)
    return FptDistribution(
        counts={int(tau): int(counts[tau]) for tau in nz},
        total_starts=total_starts,
        censored=censored,
        tau_max=tau_max,
        level=level,
    )


def merge_distributions(ds: Sequence[FptDistribution]) -> FptDistribution:
    """Add count maps; all parts must share tau_max."""
    if not ds:
        raise DataValidationError("nothing to merge")
    tau_max = ds[0].tau_max
    if any(d.tau_max != tau_max for d in ds):
        raise DataValidationError("cannot merge distributions with different tau_max")
    counts = np.sum([d.dense() for d in ds], axis=0)
    return from_dense(
        counts,
        sum(d.total_starts for d in ds),
        sum(d.censored for d in ds),
        tau_max,
        ds[0].level,
    )


def moving_sum(counts: np.ndarray, window: int) -> np.ndarray:
    """Centered moving sum over an odd window, zero outside the array."""
    if window < 1 or window % 2 == 0:
        raise DataValidationError("smoothing window must be a positive odd integer")
    if window == 1:
        return counts.astype(np.int64)
    half = window // 2
    padded = np.concatenate([np.zeros(half + 1, dtype=np.int64), counts.astype(np.int64), np.zeros(half, dtype=np.int64)])
    cs = np.cumsum(padded)
    return cs[window:] - cs[:-window]


def mode_of_counts(counts: np.ndarray, smooth_window: int = 3) -> int:
    """Argmax over tau >= 1 of the smoothed dense counts; ties go to the smaller tau."""
    smoothed = moving_sum(counts, smooth_window)
    return int(np.argmax(smoothed[1:])) + 1


def mode_tau(d: FptDistribution, smooth_window: int = 3) -> int:
    """Most probable waiting time (optimal investment horizon)."""
    if d.n_passages == 0:
        raise DataValidationError("mode of an empty first-passage distribution is undefined")
    return mode_of_counts(d.dense(), smooth_window)


def brownian_fpt_pdf(rho: float, D: float, tau):
    """
    First-passage density of a driftless Brownian log-price with diffusion constant D.

    |rho| / sqrt(4 pi D tau^3) * exp(-rho^2 / (4 D tau)); its maximum sits at
    tau = rho^2 / (6 D).
    """
    tau_arr = np.asarray(tau, dtype=np.float64)
    if D <= 0 or rho == 0 or np.any(tau_arr <= 0):
        raise DataValidationError("brownian density needs D > 0, tau > 0 and rho != 0")
    value = abs(rho) / np.sqrt(4.0 * math.pi * D * tau_arr**3) * np.exp(-(rho**2) / (4.0 * D * tau_arr))
    return float(value) if value.ndim == 0 else value


def brownian_mode(rho: float, D: float) -> float:
    """tau at which brownian_fpt_pdf peaks."""
    return rho**2 / (6.0 * D)


def log_bin_edges(lo: int, hi: int, ratio: float = 1.25) -> np.ndarray:
    """Integer bin edges from lo to hi+1, growing geometrically, each bin >= 1 wide."""
    edges = [lo]
    while edges[-1] <= hi:
        edges.append(max(edges[-1] + 1, int(math.ceil(edges[-1] * ratio))))
    edges[-1] = min(edges[-1], hi + 1)
    return np.array(edges, dtype=np.int64)


def tail_exponent(d: FptDistribution, fit_lo: int, fit_hi: int, ratio: float = 1.25) -> FitResult:
    """
    alpha from the log-log slope of the log-binned density over [fit_lo, fit_hi].

    density = bin count / (total passages * bin width).
    """
    if not 1 <= fit_lo < fit_hi:
        raise FitError("tail fit range must satisfy 1 <= fit_lo < fit_hi")
    total = d.n_passages
    if total == 0:
        raise FitError("tail fit of an empty distribution")
    dense = d.dense()
    hi = min(fit_hi, d.tau_max)
    edges = log_bin_edges(fit_lo, hi, ratio)
    if len(edges) < 2:
        raise FitError("tail fit range holds no bins")

    cs = np.concatenate([[0], np.cumsum(dense)])
    bin_counts = cs[edges[1:]] - cs[edges[:-1]]
    widths = edges[1:] - edges[:-1]
    # geometric centre of the half-integer cell boundaries
    centers = np.sqrt((edges[:-1] - 0.5) * (edges[1:] - 0.5))
    mask = bin_counts > 0
    if mask.sum() < 3:
        raise FitError(f"tail fit needs >= 3 populated bins in [{fit_lo}, {fit_hi}], found {mask.sum()}")

    x = np.log(centers[mask])
    y = np.log(bin_counts[mask] / (total * widths[mask]))
    fit = linfit(x, y)
    return FitResult(
        value=-fit.slope,
        stderr=fit.slope_stderr,
        fit_range=(float(fit_lo), float(fit_hi)),
        residual_norm=float(np.linalg.norm(residuals(fit, x, y))),
        n_points=fit.n,
        intercept=fit.intercept,
        r_squared=fit.r_squared,
    )


def gamma_scaling(levels: Iterable[tuple[float, float]], fit_min_abs_rho: float) -> FitResult:
    """
    gamma from the log-log slope of tau* against |rho| for |rho| > fit_min_abs_rho.

    The caller passes one sign at a time.
    """
    pts = [(abs(rho), tau) for rho, tau in levels if abs(rho) > fit_min_abs_rho]
    if len(pts) < 3:
        raise FitError(f"gamma fit needs >= 3 levels above |rho|={fit_min_abs_rho:g}, got {len(pts)}")
    rho = np.array([p[0] for p in pts])
    tau = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(tau <= 0):
        raise FitError("optimal horizons must be positive")
    fit = power_law_fit(rho, tau)
    x, y = np.log(rho), np.log(tau)
    return FitResult(
        value=fit.slope,
        stderr=fit.slope_stderr,
        fit_range=(float(rho.min()), float(rho.max())),
        residual_norm=float(np.linalg.norm(residuals(fit, x, y))),
        n_points=fit.n,
        intercept=fit.intercept,
        r_squared=fit.r_squared,
    )


def horizon_scan(
    s: LogSeries,
    sigma: float,
    k_grid: Sequence[float],
    tau_max: int,
    smooth_window: int = 3,
    workers: int = 1,
) -> list[HorizonPoint]:
    """Optimal horizon of the unshuffled index at every level k * sigma."""
    points = []
    for k in k_grid:
        level = ReturnLevel.from_k(k, sigma)
        d = fpt_distribution(s, level, tau_max, workers=workers)
        if d.n_passages == 0:
            logger.warning("No passages at k=%g, level skipped", k)
            continue
        points.append(
            HorizonPoint(
                level=level,
                tau_star=mode_tau(d, smooth_window),
                censored_frac=d.censored / d.total_starts,
            )
        )
    return points


def gamma_by_sign(points: Sequence[HorizonPoint], fit_min_k: float) -> dict[int, FitResult]:
    """gamma fitted separately for rising and falling levels."""
    out = {}
    for sign in (1, -1):
        pts = [(p.level.rho, p.tau_star) for p in points if p.level.sign == sign]
        sigma = points[0].level.sigma if points else 1.0
        out[sign] = gamma_scaling(pts, fit_min_k * sigma)
    return out


def distribution_table(d: FptDistribution) -> list[dict]:
    """One row per populated tau: count and probability among the passages."""
    probs = d.probabilities()
    return [{"tau": tau, "count": count, "probability": probs[tau]} for tau, count in d.counts.items()]
