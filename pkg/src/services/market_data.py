import logging
from datetime import date

import numpy as np
import pandas as pd
from scipy import stats

from src.errors import DataValidationError, IndexRangeError
from src.schemas import (
    FitResult,
    LogSeries,
    PriceSeries,
    ReturnComparison,
    ReturnHistogram,
    ReturnMoments,
    ReturnSeries,
)
from src.services.fitting import linfit, residuals

logger = logging.getLogger(__name__)


def to_log(p: PriceSeries) -> LogSeries:
    """s(t) = ln S(t), elementwise."""
    return LogSeries(s=np.log(p.close), origin=p.dates[0], label=p.label)


def log_return(s: LogSeries, t: int, dt: int) -> float:
    """Logarithmic price change s(t+dt) - s(t) over dt trading days."""
    if t < 0 or dt < 0 or t + dt >= len(s):
        raise IndexRangeError(f"t={t}, dt={dt} outside a series of length {len(s)}")
    return float(s.s[t + dt] - s.s[t])


def daily_returns(s: LogSeries) -> ReturnSeries:
    """r(t) = s(t+1) - s(t); one return fewer than there are prices."""
    if len(s) < 2:
        raise DataValidationError("daily returns need a log series of length >= 2")
    return ReturnSeries(r=np.diff(s.s), label=s.label)


def volatility(r: ReturnSeries) -> float:
    """Sample standard deviation of the daily returns (n-1 divisor)."""
    if r.sigma_cache is not None:
        return r.sigma_cache
    if len(r) < 2:
        raise DataValidationError("volatility needs at least 2 returns")
    # sorted copy: the result must not depend on the order of the returns
    return float(np.std(np.sort(r.r), ddof=1))


def with_volatility(r: ReturnSeries) -> ReturnSeries:
    """Copy of ``r`` carrying its sample standard deviation."""
    return r.model_copy(update={"sigma_cache": volatility(r)})


def rebuild_index(r: ReturnSeries, s0: float) -> LogSeries:
    """
    Artificial log-index from (possibly shuffled) daily returns.

    s(0) = s0 and s(t+1) = s(t) + r(t); the accumulation is strictly sequential.
    """
    return LogSeries(s=rebuild_array(r.r, s0), label=r.label)


def rebuild_array(r: np.ndarray, s0: float) -> np.ndarray:
    out = np.empty(len(r) + 1, dtype=np.float64)
    out[0] = s0
    out[1:] = r
    return np.add.accumulate(out)


def split_era(p: PriceSeries, boundary: date) -> tuple[PriceSeries, PriceSeries]:
    """
    Split at ``boundary``: the first part strictly before it, the second at or after.
    """
    if not p.dates[0] < boundary <= p.dates[-1]:
        raise DataValidationError(
            f"era boundary {boundary} must fall after {p.dates[0]} and not after {p.dates[-1]}"
        )
    cut = int(np.searchsorted(np.array(p.dates, dtype="datetime64[D]"), np.datetime64(boundary, "D")))
    if cut < 2 or len(p) - cut < 2:
        raise DataValidationError(f"era boundary {boundary} leaves a part shorter than 2 rows")
    before = PriceSeries(dates=p.dates[:cut], close=p.close[:cut], label=f"{p.label}<{boundary}")
    after = PriceSeries(dates=p.dates[cut:], close=p.close[cut:], label=f"{p.label}>={boundary}")
    logger.info("Split %s at %s: %d + %d rows", p.label or "series", boundary, len(before), len(after))
    return before, after


def prices_from_returns(r: ReturnSeries, origin: date, s0: float, label: str = "") -> PriceSeries:
    """Price series on consecutive business days starting at ``origin``."""
    s = rebuild_array(r.r, float(np.log(s0)))
    dates = pd.bdate_range(start=origin, periods=len(s))
    return PriceSeries(dates=tuple(d.date() for d in dates), close=np.exp(s), label=label)


# ---------------------------------------------------------------- return distributions


def _signed_magnitudes(r: ReturnSeries, sign: int) -> np.ndarray:
    if sign not in (1, -1):
        raise DataValidationError("sign must be +1 or -1")
    values = r.r[r.r > 0] if sign > 0 else -r.r[r.r < 0]
    return values


def return_distribution(r: ReturnSeries, sign: int, n_bins: int = 40) -> ReturnHistogram:
    """Normalized density of |r| for the positive or negative daily returns, log-binned."""
    mags = _signed_magnitudes(r, sign)
    if len(mags) < 2:
        raise DataValidationError("not enough returns of the requested sign")
    lo, hi = mags.min(), mags.max()
    if lo == hi:
        raise DataValidationError("all returns of the requested sign are equal")
    edges = np.geomspace(lo, hi * (1 + 1e-12), n_bins + 1)
    counts, edges = np.histogram(mags, bins=edges)
    density = counts / (len(mags) * np.diff(edges))
    return ReturnHistogram(
        sign=sign,
        centers=np.sqrt(edges[:-1] * edges[1:]),
        density=density,
        counts=counts,
        n=len(mags),
    )


def return_tail_exponent(r: ReturnSeries, sign: int, q_lo: float = 0.9, n_bins: int = 40) -> FitResult:
    """Power-law slope of the |r| density above the q_lo quantile of that sign."""
    hist = return_distribution(r, sign, n_bins=n_bins)
    cut = np.quantile(_signed_magnitudes(r, sign), q_lo)
    mask = (hist.centers >= cut) & (hist.density > 0)
    xs, ys = np.log(hist.centers[mask]), np.log(hist.density[mask])
    fit = linfit(xs, ys)
    return FitResult(
        value=-fit.slope,
        stderr=fit.slope_stderr,
        fit_range=(float(hist.centers[mask][0]), float(hist.centers[mask][-1])),
        residual_norm=float(np.linalg.norm(residuals(fit, xs, ys))),
        n_points=fit.n,
        intercept=fit.intercept,
        r_squared=fit.r_squared,
    )


def moments(r: ReturnSeries) -> ReturnMoments:
    """Mean, sample std and the bias-corrected skewness and excess kurtosis."""
    return ReturnMoments(
        n=len(r),
        mean=float(np.mean(r.r)),
        std=volatility(r),
        skewness=float(stats.skew(r.r, bias=False)),
        excess_kurtosis=float(stats.kurtosis(r.r, fisher=True, bias=False)),
    )


def compare_returns(a: ReturnSeries, b: ReturnSeries) -> ReturnComparison:
    """Moments of both samples and a two-sample Kolmogorov-Smirnov test."""
    ks = stats.ks_2samp(a.r, b.r)
    return ReturnComparison(
        first=moments(a),
        second=moments(b),
        ks_statistic=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
    )
