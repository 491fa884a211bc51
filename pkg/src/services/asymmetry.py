"""
Gain-loss asymmetry measures built from sweep cells.

w(T)     = dtau*(T) / dtau*(T_inf), dtau*(T) = tau*_+(T) - tau*_-(T)
w_pm(T)  = (tau*_pm(T) - tau*_pm(1)) / (tau*_pm(T_inf) - tau*_pm(1))

theta is the decay constant of |1 - w(T)| ~ exp(-T / theta) for small T.
"""

import logging
from datetime import date
from typing import Sequence

import numpy as np

from src.errors import AsymmetryUndefinedError, DataValidationError, FitError
from src.schemas import (
    AsymmetryCurve,
    AsymmetryPoint,
    EraReport,
    EraResult,
    PriceSeries,
    SweepCell,
    ThetaFit,
)
from src.services.fitting import linfit
from src.services.market_data import compare_returns, daily_returns, split_era, to_log, volatility, with_volatility
from src.services.shuffler import sweep

logger = logging.getLogger(__name__)


def delta_tau(cell: SweepCell) -> float:
    """tau*_+ - tau*_-; positive when gains need the longer horizon."""
    return cell.tau_star_plus - cell.tau_star_minus


def w_of_T(delta_T: float, delta_inf: float) -> float:
    """
    Relative asymmetry left at window length T.

    0 when shuffling removed the asymmetry, 1 when it is as large as at T_inf.
    Raises AsymmetryUndefinedError when the T_inf asymmetry is zero.
    """
    if delta_inf == 0:
        raise AsymmetryUndefinedError("no asymmetry at T_inf, w(T) is undefined")
    return delta_T / delta_inf


def w_pm(tau_star_pm_T: float, tau_star_1: float, tau_star_pm_inf: float) -> float:
    """One-sided version of w: how far tau*_pm(T) has moved from its fully shuffled value."""
    denominator = tau_star_pm_inf - tau_star_1
    if denominator == 0:
        raise AsymmetryUndefinedError("tau* at T_inf equals tau* at T=1, w_pm is undefined")
    return (tau_star_pm_T - tau_star_1) / denominator


def build_curve(cells: Sequence[SweepCell], k: float, T_inf: int, label: str = "") -> AsymmetryCurve:
    """w(T), w_+(T,1) and w_-(T,1) for one level from the sweep cells at that level."""
    mine = sorted((c for c in cells if np.isclose(c.k, abs(k))), key=lambda c: c.T)
    by_T = {c.T: c for c in mine}
    if T_inf not in by_T:
        raise DataValidationError(f"sweep has no cell at T_inf={T_inf} for k={k:g}")
    if 1 not in by_T:
        raise DataValidationError(f"sweep has no fully shuffled cell (T=1) for k={k:g}")

    inf, one = by_T[T_inf], by_T[1]
    d_inf = delta_tau(inf)
    points = [
        AsymmetryPoint(
            T=c.T,
            w=w_of_T(delta_tau(c), d_inf),
            w_plus=w_pm(c.tau_star_plus, one.tau_star_plus, inf.tau_star_plus),
            w_minus=w_pm(c.tau_star_minus, one.tau_star_minus, inf.tau_star_minus),
            delta_tau=delta_tau(c),
        )
        for c in mine
    ]
    return AsymmetryCurve(
        level=inf.level,
        points=points,
        tau_star_inf_plus=inf.tau_star_plus,
        tau_star_inf_minus=inf.tau_star_minus,
        tau_star_1_plus=one.tau_star_plus,
        tau_star_1_minus=one.tau_star_minus,
        T_inf=T_inf,
        label=label,
    )


def build_curves(
    cells: Sequence[SweepCell], k_list: Sequence[float], T_inf: int, label: str = ""
) -> tuple[list[AsymmetryCurve], list[str]]:
    """One curve per level; levels with undefined w are flagged, not fatal."""
    curves, flags = [], []
    for k in sorted({abs(k) for k in k_list}):
        try:
            curves.append(build_curve(cells, k, T_inf, label))
        except AsymmetryUndefinedError as e:
            logger.warning("Level k=%g skipped: %s", k, e.detail)
            flags.append(f"k={abs(k):g}: {e.detail}")
    return curves, flags


def theta_fit(curve: AsymmetryCurve, T_hi: int = 30) -> ThetaFit:
    """
    theta from the slope of ln|1 - w(T)| against T for T < T_hi.

    Points with w >= 1 are excluded and counted.
    """
    usable = [p for p in curve.points if p.T < T_hi]
    kept = [p for p in usable if p.w < 1]
    excluded = len(usable) - len(kept)
    if excluded:
        logger.warning("theta fit at k=%g: %d points with w >= 1 excluded", abs(curve.level.k), excluded)
    if len(kept) < 3:
        raise FitError(f"theta fit needs >= 3 points with T < {T_hi} and w < 1, got {len(kept)}")

    T = np.array([p.T for p in kept], dtype=np.float64)
    y = np.log(np.array([1.0 - p.w for p in kept]))
    fit = linfit(T, y)
    if fit.slope >= 0:
        raise FitError(f"|1 - w(T)| does not decay for T < {T_hi} (slope {fit.slope:.4g})")
    return ThetaFit(
        theta=-1.0 / fit.slope,
        fit_range_T=(int(T.min()), int(T.max())),
        stderr=fit.slope_stderr / fit.slope**2,
        n_points=fit.n,
        n_excluded=excluded,
        k=abs(curve.level.k),
    )


def theta_fits(curves: Sequence[AsymmetryCurve], T_hi: int = 30) -> tuple[list[ThetaFit], list[str]]:
    """theta per curve; failed fits become flags."""
    fits, flags = [], []
    for curve in curves:
        try:
            fits.append(theta_fit(curve, T_hi))
        except FitError as e:
            logger.warning("No theta for k=%g: %s", abs(curve.level.k), e.detail)
            flags.append(f"k={abs(curve.level.k):g}: {e.detail}")
    return fits, flags


def equivalence_gap(curve: AsymmetryCurve) -> float:
    """max over T of |w - w_+| and |w - w_-|."""
    return max(max(abs(p.w - p.w_plus), abs(p.w - p.w_minus)) for p in curve.points)


def compare_indices(curves: dict[str, AsymmetryCurve]) -> list[dict]:
    """Rows (label, T, w) for several indices at the same level."""
    rows = []
    for label, curve in curves.items():
        for p in curve.points:
            rows.append({"label": label, "T": p.T, "w": p.w, "k": abs(curve.level.k), "sigma": curve.level.sigma})
    return rows


def era_report(
    p: PriceSeries,
    boundary: date,
    T_list: Sequence[int],
    k_list: Sequence[float],
    n_p: int,
    tau_max: int,
    smooth: int,
    T_inf: int,
    T_hi: int,
    master_seed: int,
    min_days: int = 730,
    workers: int = 1,
) -> EraReport:
    """
    Full pipeline on each side of ``boundary`` with each era's own volatility.
    """
    eras = split_era(p, boundary)
    for era in eras:
        span = (era.dates[-1] - era.dates[0]).days
        if span < min_days:
            raise DataValidationError(f"era {era.label} spans {span} days, need at least {min_days}")

    T_grid = sorted(set(T_list) | {1, T_inf})
    results, returns = [], []
    for era in eras:
        s = to_log(era)
        r = with_volatility(daily_returns(s))
        sigma = volatility(r)
        logger.info("Era %s: %d days, sigma=%.5f", era.label, len(era), sigma)
        cells = sweep(r, T_grid, k_list, n_p, tau_max, smooth, master_seed, s0=float(s.s[0]),
                      workers=workers, sigma=sigma)
        curves, flags = build_curves(cells, k_list, T_inf, era.label)
        thetas, theta_flags = theta_fits(curves, T_hi)
        results.append(
            EraResult(
                label=era.label,
                start=era.dates[0],
                end=era.dates[-1],
                n_days=len(era),
                sigma=sigma,
                curves=curves,
                thetas=thetas,
                flags=flags + theta_flags,
            )
        )
        returns.append(r)
    return EraReport(boundary=boundary, eras=results, returns=compare_returns(*returns))
