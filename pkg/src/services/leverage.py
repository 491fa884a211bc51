"""
Leverage correlation between past returns and future squared returns.

L(tau) = <r(t + tau)^2 * r(t)> / <r^2>^2
"""

import logging

import numpy as np

from src.errors import DataValidationError
from src.schemas import LeverageCurve, ReturnSeries

logger = logging.getLogger(__name__)


def leverage(r: ReturnSeries, tau_lo: int, tau_hi: int, min_terms: int = 100) -> LeverageCurve:
    """
    L(tau) for every lag in [tau_lo, tau_hi].

    The denominator is the squared mean of r^2 over the whole series. Lags with
    fewer than ``min_terms`` products are kept but marked unreliable; lags with
    none are left out.
    """
    if tau_lo > tau_hi:
        raise DataValidationError("tau_lo must not exceed tau_hi")
    x = r.r
    n = len(x)
    sq = x * x
    denominator = float(np.mean(sq)) ** 2
    if denominator == 0:
        raise DataValidationError("leverage of an all-zero return series is undefined")

    taus, values, errs, terms, reliable = [], [], [], [], []
    for tau in range(tau_lo, tau_hi + 1):
        lo, hi = max(0, -tau), min(n, n - tau)
        m = hi - lo
        if m <= 0:
            continue
        products = sq[lo + tau:hi + tau] * x[lo:hi]
        taus.append(tau)
        values.append(float(products.mean()) / denominator)
        errs.append(float(products.std(ddof=1)) / np.sqrt(m) / denominator if m > 1 else float("inf"))
        terms.append(m)
        reliable.append(m >= min_terms)

    if not taus:
        raise DataValidationError(f"no lag in [{tau_lo}, {tau_hi}] fits a series of {n} returns")
    weak = [t for t, ok in zip(taus, reliable) if not ok]
    if weak:
        logger.warning("%d leverage lags have fewer than %d terms", len(weak), min_terms)
    return LeverageCurve(taus=taus, values=values, stderr=errs, n_terms=terms, reliable=reliable)


def reverse(r: ReturnSeries) -> ReturnSeries:
    """The same returns in reverse time order."""
    return ReturnSeries(r=r.r[::-1].copy(), sigma_cache=r.sigma_cache, label=r.label)
