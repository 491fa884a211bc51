"""
Shuffled time-window method.

The return series is cut into T-day windows (the first window starting at a
random offset), the windows are permuted, and an artificial index is rebuilt
from the permuted returns. Window contents and the return multiset are kept
exactly; dependencies longer than T are broken.

A window of length T also breaks about T_c / T of the dependencies whose
length T_c is shorter than T, so asymmetry fades smoothly, not sharply, as T
shrinks.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from src.errors import DataValidationError
from src.schemas import HorizonPoint, ReturnLevel, ReturnSeries, RngStream, SweepCell, WindowPartition
from src.services import kernels
from src.services.inverse_stats import from_dense, mode_of_counts
from src.services.market_data import rebuild_array, volatility
from src.services.pool import ordered_map
from src.services.synth import StreamPurpose, generator

logger = logging.getLogger(__name__)

PERMUTATION_CHUNK = 25

_returns: Optional[np.ndarray] = None


def partition(r: ReturnSeries, T: int, offset: int) -> WindowPartition:
    """
    Leading block of ``offset`` days, then full T-day blocks, then the remainder.
    """
    n = len(r)
    if not 1 <= T <= n:
        raise DataValidationError(f"window length T={T} must lie in [1, {n}]")
    if not 0 <= offset < T:
        raise DataValidationError(f"offset {offset} must lie in [0, {T - 1}]")
    return WindowPartition(T=T, offset=offset, n=n, block_bounds=_bounds(n, T, offset))


def _bounds(n: int, T: int, offset: int) -> np.ndarray:
    starts = np.arange(offset, n, T, dtype=np.int64)
    if offset > 0:
        starts = np.concatenate([[0], starts])
    ends = np.append(starts[1:], n)
    return np.stack([starts, ends], axis=1)


def shuffle_blocks(p: WindowPartition, r: ReturnSeries, stream: RngStream) -> ReturnSeries:
    """Permute whole blocks uniformly at random; order inside each block is kept."""
    if p.n != len(r):
        raise DataValidationError(f"partition covers {p.n} days but the series has {len(r)}")
    perm = generator(stream).permutation(len(p))
    return ReturnSeries(r=_apply(r.r, p.block_bounds, perm), label=r.label)


def _apply(r: np.ndarray, bounds: np.ndarray, perm: np.ndarray) -> np.ndarray:
    lengths = bounds[:, 1] - bounds[:, 0]
    return r[kernels.block_order(bounds[:, 0], lengths, perm.astype(np.int64))]


def _draw(rng: np.random.Generator, n: int, T: int) -> tuple[np.ndarray, np.ndarray]:
    """Random offset then a uniform block permutation, both from one cell stream."""
    if T >= n:
        bounds = np.array([[0, n]], dtype=np.int64)
    else:
        bounds = _bounds(n, T, int(rng.integers(0, T)))
    return bounds, rng.permutation(len(bounds))


def sweep_stream(master_seed: int, T: int, sign: int, k_index: int, perm_index: int) -> RngStream:
    """Stream for one permutation of one sweep cell and sign."""
    return RngStream(
        master_seed=master_seed,
        stream_key=(StreamPurpose.SWEEP, T, 0 if sign > 0 else 1, k_index, perm_index),
    )


def _init_returns(r: np.ndarray) -> None:
    global _returns
    _returns = r


def _run_chunk(item: tuple) -> tuple[np.ndarray, int, list[int]]:
    """Summed histogram, censored count and the modes of the permutations that have passages."""
    master_seed, T, sign, k_index, rho, tau_max, smooth, s0, p_lo, p_hi = item
    r = _returns
    n = len(r)
    total = np.zeros(tau_max + 1, dtype=np.int64)
    censored = 0
    modes = []
    for p in range(p_lo, p_hi):
        rng = generator(sweep_stream(master_seed, T, sign, k_index, p))
        bounds, perm = _draw(rng, n, T)
        s = rebuild_array(_apply(r, bounds, perm), s0)
        counts, cens = kernels.passage_counts(s, rho, tau_max, 0, n)
        total += counts
        censored += int(cens)
        # a permutation without passages has no mode
        if counts.any():
            modes.append(mode_of_counts(counts, smooth))
    return total, censored, modes


def sweep(
    r: ReturnSeries,
    T_list: Sequence[int],
    k_list: Sequence[float],
    n_p: int,
    tau_max: int,
    smooth: int,
    master_seed: int,
    s0: float = 0.0,
    workers: int = 1,
    sigma: Optional[float] = None,
) -> list[SweepCell]:
    """
    Permutation-averaged optimal horizons over a (T, |rho|) grid.

    For every cell and sign, n_p shuffles are drawn from streams keyed by
    (master_seed, T, sign, level index, permutation index); the cell's tau* is
    the mode of the summed histogram and the dispersion is the spread of the
    per-permutation modes. Results do not depend on ``workers``.
    """
    if n_p < 1:
        raise DataValidationError("n_p must be >= 1")
    if any(T < 1 for T in T_list):
        raise DataValidationError("window lengths must be >= 1")
    if any(k == 0 for k in k_list):
        raise DataValidationError("return levels must be nonzero")
    sigma = volatility(r) if sigma is None else sigma
    magnitudes = sorted({abs(k) for k in k_list})
    n = len(r)

    items = []
    for T in T_list:
        for k_index, k in enumerate(magnitudes):
            for sign in (1, -1):
                for p_lo in range(0, n_p, PERMUTATION_CHUNK):
                    p_hi = min(p_lo + PERMUTATION_CHUNK, n_p)
                    items.append((master_seed, T, sign, k_index, sign * k * sigma, tau_max, smooth, s0, p_lo, p_hi))
    logger.info(
        "Sweep: %d windows x %d levels x 2 signs x %d permutations (%d work items, %d workers)",
        len(T_list), len(magnitudes), n_p, len(items), workers,
    )
    results = ordered_map(_run_chunk, items, workers, initializer=_init_returns, initargs=(r.r,))

    merged: dict[tuple[int, int, int], list] = {}
    for item, (counts, censored, modes) in zip(items, results):
        key = (item[1], item[3], item[2])
        acc = merged.setdefault(key, [np.zeros(tau_max + 1, dtype=np.int64), 0, []])
        acc[0] = acc[0] + counts
        acc[1] += censored
        acc[2].extend(modes)

    cells = []
    for T in T_list:
        for k_index, k in enumerate(magnitudes):
            level = ReturnLevel.from_k(k, sigma)
            side = {}
            for sign in (1, -1):
                counts, censored, modes = merged[(T, k_index, sign)]
                signed = level if sign > 0 else level.mirrored()
                hist = from_dense(counts, n_p * n, censored, tau_max, signed)
                if hist.n_passages == 0:
                    raise DataValidationError(f"no passages at T={T}, k={sign * k:g}; increase tau_max")
                side[sign] = (hist, mode_of_counts(counts, smooth), float(np.std(modes)) if modes else 0.0)
            cell = SweepCell(
                T=T,
                level=level,
                n_p=n_p,
                tau_star_plus=side[1][1],
                tau_star_minus=side[-1][1],
                dispersion_plus=side[1][2],
                dispersion_minus=side[-1][2],
                censored_frac_plus=side[1][0].censored / side[1][0].total_starts,
                censored_frac_minus=side[-1][0].censored / side[-1][0].total_starts,
                hist_plus=side[1][0],
                hist_minus=side[-1][0],
            )
            if max(cell.censored_frac_plus, cell.censored_frac_minus) > 0.5:
                logger.warning("More than half of the starts censored at T=%d, k=%g", T, k)
            cells.append(cell)
        logger.info("Finished T=%d", T)
    return cells


def shuffled_horizon_scan(
    r: ReturnSeries,
    k_grid: Sequence[float],
    n_p: int,
    tau_max: int,
    smooth: int,
    master_seed: int,
    T: int = 1,
    workers: int = 1,
    sigma: Optional[float] = None,
) -> list[HorizonPoint]:
    """Optimal horizons of the T-shuffled index at every level, both signs."""
    magnitudes = sorted({abs(k) for k in k_grid})
    cells = sweep(r, [T], magnitudes, n_p, tau_max, smooth, master_seed, workers=workers, sigma=sigma)
    points = []
    for cell in cells:
        points.append(HorizonPoint(level=cell.level, tau_star=cell.tau_star_plus,
                                   censored_frac=cell.censored_frac_plus, T=T, n_p=n_p))
        points.append(HorizonPoint(level=cell.level.mirrored(), tau_star=cell.tau_star_minus,
                                   censored_frac=cell.censored_frac_minus, T=T, n_p=n_p))
    return points
