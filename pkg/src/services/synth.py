"""
Synthetic return series with known statistics.

Random numbers come from numpy's counter-based Philox bit generator. Each
stream is seeded by ``SeedSequence(master_seed, spawn_key=stream_key)``, so a
stream depends only on its identity and never on the order in which streams are
consumed.
"""

import logging

import numpy as np

from src.errors import DataValidationError
from src.schemas import ReturnSeries, RngStream, SynthKind, SynthSpec

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Philox/SeedSequence(master_seed, spawn_key=stream_key)"


class StreamPurpose:
    """First element of every stream key."""

    SYNTH = 1
    SWEEP = 2


def generator(stream: RngStream) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=stream.master_seed, spawn_key=stream.stream_key)
    return np.random.Generator(np.random.Philox(seq))


def gen_gaussian_returns(n: int, sigma: float, stream: RngStream) -> ReturnSeries:
    """
    I.i.d. normal(0, sigma^2) daily returns.

    The induced log-price walk has diffusion constant D = sigma^2 / 2 per day.
    """
    if n < 1 or sigma <= 0:
        raise DataValidationError("gaussian returns need n >= 1 and sigma > 0")
    rng = generator(stream)
    return ReturnSeries(r=sigma * rng.standard_normal(n))


def gen_student_t_returns(n: int, nu: float, scale: float, stream: RngStream) -> ReturnSeries:
    """
    Scaled Student-t draws built as normal / sqrt(chi2(nu) / nu).

    The unscaled variance is nu / (nu - 2), so nu must exceed 2.
    """
    if nu <= 2:
        raise DataValidationError(f"nu={nu} gives a diverging variance, need nu > 2")
    if n < 1 or scale <= 0:
        raise DataValidationError("student-t returns need n >= 1 and scale > 0")
    rng = generator(stream)
    z = rng.standard_normal(n)
    chi2 = 2.0 * rng.standard_gamma(nu / 2.0, n)
    return ReturnSeries(r=scale * z / np.sqrt(chi2 / nu))


def gen_drop_rebound_returns(
    n: int,
    sigma: float,
    drop_magnitude: float,
    rebound_len: int,
    drop_prob: float,
    stream: RngStream,
) -> ReturnSeries:
    """
    Gaussian baseline with planted drops, each followed by a linear rebound.

    A drop of -drop_magnitude is followed by rebound_len days of
    +drop_magnitude / rebound_len; no drop starts inside an active rebound.
    """
    if rebound_len < 1 or drop_magnitude <= 0 or sigma <= 0:
        raise DataValidationError("drop-rebound needs rebound_len >= 1, drop_magnitude > 0, sigma > 0")
    if not 0 <= drop_prob < 1:
        raise DataValidationError("drop_prob must lie in [0, 1)")
    rng = generator(stream)
    r = sigma * rng.standard_normal(n)
    draws = rng.random(n)
    step = drop_magnitude / rebound_len

    t = 0
    n_drops = 0
    while t < n:
        if draws[t] < drop_prob and t + rebound_len < n:
            r[t] = -drop_magnitude
            r[t + 1 : t + 1 + rebound_len] = step
            t += rebound_len + 1
            n_drops += 1
        else:
            t += 1
    logger.debug("Planted %d drops in %d days", n_drops, n)
    return ReturnSeries(r=r)


def drop_positions(r: ReturnSeries, drop_magnitude: float) -> np.ndarray:
    """Indices of planted drops (exact -drop_magnitude values)."""
    return np.flatnonzero(r.r == -drop_magnitude)


def generate(spec: SynthSpec, stream: RngStream | None = None) -> ReturnSeries:
    """Dispatch on ``spec.kind``; the stream defaults to one keyed by ``spec.seed``."""
    stream = stream or RngStream(master_seed=spec.seed, stream_key=(StreamPurpose.SYNTH,))
    if spec.kind == SynthKind.gaussian:
        series = gen_gaussian_returns(spec.n, spec.sigma, stream)
    elif spec.kind == SynthKind.student_t:
        series = gen_student_t_returns(spec.n, spec.nu, spec.scale, stream)
    else:
        series = gen_drop_rebound_returns(
            spec.n, spec.sigma, spec.drop_magnitude, spec.rebound_len, spec.drop_prob, stream
        )
    logger.info("Generated %s series of %d returns (seed %d)", spec.kind.value, spec.n, spec.seed)
    return series.model_copy(update={"label": spec.kind.value})
