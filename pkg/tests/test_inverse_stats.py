import numpy as np
import pytest
from scipy import integrate

from src.errors import DataValidationError, FitError, IndexRangeError
from src.schemas import FptDistribution, LogSeries, ReturnLevel, RngStream
from src.services.inverse_stats import (
    brownian_fpt_pdf,
    brownian_mode,
    distribution_table,
    first_passage,
    fpt_distribution,
    from_dense,
    gamma_by_sign,
    gamma_scaling,
    horizon_scan,
    merge_distributions,
    mode_tau,
    moving_sum,
    tail_exponent,
)
from src.services.market_data import rebuild_index
from src.services.synth import gen_gaussian_returns

SIGMA = 0.01
# Discrete Gaussian steps overshoot a level by about 0.5826 sigma on average,
# which moves the walk's mode from k^2/3 to (k + 0.5826)^2/3 days.
OVERSHOOT = 0.5826


def _walk(seed: int, n: int = 100_000) -> LogSeries:
    return rebuild_index(gen_gaussian_returns(n, SIGMA, RngStream(master_seed=seed)), 0.0)


def _level(rho: float) -> ReturnLevel:
    return ReturnLevel(k=rho / SIGMA, sigma=SIGMA, rho=rho)


def test_first_passage_examples():
    up = LogSeries(s=[0.0, 0.02, 0.01, 0.06])
    assert first_passage(up, 0, _level(0.05), 100) == 3
    down = LogSeries(s=[0.0, -0.02, -0.06])
    assert first_passage(down, 0, _level(-0.05), 100) == 2
    flat = LogSeries(s=[0.0, 0.01, 0.02, 0.03])
    assert first_passage(flat, 0, _level(0.05), 100) is None


def test_first_passage_respects_tau_max():
    s = LogSeries(s=[0.0, 0.01, 0.02, 0.06])
    assert first_passage(s, 0, _level(0.05), 2) is None
    assert first_passage(s, 0, _level(0.05), 3) == 3


def test_first_passage_rejects_bad_start():
    with pytest.raises(IndexRangeError):
        first_passage(LogSeries(s=[0.0, 1.0]), 2, _level(0.05), 10)


def test_staircase(staircase):
    d = fpt_distribution(staircase, _level(0.05), 100)
    assert d.counts == {5: 15}
    assert d.censored == 4
    assert d.total_starts == len(staircase) - 1


def test_conservation_and_worker_independence():
    s = _walk(11, n=5000)
    level = _level(0.03)
    one = fpt_distribution(s, level, 200, workers=1)
    two = fpt_distribution(s, level, 200, workers=2)
    assert one.n_passages + one.censored == one.total_starts
    assert one == two


def test_merge_distributions_adds_counts():
    level = _level(0.03)
    a = fpt_distribution(_walk(1, 2000), level, 100)
    b = fpt_distribution(_walk(2, 2000), level, 100)
    merged = merge_distributions([a, b])
    np.testing.assert_array_equal(merged.dense(), a.dense() + b.dense())
    assert merged.total_starts == a.total_starts + b.total_starts
    with pytest.raises(DataValidationError):
        merge_distributions([a, fpt_distribution(_walk(3, 2000), level, 50)])


def test_distribution_rejects_broken_conservation():
    with pytest.raises(ValueError):
        FptDistribution(counts={3: 2}, total_starts=5, censored=1, tau_max=10)


def test_moving_sum():
    counts = np.array([0, 1, 2, 3, 0])
    np.testing.assert_array_equal(moving_sum(counts, 3), [1, 3, 6, 5, 3])
    np.testing.assert_array_equal(moving_sum(counts, 1), counts)
    with pytest.raises(DataValidationError):
        moving_sum(counts, 2)


def test_mode_tau_examples():
    d = FptDistribution(counts={3: 10, 4: 2}, total_starts=12, censored=0, tau_max=10)
    assert mode_tau(d, 1) == 3
    assert mode_tau(d, 3) == 3
    tie = FptDistribution(counts={3: 5, 7: 5}, total_starts=10, censored=0, tau_max=10)
    assert mode_tau(tie, 1) == 3


def test_mode_of_empty_distribution():
    with pytest.raises(DataValidationError):
        mode_tau(FptDistribution(counts={}, total_starts=4, censored=4, tau_max=10))


def test_gaussian_walk_mode_matches_brownian_oracle():
    level = _level(5 * SIGMA)
    d = merge_distributions([fpt_distribution(_walk(seed), level, 1000) for seed in range(20)])
    expected = (5 + OVERSHOOT) ** 2 / 3
    assert abs(mode_tau(d, 3) - expected) <= 2


def test_gaussian_walk_tail_exponent():
    level = _level(5 * SIGMA)
    d = merge_distributions([fpt_distribution(_walk(100 + seed), level, 2000) for seed in range(16)])
    fit = tail_exponent(d, 50, 2000)
    assert fit.value == pytest.approx(1.5, abs=0.15)


def test_mode_grows_with_level():
    s = _walk(7)
    points = horizon_scan(s, SIGMA, [2.0, 3.0, 4.0, 5.0, 6.0], 1000)
    taus = [p.tau_star for p in points]
    assert taus == sorted(taus)


def test_brownian_pdf_peaks_at_mode():
    rho, D = 0.05, SIGMA**2 / 2
    peak = brownian_mode(rho, D)
    assert peak == pytest.approx(25 / 3)
    at_peak = brownian_fpt_pdf(rho, D, peak)
    for dt in (-1.0, -0.1, 0.1, 1.0):
        assert brownian_fpt_pdf(rho, D, peak + dt) < at_peak


def test_brownian_pdf_sign_symmetry():
    taus = np.linspace(0.5, 200, 50)
    np.testing.assert_array_equal(brownian_fpt_pdf(0.05, 5e-5, taus), brownian_fpt_pdf(-0.05, 5e-5, taus))


def test_brownian_pdf_is_normalized():
    pdf = lambda t: brownian_fpt_pdf(0.05, 5e-5, t)
    head, _ = integrate.quad(pdf, 0, 100, epsabs=1e-12, epsrel=1e-12, limit=500)
    tail, _ = integrate.quad(pdf, 100, np.inf, epsabs=1e-12, epsrel=1e-12, limit=500)
    total = head + tail
    assert total == pytest.approx(1.0, abs=1e-6)


def test_brownian_pdf_domain():
    with pytest.raises(DataValidationError):
        brownian_fpt_pdf(0.05, 0.0, 1.0)
    with pytest.raises(DataValidationError):
        brownian_fpt_pdf(0.0, 1.0, 1.0)


def test_tail_exponent_recovers_planted_slope():
    taus = np.arange(1001)
    counts = np.zeros(1001, dtype=np.int64)
    counts[1:] = np.round(1e12 / taus[1:] ** 2.0).astype(np.int64)
    d = from_dense(counts, int(counts.sum()), 0, 1000)
    assert tail_exponent(d, 20, 1000).value == pytest.approx(2.0, abs=0.01)


def test_tail_exponent_needs_populated_bins():
    d = FptDistribution(counts={7: 100}, total_starts=100, censored=0, tau_max=1000)
    with pytest.raises(FitError):
        tail_exponent(d, 1, 1000)


def test_gamma_scaling_planted_square_law():
    levels = [(rho, 3.0e4 * rho**2) for rho in (0.035, 0.04, 0.05, 0.06, 0.07)]
    fit = gamma_scaling(levels, 0.03)
    assert fit.value == pytest.approx(2.0, abs=0.01)


def test_gamma_scaling_needs_three_levels():
    with pytest.raises(FitError):
        gamma_scaling([(0.05, 8.0), (0.06, 12.0), (0.02, 1.0)], 0.03)


def test_gamma_by_sign_fits_each_sign():
    s = _walk(9)
    points = horizon_scan(s, SIGMA, [4.0, 5.0, 6.0, 7.0, -4.0, -5.0, -6.0, -7.0], 1000)
    fits = gamma_by_sign(points, 3.0)
    assert set(fits) == {1, -1}
    assert fits[1].value > 1.0 and fits[-1].value > 1.0


def test_distribution_table():
    d = FptDistribution(counts={2: 1, 5: 3}, total_starts=6, censored=2, tau_max=10)
    assert distribution_table(d) == [
        {"tau": 2, "count": 1, "probability": 0.25},
        {"tau": 5, "count": 3, "probability": 0.75},
    ]
