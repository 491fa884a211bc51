import numpy as np
import pytest

from src.errors import DataValidationError
from src.schemas import ReturnSeries, RngStream
from src.services.leverage import leverage, reverse
from src.services.synth import gen_drop_rebound_returns, gen_gaussian_returns


def _brute_force(r: np.ndarray, tau: int) -> float:
    n = len(r)
    terms = [r[t + tau] ** 2 * r[t] for t in range(n) if 0 <= t + tau < n]
    return float(np.mean(terms)) / float(np.mean(r**2)) ** 2


def test_matches_direct_enumeration():
    r = gen_drop_rebound_returns(300, 0.01, 0.05, 10, 0.05, RngStream(master_seed=3))
    curve = leverage(r, -12, 12)
    for tau in (-12, -3, 0, 1, 5, 12):
        assert curve.value_at(tau) == pytest.approx(_brute_force(r.r, tau), rel=1e-10)


def test_iid_returns_have_no_leverage():
    r = gen_gaussian_returns(20000, 0.01, RngStream(master_seed=10))
    curve = leverage(r, -50, 50)
    z = np.array([abs(v) / e for t, v, e in zip(curve.taus, curve.values, curve.stderr) if t != 0])
    assert np.all(z < 4)
    assert np.mean(z < 3) >= 0.97


def test_scale_covariance():
    r = gen_gaussian_returns(2000, 0.01, RngStream(master_seed=11))
    c = 3.5
    scaled = leverage(ReturnSeries(r=c * r.r), -5, 5)
    base = leverage(r, -5, 5)
    np.testing.assert_allclose(scaled.values, np.array(base.values) / c, rtol=1e-10)


def test_time_reversal_mirrors_lags():
    r = gen_gaussian_returns(2000, 0.01, RngStream(master_seed=12))
    forward = leverage(r, -20, 20)
    backward = leverage(reverse(r), -20, 20)
    np.testing.assert_allclose(backward.values, forward.values[::-1], rtol=1e-10, atol=1e-9)
    assert backward.n_terms == forward.n_terms[::-1]


def test_planted_rebounds_follow_large_squared_returns():
    # a drop (large r^2) is followed by rebound_len positive days
    r = gen_drop_rebound_returns(20000, 0.001, 0.05, 10, 0.02, RngStream(master_seed=13))
    curve = leverage(r, -10, -1)
    for value, err in zip(curve.values, curve.stderr):
        assert value > 2 * err


def test_short_series_flags_and_omits_lags():
    r = ReturnSeries(r=np.random.default_rng(0).normal(size=150))
    curve = leverage(r, -50, 50, min_terms=120)
    assert curve.reliable[curve.taus.index(0)]
    assert not curve.reliable[curve.taus.index(40)]

    tiny = leverage(ReturnSeries(r=[0.1, -0.2, 0.3, -0.1, 0.2]), -10, 10)
    assert tiny.taus == list(range(-4, 5))
    assert min(tiny.n_terms) == 1


def test_rejects_bad_window():
    with pytest.raises(DataValidationError):
        leverage(ReturnSeries(r=[0.1, 0.2]), 5, -5)
    with pytest.raises(DataValidationError):
        leverage(ReturnSeries(r=[0.0, 0.0, 0.0]), -1, 1)
