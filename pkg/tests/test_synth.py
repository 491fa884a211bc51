import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from src.errors import DataValidationError
from src.schemas import RngStream, SynthKind, SynthSpec
from src.services.synth import (
    drop_positions,
    gen_drop_rebound_returns,
    gen_gaussian_returns,
    gen_student_t_returns,
    generate,
    generator,
)


def test_same_stream_same_series(stream):
    a = gen_gaussian_returns(10, 0.01, stream)
    b = gen_gaussian_returns(10, 0.01, stream)
    assert a.r.tobytes() == b.r.tobytes()


def test_streams_are_independent_of_consumption_order():
    root = RngStream(master_seed=99)
    first = generator(root.child(1)).random(5)
    generator(root.child(2)).random(1000)
    again = generator(root.child(1)).random(5)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, generator(root.child(2)).random(5))


def test_gaussian_sample_std():
    r = gen_gaussian_returns(1_000_000, 0.01, RngStream(master_seed=1))
    assert np.std(r.r, ddof=1) == pytest.approx(0.01, abs=1e-4)


def test_student_t_needs_finite_variance():
    with pytest.raises(DataValidationError):
        gen_student_t_returns(100, 2.0, 0.01, RngStream(master_seed=1))
    with pytest.raises(ValidationError):
        SynthSpec(kind=SynthKind.student_t, n=100, nu=1.5)


def test_student_t_sample_std():
    r = gen_student_t_returns(20000, 3.0, 0.01, RngStream(master_seed=2))
    # scale * sqrt(nu / (nu - 2)) = 0.0173
    assert np.std(r.r, ddof=1) == pytest.approx(0.018, abs=0.003)


def test_student_t_kurtosis_falls_with_nu():
    kurt = [
        stats.kurtosis(gen_student_t_returns(100_000, nu, 1.0, RngStream(master_seed=3)).r)
        for nu in (3.0, 10.0, 100.0)
    ]
    assert kurt[0] > kurt[1] > kurt[2]


def test_drop_rebound_without_drops_is_gaussian():
    s = RngStream(master_seed=4)
    plain = gen_gaussian_returns(500, 0.01, s)
    dr = gen_drop_rebound_returns(500, 0.01, 0.05, 10, 0.0, s)
    np.testing.assert_array_equal(plain.r, dr.r)


def test_drop_rebound_blocks_net_to_zero():
    r = gen_drop_rebound_returns(20000, 0.01, 0.05, 10, 0.02, RngStream(master_seed=5))
    drops = drop_positions(r, 0.05)
    assert len(drops) > 100
    for t in drops:
        block = r.r[t : t + 11]
        np.testing.assert_allclose(block[1:], 0.005)
        assert block.sum() == pytest.approx(0.0, abs=1e-12)
    # no drop starts inside an active rebound
    assert np.all(np.diff(drops) >= 11)


def test_generate_dispatches_on_kind():
    spec = SynthSpec(kind=SynthKind.drop_rebound, n=1000, seed=8)
    r = generate(spec)
    assert len(r) == 1000
    assert r.label == "drop_rebound"
    assert generate(spec).r.tobytes() == r.r.tobytes()
