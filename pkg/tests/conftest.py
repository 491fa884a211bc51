import os
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from src.schemas import LogSeries, PriceSeries, ReturnSeries, RngStream
from src.services.synth import gen_gaussian_returns, gen_student_t_returns

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def stream() -> RngStream:
    return RngStream(master_seed=12345, stream_key=(1,))


@pytest.fixture
def gaussian_returns(stream) -> ReturnSeries:
    return gen_gaussian_returns(5000, 0.01, stream)


@pytest.fixture
def stt_returns() -> ReturnSeries:
    return gen_student_t_returns(5000, 3.0, 0.01, RngStream(master_seed=777, stream_key=(1,)))


@pytest.fixture
def staircase() -> LogSeries:
    return LogSeries(s=0.01 * np.arange(20))


def make_prices(close, start: date = date(2000, 1, 3), label: str = "test") -> PriceSeries:
    dates = tuple(start + timedelta(days=i) for i in range(len(close)))
    return PriceSeries(dates=dates, close=np.asarray(close, dtype=np.float64), label=label)


@pytest.fixture
def write_csv(tmp_path):
    """Writes raw CSV text and returns its path."""

    def _write(text: str, name: str = "prices.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture(scope="session")
def djia_csv() -> Path:
    path = Path(os.environ.get("INVSTATS_DJIA_CSV", DATA_DIR / "djia.csv"))
    if not path.is_file():
        pytest.skip(f"DJIA daily close file not found at {path}; set INVSTATS_DJIA_CSV to run")
    return path
