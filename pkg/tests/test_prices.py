from datetime import date

import numpy as np
import pytest

from src.errors import CsvParseError, DataIOError, DataValidationError
from src.repository.prices import PriceRepository, load_csv
from src.schemas import CsvSchema
from tests.conftest import make_prices


def test_two_rows(write_csv):
    p = load_csv(write_csv("date,close\n1928-10-01,240.01\n1928-10-02,242.06\n"))
    assert len(p) == 2
    assert p.dates == (date(1928, 10, 1), date(1928, 10, 2))
    np.testing.assert_array_equal(p.close, [240.01, 242.06])
    assert p.label == "prices"


def test_rows_are_sorted(write_csv):
    p = load_csv(write_csv("date,close\n2000-01-05,3\n2000-01-03,1\n2000-01-04,2\n"))
    np.testing.assert_array_equal(p.close, [1.0, 2.0, 3.0])


def test_zero_price(write_csv):
    with pytest.raises(DataValidationError, match="line 3"):
        load_csv(write_csv("date,close\n2000-01-03,1\n2000-01-04,0\n"))


def test_duplicate_date(write_csv):
    with pytest.raises(DataValidationError, match="duplicate"):
        load_csv(write_csv("date,close\n2000-01-03,1\n2000-01-04,2\n2000-01-03,3\n"))


def test_malformed_rows_report_their_line(write_csv):
    with pytest.raises(CsvParseError) as info:
        load_csv(write_csv("date,close\n2000-01-03,1\n2000-01-04,abc\n"))
    assert info.value.line == 3
    with pytest.raises(CsvParseError) as info:
        load_csv(write_csv("date,close\n2000-13-03,1\n2000-01-04,2\n"))
    assert info.value.line == 2


def test_missing_column(write_csv):
    with pytest.raises(CsvParseError, match="close"):
        load_csv(write_csv("date,price\n2000-01-03,1\n2000-01-04,2\n"))


def test_missing_file(tmp_path):
    with pytest.raises(DataIOError):
        load_csv(tmp_path / "absent.csv")


def test_custom_schema_ignores_extra_columns(write_csv):
    text = "Date,Open,Close\n03/01/2000,1,10\n04/01/2000,1,11\n"
    p = load_csv(write_csv(text), CsvSchema(date_column="Date", close_column="Close", date_format="%d/%m/%Y"))
    assert p.dates == (date(2000, 1, 3), date(2000, 1, 4))
    np.testing.assert_array_equal(p.close, [10.0, 11.0])


def test_written_series_loads_back_exactly(tmp_path):
    p = make_prices([100.0, 101.123456789012345, 99.87654321], label="x")
    repo = PriceRepository()
    path = repo.write_csv(p, tmp_path / "x.csv")
    back = repo.load_csv(path)
    assert back.dates == p.dates
    np.testing.assert_array_equal(back.close, p.close)


def test_blank_lines_are_skipped_but_counted(write_csv):
    p = load_csv(write_csv("date,close\n2000-01-03,1\n\n2000-01-04,2\n\n"))
    np.testing.assert_array_equal(p.close, [1.0, 2.0])
    with pytest.raises(CsvParseError) as info:
        load_csv(write_csv("date,close\n2000-01-03,1\n\n2000-01-04,2\n\n2000-01-05,abc\n"))
    assert info.value.line == 6
    with pytest.raises(DataValidationError, match="line 4"):
        load_csv(write_csv("date,close\n\n2000-01-03,1\n2000-01-04,-1\n"))
