import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.errors import CsvParseError, DataIOError, DataValidationError
from src.schemas import CsvSchema, PriceSeries

logger = logging.getLogger(__name__)

# first data row sits on line 2, under the header
_HEADER_LINES = 2


class PriceRepository:
    def __init__(self, schema: CsvSchema = CsvSchema()):
        self.schema = schema

    def load_csv(self, path: Path, label: Optional[str] = None) -> PriceSeries:
        """
        Reads a daily close series; extra columns are ignored.

        Rows are sorted ascending by date after parsing and blank lines are
        skipped. Unparseable rows raise CsvParseError with the file line number.
        """
        path = Path(path)
        frame = self._read(path)
        for column in (self.schema.date_column, self.schema.close_column):
            if column not in frame.columns:
                raise CsvParseError(f"missing column '{column}' in {path}", line=1)

        # blank lines are read as empty rows so that positions keep matching file lines
        blank = frame.isna().all(axis=1).to_numpy()
        lines = np.flatnonzero(~blank) + _HEADER_LINES
        frame = frame[~blank]

        raw_dates = frame[self.schema.date_column]
        raw_close = frame[self.schema.close_column]
        dates = pd.to_datetime(raw_dates, format=self.schema.date_format, errors="coerce")
        close = pd.to_numeric(raw_close, errors="coerce")

        bad_date = dates.isna()
        if bad_date.any():
            i = int(np.argmax(bad_date.to_numpy()))
            raise CsvParseError(f"unparseable date {raw_dates.iloc[i]!r}", line=int(lines[i]))
        bad_close = close.isna()
        if bad_close.any():
            i = int(np.argmax(bad_close.to_numpy()))
            raise CsvParseError(f"unparseable close {raw_close.iloc[i]!r}", line=int(lines[i]))
        non_positive = (close <= 0).to_numpy() | ~np.isfinite(close.to_numpy())
        if non_positive.any():
            i = int(np.argmax(non_positive))
            raise DataValidationError(f"line {lines[i]}: close must be positive, got {raw_close.iloc[i]}")
        dup = dates.duplicated()
        if dup.any():
            i = int(np.argmax(dup.to_numpy()))
            raise DataValidationError(f"line {lines[i]}: duplicate date {dates.iloc[i].date()}")

        # exact decimal parse, the coerced column above only finds bad cells
        values = raw_close.astype(np.float64).to_numpy()
        order = np.argsort(dates.to_numpy(), kind="stable")
        try:
            series = PriceSeries(
                dates=tuple(d.date() for d in dates.iloc[order]),
                close=values[order],
                label=label if label is not None else path.stem,
            )
        except ValidationError as e:
            raise DataValidationError(f"{path}: {e.errors()[0]['msg']}") from e
        logger.info("Loaded %d rows from %s (%s .. %s)", len(series), path, series.dates[0], series.dates[-1])
        return series

    def _read(self, path: Path) -> pd.DataFrame:
        if not path.is_file():
            raise DataIOError(f"price file not found: {path}")
        try:
            return pd.read_csv(path, dtype=str, skipinitialspace=True, skip_blank_lines=False)
        except pd.errors.EmptyDataError as e:
            raise CsvParseError(f"{path} is empty", line=1) from e
        except pd.errors.ParserError as e:
            raise CsvParseError(f"{path}: {e}") from e
        except (OSError, UnicodeDecodeError) as e:
            raise DataIOError(f"cannot read {path}: {e}") from e

    def write_csv(self, p: PriceSeries, path: Path) -> Path:
        """Writes ``date,close`` in the repository's own schema."""
        path = Path(path)
        frame = pd.DataFrame(
            {
                self.schema.date_column: [d.strftime(self.schema.date_format) for d in p.dates],
                self.schema.close_column: p.close,
            }
        )
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        except OSError as e:
            raise DataIOError(f"cannot write {path}: {e}") from e
        logger.info("Wrote %d rows to %s", len(p), path)
        return path


def load_csv(path: Path, schema: CsvSchema = CsvSchema()) -> PriceSeries:
    return PriceRepository(schema).load_csv(path)
