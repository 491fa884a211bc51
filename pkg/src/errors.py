"""
Error types raised by the services and mapped to exit codes by the CLI.

Every error carries a machine-readable category, matching the exit codes:
0 ok, 2 config, 3 io, 4 data, 5 fit.
"""


class InverseStatsError(Exception):
    category = "data"
    exit_code = 4

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"category": self.category, "detail": self.detail, "exit_code": self.exit_code}


class ConfigError(InverseStatsError):
    category = "config"
    exit_code = 2


class DataIOError(InverseStatsError):
    category = "io"
    exit_code = 3


class DataValidationError(InverseStatsError, ValueError):
    category = "data"
    exit_code = 4


class CsvParseError(DataValidationError):
    def __init__(self, detail: str, line: int | None = None):
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)
        self.line = line


class IndexRangeError(DataValidationError, IndexError):
    pass


class FitError(InverseStatsError):
    category = "fit"
    exit_code = 5


class AsymmetryUndefinedError(FitError):
    """Zero denominator in w(T) or w±(T,1) for one return level."""
