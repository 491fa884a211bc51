from datetime import date
from enum import Enum
from pathlib import Path
from typing import Annotated, Optional

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_validator,
    model_validator,
)


def _as_float_array(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64).reshape(-1)
    arr.flags.writeable = False
    return arr


def _as_int_array(value) -> np.ndarray:
    arr = np.array(value, dtype=np.int64)
    arr.flags.writeable = False
    return arr


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]
IntArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_int_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]

_frozen = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ---------------------------------------------------------------- market data


class CsvSchema(BaseModel):
    date_column: str = Field(default="date", min_length=1)
    close_column: str = Field(default="close", min_length=1)
    date_format: str = "%Y-%m-%d"

    model_config = ConfigDict(frozen=True)


class PriceSeries(BaseModel):
    """Dated daily closing values, one row per trading day."""

    dates: tuple[date, ...]
    close: FloatArray
    label: str = ""

    model_config = _frozen

    @model_validator(mode="after")
    def check_invariants(self):
        if len(self.dates) != len(self.close):
            raise ValueError("dates and close must have equal length")
        if len(self.dates) < 2:
            raise ValueError("a price series needs at least 2 rows")
        if not np.all(np.isfinite(self.close)) or np.any(self.close <= 0):
            raise ValueError("all closing prices must be finite and positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.dates)


class LogSeries(BaseModel):
    """s(t) = ln S(t) per trading day."""

    s: FloatArray
    origin: Optional[date] = None
    label: str = ""

    model_config = _frozen

    @field_validator("s")
    @classmethod
    def check_finite(cls, value: np.ndarray) -> np.ndarray:
        if len(value) < 1:
            raise ValueError("a log series needs at least one value")
        if not np.all(np.isfinite(value)):
            raise ValueError("log series values must be finite")
        return value

    def __len__(self) -> int:
        return len(self.s)


class ReturnSeries(BaseModel):
    """Daily log-returns r(t) = s(t+1) - s(t)."""

    r: FloatArray
    sigma_cache: Optional[float] = None
    label: str = ""

    model_config = _frozen

    @field_validator("r")
    @classmethod
    def check_finite(cls, value: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(value)):
            raise ValueError("returns must be finite")
        return value

    def __len__(self) -> int:
        return len(self.r)


class ReturnHistogram(BaseModel):
    """Normalized density of |r| for one sign of the daily returns."""

    sign: int
    centers: FloatArray
    density: FloatArray
    counts: IntArray
    n: int

    model_config = _frozen


class ReturnMoments(BaseModel):
    n: int
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float


class ReturnComparison(BaseModel):
    first: ReturnMoments
    second: ReturnMoments
    ks_statistic: float
    ks_pvalue: float


# ---------------------------------------------------------------- synthetic data


class SynthKind(str, Enum):
    gaussian = "gaussian"
    student_t = "student_t"
    drop_rebound = "drop_rebound"


class SynthSpec(BaseModel):
    kind: SynthKind
    n: int = Field(ge=2)
    sigma: float = Field(default=0.01, gt=0)
    nu: float = Field(default=3.0, gt=2)
    scale: float = Field(default=0.01, gt=0)
    drop_magnitude: float = Field(default=0.05, gt=0)
    rebound_len: int = Field(default=10, ge=1)
    drop_prob: float = Field(default=0.02, ge=0, lt=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    model_config = ConfigDict(frozen=True)


class RngStream(BaseModel):
    """
    Identifies one reproducible random stream.

    The same (master_seed, stream_key) always yields the same sequence, on any
    platform and under any worker schedule.
    """

    master_seed: int = Field(ge=0, lt=2**64)
    stream_key: tuple[int, ...] = ()

    model_config = ConfigDict(frozen=True)

    @field_validator("stream_key")
    @classmethod
    def check_key(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(k < 0 for k in value):
            raise ValueError("stream key entries must be non-negative")
        return value

    def child(self, *keys: int) -> "RngStream":
        return RngStream(master_seed=self.master_seed, stream_key=self.stream_key + tuple(keys))


# ---------------------------------------------------------------- inverse statistics


class ReturnLevel(BaseModel):
    k: float
    sigma: float = Field(gt=0)
    rho: float

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_rho(self):
        if self.rho == 0 or not np.isfinite(self.rho):
            raise ValueError("return level must be finite and nonzero")
        return self

    @classmethod
    def from_k(cls, k: float, sigma: float) -> "ReturnLevel":
        return cls(k=k, sigma=sigma, rho=k * sigma)

    @property
    def sign(self) -> int:
        return 1 if self.rho > 0 else -1

    def mirrored(self) -> "ReturnLevel":
        return ReturnLevel(k=-self.k, sigma=self.sigma, rho=-self.rho)


class FptDistribution(BaseModel):
    """Histogram of first-passage waiting times, in trading days."""

    counts: dict[int, int]
    total_starts: int = Field(ge=0)
    censored: int = Field(ge=0)
    tau_max: int = Field(ge=1)
    level: Optional[ReturnLevel] = None

    model_config = ConfigDict(frozen=True)

    @field_validator("counts")
    @classmethod
    def drop_empty(cls, value: dict[int, int]) -> dict[int, int]:
        if any(c < 0 for c in value.values()):
            raise ValueError("counts must be non-negative")
        return {tau: c for tau, c in sorted(value.items()) if c > 0}

    @model_validator(mode="after")
    def check_conservation(self):
        if any(tau < 1 or tau > self.tau_max for tau in self.counts):
            raise ValueError("waiting times must lie in [1, tau_max]")
        if self.n_passages + self.censored != self.total_starts:
            raise ValueError("sum(counts) + censored must equal total_starts")
        return self

    @property
    def n_passages(self) -> int:
        return sum(self.counts.values())

    def dense(self) -> np.ndarray:
        """Counts indexed by tau, index 0 always empty."""
        out = np.zeros(self.tau_max + 1, dtype=np.int64)
        for tau, c in self.counts.items():
            out[tau] = c
        return out

    def probabilities(self) -> dict[int, float]:
        total = self.n_passages
        if total == 0:
            return {}
        return {tau: c / total for tau, c in self.counts.items()}


class FitResult(BaseModel):
    """Fitted exponent or time constant with its diagnostics."""

    value: float
    stderr: float
    fit_range: tuple[float, float]
    residual_norm: float
    n_points: int = Field(ge=3)
    intercept: float = 0.0
    r_squared: float = 0.0

    @model_validator(mode="after")
    def check_range(self):
        if not self.fit_range[0] < self.fit_range[1]:
            raise ValueError("fit range must satisfy lo < hi")
        return self


class HorizonPoint(BaseModel):
    """Optimal horizon at one return level; T is None for the unshuffled index."""

    level: ReturnLevel
    tau_star: float
    censored_frac: float
    T: Optional[int] = None
    n_p: int = 1


class LinearFit(BaseModel):
    slope: float
    intercept: float
    slope_stderr: float
    intercept_stderr: float
    r_squared: float = Field(ge=0, le=1)
    n: int = Field(ge=3)


# ---------------------------------------------------------------- shuffling


class WindowPartition(BaseModel):
    """
    Tiling of a return series into T-day blocks.

    A leading block of ``offset`` days and a trailing remainder may be shorter
    than T; every interior block has length exactly T.
    """

    T: int = Field(ge=1)
    offset: int = Field(ge=0)
    n: int = Field(ge=1)
    block_bounds: IntArray

    model_config = _frozen

    @model_validator(mode="after")
    def check_tiling(self):
        bounds = self.block_bounds
        if bounds.ndim != 2 or bounds.shape[1] != 2 or len(bounds) == 0:
            raise ValueError("block_bounds must be a non-empty (k, 2) array")
        if bounds[0, 0] != 0 or bounds[-1, 1] != self.n:
            raise ValueError("blocks must cover [0, n)")
        if np.any(bounds[1:, 0] != bounds[:-1, 1]):
            raise ValueError("blocks must be contiguous")
        lengths = bounds[:, 1] - bounds[:, 0]
        if np.any(lengths <= 0) or np.any(lengths > self.T):
            raise ValueError("block lengths must lie in [1, T]")
        if len(lengths) > 2 and np.any(lengths[1:-1] != self.T):
            raise ValueError("interior blocks must have length T")
        return self

    @property
    def lengths(self) -> np.ndarray:
        return self.block_bounds[:, 1] - self.block_bounds[:, 0]

    def __len__(self) -> int:
        return len(self.block_bounds)


class SweepCell(BaseModel):
    """Permutation-averaged optimal horizons for one (T, |rho|) cell."""

    T: int = Field(ge=1)
    level: ReturnLevel
    n_p: int = Field(ge=1)
    tau_star_plus: float = Field(ge=1)
    tau_star_minus: float = Field(ge=1)
    dispersion_plus: float = Field(ge=0)
    dispersion_minus: float = Field(ge=0)
    censored_frac_plus: float = Field(ge=0, le=1)
    censored_frac_minus: float = Field(ge=0, le=1)
    hist_plus: Optional[FptDistribution] = None
    hist_minus: Optional[FptDistribution] = None

    @property
    def k(self) -> float:
        return abs(self.level.k)


# ---------------------------------------------------------------- asymmetry


class AsymmetryPoint(BaseModel):
    T: int
    w: float
    w_plus: float
    w_minus: float
    delta_tau: float


class AsymmetryCurve(BaseModel):
    level: ReturnLevel
    points: list[AsymmetryPoint]
    tau_star_inf_plus: float
    tau_star_inf_minus: float
    tau_star_1_plus: float
    tau_star_1_minus: float
    T_inf: int = 1000
    label: str = ""

    @model_validator(mode="after")
    def check_points(self):
        ts = [p.T for p in self.points]
        if ts != sorted(ts):
            raise ValueError("points must be sorted by T")
        if not all(np.isfinite(p.w) for p in self.points):
            raise ValueError("w(T) must be finite")
        if self.T_inf not in ts:
            raise ValueError("T_inf must be one of the curve's window lengths")
        return self

    @property
    def tau_star_1(self) -> float:
        return 0.5 * (self.tau_star_1_plus + self.tau_star_1_minus)

    @property
    def delta_tau_inf(self) -> float:
        return self.tau_star_inf_plus - self.tau_star_inf_minus


class ThetaFit(BaseModel):
    theta: float = Field(gt=0)
    fit_range_T: tuple[int, int]
    stderr: float
    n_points: int
    n_excluded: int = 0
    k: float = 0.0


class EraResult(BaseModel):
    label: str
    start: date
    end: date
    n_days: int
    sigma: float
    curves: list[AsymmetryCurve] = []
    thetas: list[ThetaFit] = []
    flags: list[str] = []


class EraReport(BaseModel):
    boundary: date
    eras: list[EraResult]
    returns: ReturnComparison


# ---------------------------------------------------------------- leverage


class LeverageCurve(BaseModel):
    dt: int = 1
    taus: list[int]
    values: list[float]
    stderr: list[float]
    n_terms: list[int]
    reliable: list[bool]

    @model_validator(mode="after")
    def check_lengths(self):
        n = len(self.taus)
        if not all(len(x) == n for x in (self.values, self.stderr, self.n_terms, self.reliable)):
            raise ValueError("leverage fields must have equal lengths")
        if any(t <= 0 for t in self.n_terms):
            raise ValueError("every reported lag needs at least one term")
        if not all(np.isfinite(v) for v in self.values):
            raise ValueError("leverage values must be finite")
        return self

    def value_at(self, tau: int) -> float:
        return self.values[self.taus.index(tau)]


# ---------------------------------------------------------------- CLI


class Command(str, Enum):
    ingest = "ingest"
    synth = "synth"
    fpt = "fpt"
    sweep = "sweep"
    asymmetry = "asymmetry"
    leverage = "leverage"
    era = "era"
    report = "report"


class SignChoice(str, Enum):
    plus = "plus"
    minus = "minus"
    both = "both"

    def signs(self) -> tuple[int, ...]:
        return {"plus": (1,), "minus": (-1,), "both": (1, -1)}[self.value]


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"
    both = "both"


class RunConfig(BaseModel):
    """Everything one CLI invocation needs; recorded verbatim in the manifest."""

    command: Command
    inputs: list[Path] = []
    csv_schema: CsvSchema = CsvSchema()
    t_grid: list[int] = []
    k_grid: list[float] = []
    scan_k_grid: list[float] = []
    n_p: int = Field(default=1000, ge=1)
    tau_max: int = Field(default=1000, ge=1)
    smooth: int = Field(default=3, ge=1)
    t_inf: int = Field(default=1000, ge=1)
    theta_t_hi: int = Field(default=30, ge=2)
    master_seed: int = Field(default=0, ge=0, lt=2**64)
    era_boundary: Optional[date] = None
    sign: SignChoice = SignChoice.both
    tau_lo: int = -50
    tau_hi: int = 50
    output_dir: Path = Path("results")
    output_format: OutputFormat = OutputFormat.both
    workers: int = Field(default=1, ge=1)
    synth: Optional[SynthSpec] = None
    synth_origin: date = date(1928, 10, 1)
    synth_s0: float = Field(default=100.0, gt=0)
    tail_lo: int = Field(default=50, ge=1)
    tail_hi: Optional[int] = Field(default=None, ge=2)
    histograms: bool = False

    @field_validator("t_grid")
    @classmethod
    def check_t_grid(cls, value: list[int]) -> list[int]:
        if any(t < 1 for t in value):
            raise ValueError("window lengths must be >= 1")
        return sorted(set(value))

    @field_validator("k_grid", "scan_k_grid")
    @classmethod
    def check_k_grid(cls, value: list[float]) -> list[float]:
        if any(k == 0 for k in value):
            raise ValueError("levels must be nonzero")
        return value

    @field_validator("smooth")
    @classmethod
    def check_smooth(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("smoothing width must be odd")
        return value

    @model_validator(mode="after")
    def check_command_inputs(self):
        if self.command != Command.synth and not self.inputs:
            raise ValueError(f"command '{self.command.value}' needs at least one --input")
        if self.command == Command.synth and self.synth is None:
            raise ValueError("synth needs a synthetic series specification")
        if self.tau_lo > self.tau_hi:
            raise ValueError("tau_lo must not exceed tau_hi")
        return self
