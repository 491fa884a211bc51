import os
from datetime import date
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.errors import ConfigError

TOOL_NAME = "inverse-stats"
TOOL_VERSION = "0.1.0"


class Settings(BaseSettings):
    # Only these two may come from the environment
    OUTPUT_DIR: Path = Path("results")
    WORKERS: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    model_config = SettingsConfigDict(
        extra="ignore",
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="INVSTATS_",
        case_sensitive=True,
    )


class AnalysisDefaults(BaseModel):
    """
    Defaults shared by the services and the CLI.

    Levels are given in units of the daily volatility of the analysed series.
    """

    T_GRID: tuple[int, ...] = (
        1, 2, 3, 5, 7, 10, 15, 20, 25, 30, 40, 50, 75, 100, 150, 200, 300, 500, 700, 1000,
    )
    K_GRID: tuple[float, ...] = (3.0, 4.0, 5.0, 6.0, 7.0)
    SCAN_K_GRID: tuple[float, ...] = tuple(1.0 + 0.5 * i for i in range(15))
    N_PERMUTATIONS: int = 1000
    TAU_MAX: int = 1000
    SMOOTH_WINDOW: int = 3
    T_INF: int = 1000
    THETA_T_HI: int = 30
    GAMMA_MIN_K: float = 3.0
    TAIL_BIN_RATIO: float = 1.25
    ERA_BOUNDARY: date = date(1980, 1, 1)
    MIN_ERA_DAYS: int = 730
    LEVERAGE_TAU_LO: int = -50
    LEVERAGE_TAU_HI: int = 50
    LEVERAGE_MIN_TERMS: int = 100
    MASTER_SEED: int = 20110201

    # Synthetic series
    SYNTH_N: int = 20000
    SYNTH_SIGMA: float = 0.01
    SYNTH_NU: float = 3.0
    SYNTH_SCALE: float = 0.01
    SYNTH_DROP: float = 0.05
    SYNTH_REBOUND_LEN: int = 10
    SYNTH_DROP_PROB: float = 0.02
    SYNTH_ORIGIN: date = date(1928, 10, 1)
    SYNTH_S0: float = 100.0

    model_config = ConfigDict(frozen=True)


defaults = AnalysisDefaults()


@lru_cache
def get_settings() -> Settings:
    """Environment settings, read on first use; a bad value is a config error."""
    try:
        return Settings()
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(part) for part in err["loc"])
        raise ConfigError(f"{Settings.model_config['env_prefix']}{where}: {err['msg']}") from e
