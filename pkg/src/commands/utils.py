"""Arguments and helpers shared by the subcommands."""

import argparse
import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError

from src.conf.config import defaults, get_settings
from src.errors import ConfigError
from src.repository.prices import PriceRepository
from src.schemas import LogSeries, OutputFormat, PriceSeries, ReturnSeries, RunConfig, SignChoice
from src.services.market_data import daily_returns, to_log, with_volatility

logger = logging.getLogger(__name__)


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def add_output_args(parser: argparse.ArgumentParser) -> None:
    settings = get_settings()
    parser.add_argument("--output-dir", type=Path, default=settings.OUTPUT_DIR)
    parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat],
                        default=OutputFormat.both.value)
    parser.add_argument("--workers", type=int, default=settings.WORKERS)
    parser.add_argument("--seed", dest="master_seed", type=int, default=defaults.MASTER_SEED)


def add_input_args(parser: argparse.ArgumentParser, many: bool = False) -> None:
    parser.add_argument("--input", dest="inputs", type=Path, action="append", required=True,
                        help="price CSV" + (" (repeatable)" if many else ""))
    parser.add_argument("--date-column", default="date")
    parser.add_argument("--close-column", default="close")
    parser.add_argument("--date-format", default="%Y-%m-%d")


def add_fpt_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau-max", type=int, default=defaults.TAU_MAX)
    parser.add_argument("--smooth", type=int, default=defaults.SMOOTH_WINDOW)


def add_sweep_args(parser: argparse.ArgumentParser) -> None:
    add_fpt_args(parser)
    parser.add_argument("--T", dest="t_grid", type=int_list, default=list(defaults.T_GRID),
                        help="comma-separated window lengths")
    parser.add_argument("--k", dest="k_grid", type=float_list, default=list(defaults.K_GRID),
                        help="comma-separated level magnitudes in units of sigma")
    parser.add_argument("--n-p", "--np", dest="n_p", type=int, default=defaults.N_PERMUTATIONS)
    parser.add_argument("--t-inf", type=int, default=defaults.T_INF)
    parser.add_argument("--theta-t-hi", type=int, default=defaults.THETA_T_HI)


def add_histograms_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--histograms", action="store_true",
                        help="also write the permutation-summed waiting-time histogram of every cell")


def add_sign_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sign", choices=[s.value for s in SignChoice], default=SignChoice.both.value)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """RunConfig from the parsed namespace; fields a subcommand does not define keep their defaults."""
    values = {key: value for key, value in vars(args).items() if key in RunConfig.model_fields and value is not None}
    if hasattr(args, "date_column"):
        values["csv_schema"] = {
            "date_column": args.date_column,
            "close_column": args.close_column,
            "date_format": args.date_format,
        }
    build = getattr(args, "build_config", None)
    if build is not None:
        values.update(build(args))
    try:
        return RunConfig(**values)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(part) for part in err["loc"])
        raise ConfigError(f"{where}: {err['msg']}" if where else err["msg"]) from e


class LoadedSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    prices: PriceSeries
    log: LogSeries
    returns: ReturnSeries

    @property
    def sigma(self) -> float:
        return self.returns.sigma_cache

    @property
    def label(self) -> str:
        return self.prices.label


def load_series(config: RunConfig, path: Path) -> LoadedSeries:
    prices = PriceRepository(config.csv_schema).load_csv(path)
    s = to_log(prices)
    r = with_volatility(daily_returns(s))
    logger.info("%s: %d trading days, sigma=%.6f", prices.label, len(prices), r.sigma_cache)
    return LoadedSeries(prices=prices, log=s, returns=r)
