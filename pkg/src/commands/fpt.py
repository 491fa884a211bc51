import logging

from src.commands.utils import add_fpt_args, add_input_args, add_output_args, add_sign_arg, float_list, load_series
from src.conf.config import defaults
from src.errors import FitError
from src.repository.reports import ReportWriter, level_suffix
from src.schemas import Command, ReturnLevel, RunConfig
from src.services.inverse_stats import brownian_mode, fpt_distribution, mode_tau, tail_exponent

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("fpt", help="first-passage distributions of the unshuffled index")
    add_input_args(parser, many=True)
    add_fpt_args(parser)
    add_sign_arg(parser)
    parser.add_argument("--k", dest="k_grid", type=float_list, default=list(defaults.K_GRID),
                        help="comma-separated level magnitudes in units of sigma")
    parser.add_argument("--tail-lo", type=int, default=50)
    parser.add_argument("--tail-hi", type=int, default=None, help="defaults to tau_max")
    add_output_args(parser)
    parser.set_defaults(command=Command.fpt.value)


def handle(config: RunConfig, writer: ReportWriter) -> None:
    """
    One distribution per level and sign, plus a summary with the mode, the
    Brownian reference mode and the tail exponent.
    """
    tail_hi = config.tail_hi or config.tau_max
    for path in config.inputs:
        series = load_series(config, path)
        label, sigma = series.label, series.sigma
        # a driftless walk with daily variance sigma^2 has D = sigma^2 / 2
        D = sigma**2 / 2.0
        levels, flags = [], []
        for k in sorted({abs(k) for k in config.k_grid}):
            for sign in config.sign.signs():
                level = ReturnLevel.from_k(sign * k, sigma)
                d = fpt_distribution(series.log, level, config.tau_max, workers=config.workers)
                writer.distribution(f"{label}_fpt_{level_suffix(k, sign)}", d, label, config.smooth)
                entry = {
                    "k": level.k,
                    "rho": level.rho,
                    "n_passages": d.n_passages,
                    "censored": d.censored,
                    "total_starts": d.total_starts,
                    "brownian_mode": brownian_mode(level.rho, D),
                }
                if d.n_passages == 0:
                    flags.append(f"k={level.k:g}: no passages within tau_max={config.tau_max}")
                    logger.warning("%s: no passages at k=%g", label, level.k)
                    levels.append(entry)
                    continue
                entry["tau_star"] = mode_tau(d, config.smooth)
                if d.censored / d.total_starts > 0.5:
                    logger.warning("%s: %d of %d starts censored at k=%g", label, d.censored, d.total_starts, level.k)
                try:
                    entry["tail"] = tail_exponent(d, config.tail_lo, tail_hi, defaults.TAIL_BIN_RATIO)
                except FitError as e:
                    flags.append(f"k={level.k:g}: {e.detail}")
                    logger.warning("%s: no tail exponent at k=%g: %s", label, level.k, e.detail)
                levels.append(entry)
        writer.json(f"{label}_fpt_summary", {"label": label, "sigma": sigma, "levels": levels, "flags": flags})
        for entry in levels:
            if "tau_star" in entry:
                print(f"{label} k={entry['k']:+g}: tau*={entry['tau_star']} (brownian {entry['brownian_mode']:.1f})")
