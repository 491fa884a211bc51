import logging

from src.commands.utils import add_fpt_args, add_input_args, add_output_args, float_list, load_series
from src.conf.config import defaults
from src.errors import FitError
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig
from src.services.inverse_stats import gamma_by_sign, horizon_scan
from src.services.shuffler import shuffled_horizon_scan

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "report", help="optimal horizon against level for the original and the fully shuffled index"
    )
    add_input_args(parser, many=True)
    add_fpt_args(parser)
    parser.add_argument("--k", dest="scan_k_grid", type=float_list, default=list(defaults.SCAN_K_GRID),
                        help="comma-separated level magnitudes in units of sigma")
    parser.add_argument("--n-p", "--np", dest="n_p", type=int, default=defaults.N_PERMUTATIONS)
    add_output_args(parser)
    parser.set_defaults(command=Command.report.value)


def _gammas(points, min_k: float, flags: list[str], what: str) -> dict:
    try:
        fits = gamma_by_sign(points, min_k)
    except FitError as e:
        logger.warning("No gamma for the %s index: %s", what, e.detail)
        flags.append(f"{what}: {e.detail}")
        return {}
    return {"plus": fits[1], "minus": fits[-1]}


def handle(config: RunConfig, writer: ReportWriter) -> None:
    """
    tau* against |rho| for the original and the T=1 shuffled index, with gamma
    fitted above ``GAMMA_MIN_K`` sigma for each sign.
    """
    k_grid = sorted({abs(k) for k in config.scan_k_grid})
    for path in config.inputs:
        series = load_series(config, path)
        label = series.label
        original = horizon_scan(series.log, series.sigma, k_grid + [-k for k in k_grid], config.tau_max,
                                config.smooth, workers=config.workers)
        shuffled = shuffled_horizon_scan(series.returns, k_grid, config.n_p, config.tau_max, config.smooth,
                                         config.master_seed, T=1, workers=config.workers, sigma=series.sigma)
        writer.horizons(f"{label}_horizons_original", original, label)
        writer.horizons(f"{label}_horizons_shuffled", shuffled, label, {"T": 1, "n_p": config.n_p})

        flags: list[str] = []
        gammas = {
            "original": _gammas(original, defaults.GAMMA_MIN_K, flags, "original"),
            "shuffled": _gammas(shuffled, defaults.GAMMA_MIN_K, flags, "shuffled"),
        }
        writer.json(f"{label}_gamma", {"label": label, "sigma": series.sigma, "fit_min_k": defaults.GAMMA_MIN_K,
                                       "gamma": gammas, "flags": flags})
        for what, fits in gammas.items():
            for sign, fit in fits.items():
                print(f"{label} {what} {sign}: gamma={fit.value:.3f} +/- {fit.stderr:.3f}")
