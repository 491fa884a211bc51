import logging
from datetime import date

from src.commands.utils import add_input_args, add_output_args, add_sweep_args, load_series
from src.conf.config import defaults
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig
from src.services.asymmetry import era_report

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("era", help="asymmetry before and after a trading-era boundary")
    add_input_args(parser, many=True)
    add_sweep_args(parser)
    parser.add_argument("--boundary", dest="era_boundary", type=date.fromisoformat, default=defaults.ERA_BOUNDARY)
    add_output_args(parser)
    parser.set_defaults(command=Command.era.value)


def handle(config: RunConfig, writer: ReportWriter) -> None:
    boundary = config.era_boundary or defaults.ERA_BOUNDARY
    for path in config.inputs:
        series = load_series(config, path)
        report = era_report(
            series.prices,
            boundary,
            config.t_grid,
            config.k_grid,
            config.n_p,
            config.tau_max,
            config.smooth,
            config.t_inf,
            config.theta_t_hi,
            config.master_seed,
            min_days=defaults.MIN_ERA_DAYS,
            workers=config.workers,
        )
        writer.era(f"{series.label}_era", report)
        for era in report.eras:
            thetas = ", ".join(f"k={f.k:g}: {f.theta:.2f}" for f in era.thetas) or "none"
            print(f"{era.label}: sigma={era.sigma:.6f} theta [{thetas}]")
        print(f"KS statistic between eras: {report.returns.ks_statistic:.4f} (p={report.returns.ks_pvalue:.3g})")
