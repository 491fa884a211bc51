import logging

from src.commands.utils import add_histograms_arg, add_input_args, add_output_args, add_sweep_args, load_series
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig
from src.services.shuffler import sweep

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="optimal horizons of block-shuffled indices over (T, k)")
    add_input_args(parser, many=True)
    add_sweep_args(parser)
    add_histograms_arg(parser)
    add_output_args(parser)
    parser.set_defaults(command=Command.sweep.value)


def handle(config: RunConfig, writer: ReportWriter) -> None:
    for path in config.inputs:
        series = load_series(config, path)
        cells = sweep(
            series.returns,
            config.t_grid,
            config.k_grid,
            config.n_p,
            config.tau_max,
            config.smooth,
            config.master_seed,
            s0=float(series.log.s[0]),
            workers=config.workers,
            sigma=series.sigma,
        )
        writer.sweep(f"{series.label}_sweep", cells, series.label, config.master_seed, config.smooth)
        if config.histograms:
            writer.sweep_histograms(f"{series.label}_fpt", cells, series.label, config.master_seed, config.smooth)
        print(f"{series.label}: {len(cells)} cells, n_p={config.n_p}")
