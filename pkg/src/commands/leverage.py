import logging

from src.commands.utils import add_input_args, add_output_args, load_series
from src.conf.config import defaults
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig
from src.services.leverage import leverage

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("leverage", help="leverage correlation L(tau)")
    add_input_args(parser, many=True)
    parser.add_argument("--tau-lo", type=int, default=defaults.LEVERAGE_TAU_LO)
    parser.add_argument("--tau-hi", type=int, default=defaults.LEVERAGE_TAU_HI)
    add_output_args(parser)
    parser.set_defaults(command=Command.leverage.value)


def handle(config: RunConfig, writer: ReportWriter) -> None:
    for path in config.inputs:
        series = load_series(config, path)
        curve = leverage(series.returns, config.tau_lo, config.tau_hi, defaults.LEVERAGE_MIN_TERMS)
        writer.leverage(f"{series.label}_leverage", curve, series.label, series.sigma)
        positive = [(t, v) for t, v in zip(curve.taus, curve.values) if t > 0]
        if positive:
            tau_min, value = min(positive, key=lambda item: item[1])
            print(f"{series.label}: min L at tau={tau_min} ({value:.4f})")
