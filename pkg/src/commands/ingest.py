import logging

from src.commands.utils import add_input_args, add_output_args, load_series
from src.errors import DataValidationError, FitError
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig
from src.services.market_data import moments, return_distribution, return_tail_exponent

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("ingest", help="validate price files and summarize their daily returns")
    add_input_args(parser, many=True)
    add_output_args(parser)
    parser.set_defaults(command=Command.ingest.value)


def handle(config: RunConfig, writer: ReportWriter) -> None:
    """
    Normalized prices, return moments and the return-magnitude densities of each input.
    """
    for path in config.inputs:
        series = load_series(config, path)
        label, r = series.label, series.returns
        writer.prices(f"{label}_prices", series.prices, config.csv_schema)

        summary = {
            "label": label,
            "n_days": len(series.prices),
            "start": series.prices.dates[0].isoformat(),
            "end": series.prices.dates[-1].isoformat(),
            "sigma": series.sigma,
            "moments": moments(r),
            "tail_exponent": {},
            "flags": [],
        }
        for sign, name in ((1, "plus"), (-1, "minus")):
            try:
                hist = return_distribution(r, sign)
                summary["tail_exponent"][name] = return_tail_exponent(r, sign)
            except (DataValidationError, FitError) as e:
                logger.warning("%s: no return distribution for sign %d: %s", label, sign, e.detail)
                summary["flags"].append(f"returns {name}: {e.detail}")
                continue
            rows = [{"abs_return": c, "density": d, "count": n}
                    for c, d, n in zip(hist.centers, hist.density, hist.counts)]
            writer.table(f"{label}_returns_{name}", rows, ["abs_return", "density", "count"],
                         {"label": label, "sigma": series.sigma, "sign": sign, "n": hist.n})
        writer.json(f"{label}_summary", summary)
        print(f"{label}: {summary['n_days']} days {summary['start']}..{summary['end']} sigma={series.sigma:.6f}")
