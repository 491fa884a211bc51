import argparse
import logging
from datetime import date

from src.commands.utils import add_output_args
from src.conf.config import defaults
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig, SynthKind
from src.services.market_data import moments, prices_from_returns, volatility
from src.services.synth import RNG_ALGORITHM, drop_positions, generate

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="generate a synthetic index with a known answer")
    parser.add_argument("--kind", choices=[k.value for k in SynthKind], required=True)
    parser.add_argument("--n", type=int, default=defaults.SYNTH_N, help="number of daily returns")
    parser.add_argument("--sigma", type=float, default=defaults.SYNTH_SIGMA)
    parser.add_argument("--nu", type=float, default=defaults.SYNTH_NU)
    parser.add_argument("--scale", type=float, default=defaults.SYNTH_SCALE)
    parser.add_argument("--drop", type=float, default=defaults.SYNTH_DROP)
    parser.add_argument("--rebound-len", type=int, default=defaults.SYNTH_REBOUND_LEN)
    parser.add_argument("--drop-prob", type=float, default=defaults.SYNTH_DROP_PROB)
    parser.add_argument("--origin", dest="synth_origin", type=date.fromisoformat, default=defaults.SYNTH_ORIGIN)
    parser.add_argument("--s0", dest="synth_s0", type=float, default=defaults.SYNTH_S0)
    add_output_args(parser)
    parser.set_defaults(command=Command.synth.value, build_config=_synth_spec)


def _synth_spec(args: argparse.Namespace) -> dict:
    return {
        "synth": {
            "kind": args.kind,
            "n": args.n,
            "sigma": args.sigma,
            "nu": args.nu,
            "scale": args.scale,
            "drop_magnitude": args.drop,
            "rebound_len": args.rebound_len,
            "drop_prob": args.drop_prob,
            "seed": args.master_seed,
        }
    }


def handle(config: RunConfig, writer: ReportWriter) -> None:
    """Writes the synthetic index as a price CSV that every other command accepts."""
    spec = config.synth
    r = generate(spec)
    label = f"synth_{spec.kind.value}"
    prices = prices_from_returns(r, config.synth_origin, config.synth_s0, label=label)
    writer.prices(label, prices, config.csv_schema)

    summary = {
        "label": label,
        "spec": spec,
        "rng": RNG_ALGORITHM,
        "sigma": volatility(r),
        "moments": moments(r),
        "start": prices.dates[0].isoformat(),
        "end": prices.dates[-1].isoformat(),
    }
    if spec.kind == SynthKind.drop_rebound:
        summary["drops"] = drop_positions(r, spec.drop_magnitude).tolist()
    writer.json(f"{label}_summary", summary)
    print(f"{label}: {len(r)} returns, sigma={summary['sigma']:.6f}")
