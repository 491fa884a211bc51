import logging
from datetime import date

from src.commands.utils import add_histograms_arg, add_input_args, add_output_args, add_sweep_args, load_series
from src.conf.config import defaults
from src.repository.reports import ReportWriter
from src.schemas import Command, RunConfig
from src.services.asymmetry import build_curves, compare_indices, equivalence_gap, era_report, theta_fits
from src.services.shuffler import sweep

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("asymmetry", help="w(T), w+/-(T,1) and theta for one or more indices")
    add_input_args(parser, many=True)
    add_sweep_args(parser)
    add_histograms_arg(parser)
    parser.add_argument("--eras", dest="era_boundary", type=date.fromisoformat, default=None,
                        help="also split each input at this date and compare the eras")
    add_output_args(parser)
    parser.set_defaults(command=Command.asymmetry.value)


def handle(config: RunConfig, writer: ReportWriter) -> None:
    """
    Per input: the w tables, the theta fits and a summary with flags. With
    several inputs a cross-index w table per level is added.
    """
    T_grid = sorted(set(config.t_grid) | {1, config.t_inf})
    by_label = {}
    for path in config.inputs:
        series = load_series(config, path)
        label = series.label
        cells = sweep(
            series.returns,
            T_grid,
            config.k_grid,
            config.n_p,
            config.tau_max,
            config.smooth,
            config.master_seed,
            s0=float(series.log.s[0]),
            workers=config.workers,
            sigma=series.sigma,
        )
        curves, flags = build_curves(cells, config.k_grid, config.t_inf, label)
        thetas, theta_flags = theta_fits(curves, config.theta_t_hi)
        writer.sweep(f"{label}_sweep", cells, label, config.master_seed, config.smooth)
        if config.histograms:
            writer.sweep_histograms(f"{label}_fpt", cells, label, config.master_seed, config.smooth)
        writer.asymmetry(f"{label}_w", curves, label)
        writer.thetas(f"{label}_theta", thetas, label, series.sigma)
        writer.json(
            f"{label}_asymmetry_summary",
            {
                "label": label,
                "sigma": series.sigma,
                "T_inf": config.t_inf,
                "levels": [
                    {
                        "k": abs(c.level.k),
                        "tau_star_inf_plus": c.tau_star_inf_plus,
                        "tau_star_inf_minus": c.tau_star_inf_minus,
                        "tau_star_1": c.tau_star_1,
                        "delta_tau_inf": c.delta_tau_inf,
                        "equivalence_gap": equivalence_gap(c),
                    }
                    for c in curves
                ],
                "thetas": thetas,
                "flags": flags + theta_flags,
            },
        )
        for fit in thetas:
            print(f"{label} k={fit.k:g}: theta={fit.theta:.2f} +/- {fit.stderr:.2f}")
        by_label[label] = {abs(c.level.k): c for c in curves}

        if config.era_boundary is not None:
            report = era_report(
                series.prices,
                config.era_boundary,
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
            writer.era(f"{label}_era", report)

    if len(by_label) > 1:
        shared = set.intersection(*(set(curves) for curves in by_label.values()))
        for k in sorted(shared):
            rows = compare_indices({label: curves[k] for label, curves in by_label.items()})
            writer.table(f"compare_w_k{k:g}", rows, ["label", "T", "w", "k", "sigma"], {"k": k})
