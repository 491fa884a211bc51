"""
CSV and JSON artifacts of a run.

Every CSV starts with ``# key=value`` comment lines naming the series and its
volatility; JSON is written with sorted keys. Nothing time-dependent is
recorded, so identical inputs and seeds give byte-identical files.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from src.conf.config import TOOL_NAME, TOOL_VERSION
from src.errors import DataIOError
from src.schemas import (
    AsymmetryCurve,
    CsvSchema,
    EraReport,
    FptDistribution,
    HorizonPoint,
    LeverageCurve,
    OutputFormat,
    PriceSeries,
    RunConfig,
    SweepCell,
    ThetaFit,
)
from src.repository.prices import PriceRepository
from src.services.inverse_stats import distribution_table
from src.services.synth import RNG_ALGORITHM

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class ReportWriter:
    def __init__(self, output_dir: Path, fmt: OutputFormat = OutputFormat.both):
        self.output_dir = Path(output_dir)
        self.fmt = fmt
        self.written: list[Path] = []
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DataIOError(f"cannot create output directory {self.output_dir}: {e}") from e

    @property
    def wants_csv(self) -> bool:
        return self.fmt in (OutputFormat.csv, OutputFormat.both)

    @property
    def wants_json(self) -> bool:
        return self.fmt in (OutputFormat.json, OutputFormat.both)

    def table(self, name: str, rows: Sequence[dict], columns: Sequence[str], header: dict[str, Any]) -> None:
        """One table as ``name.csv`` and/or ``name.json`` depending on the output format."""
        frame = pd.DataFrame(list(rows), columns=list(columns))
        if self.wants_csv:
            self._write_csv(name, frame, header)
        if self.wants_json:
            self.json(name, {"meta": header, "rows": frame.to_dict(orient="records")})

    def json(self, name: str, payload: Any) -> Path:
        path = self.output_dir / f"{name}.json"
        text = json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=True) + "\n"
        self._write_text(path, text)
        return path

    def _write_csv(self, name: str, frame: pd.DataFrame, header: dict[str, Any]) -> Path:
        path = self.output_dir / f"{name}.csv"
        lines = [f"# {key}={_fmt(value)}" for key, value in header.items()]
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self._write_text(path, "\n".join(lines) + ("\n" if lines else "") + body)
        return path

    def _write_text(self, path: Path, text: str) -> None:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as e:
            raise DataIOError(f"cannot write {path}: {e}") from e
        self.written.append(path)
        logger.info("Wrote %s", path)

    # ------------------------------------------------------------ artifacts

    def distribution(
        self, name: str, d: FptDistribution, label: str, smooth: int, extra: Optional[dict] = None
    ) -> None:
        header = {"label": label, "sigma": d.level.sigma, "k": d.level.k, "rho": d.level.rho,
                  "tau_max": d.tau_max, "smooth": smooth, "total_starts": d.total_starts, "censored": d.censored}
        header.update(extra or {})
        self.table(name, distribution_table(d), ["tau", "count", "probability"], header)

    def prices(self, name: str, p: PriceSeries, schema: CsvSchema = CsvSchema()) -> Path:
        """A price series in the ingestion schema, so it can be fed back as an input."""
        path = PriceRepository(schema).write_csv(p, self.output_dir / f"{name}.csv")
        self.written.append(path)
        return path

    def horizons(self, name: str, points: Sequence[HorizonPoint], label: str, extra: Optional[dict] = None) -> None:
        rows = [
            {"k": p.level.k, "rho": p.level.rho, "sign": p.level.sign, "tau_star": p.tau_star,
             "censored_frac": p.censored_frac, "T": p.T if p.T is not None else "", "n_p": p.n_p}
            for p in points
        ]
        header = {"label": label, "sigma": points[0].level.sigma if points else ""}
        header.update(extra or {})
        self.table(name, rows, ["k", "rho", "sign", "tau_star", "censored_frac", "T", "n_p"], header)

    def sweep(self, name: str, cells: Sequence[SweepCell], label: str, master_seed: int, smooth: int) -> None:
        rows = []
        for c in cells:
            rows.append({"T": c.T, "k": c.k, "sign": 1, "tau_star": c.tau_star_plus,
                         "dispersion": c.dispersion_plus, "n_p": c.n_p, "censored_frac": c.censored_frac_plus})
            rows.append({"T": c.T, "k": -c.k, "sign": -1, "tau_star": c.tau_star_minus,
                         "dispersion": c.dispersion_minus, "n_p": c.n_p, "censored_frac": c.censored_frac_minus})
        header = {
            "label": label,
            "sigma": cells[0].level.sigma if cells else "",
            "master_seed": master_seed,
            "rng": RNG_ALGORITHM,
            "n_p": cells[0].n_p if cells else "",
            "tau_max": cells[0].hist_plus.tau_max if cells and cells[0].hist_plus else "",
            "smooth": smooth,
        }
        self.table(name, rows, ["T", "k", "sign", "tau_star", "dispersion", "n_p", "censored_frac"], header)

    def sweep_histograms(self, prefix: str, cells: Sequence[SweepCell], label: str, master_seed: int,
                         smooth: int) -> None:
        """The permutation-summed waiting-time histogram of every cell and sign."""
        for c in cells:
            extra = {"T": c.T, "n_p": c.n_p, "master_seed": master_seed, "rng": RNG_ALGORITHM}
            for sign, hist in ((1, c.hist_plus), (-1, c.hist_minus)):
                if hist is not None:
                    self.distribution(f"{prefix}_T{c.T}_{level_suffix(c.k, sign)}", hist, label, smooth, extra)

    def asymmetry(self, name: str, curves: Sequence[AsymmetryCurve], label: str) -> None:
        rows = [
            {"T": p.T, "k": curve.level.k, "w": p.w, "w_plus": p.w_plus, "w_minus": p.w_minus,
             "delta_tau": p.delta_tau}
            for curve in curves
            for p in curve.points
        ]
        header = {"label": label, "sigma": curves[0].level.sigma if curves else ""}
        self.table(name, rows, ["T", "k", "w", "w_plus", "w_minus", "delta_tau"], header)

    def thetas(self, name: str, fits: Sequence[ThetaFit], label: str, sigma: float) -> None:
        rows = [
            {"k": f.k, "theta": f.theta, "stderr": f.stderr, "T_lo": f.fit_range_T[0], "T_hi": f.fit_range_T[1],
             "n_points": f.n_points, "n_excluded": f.n_excluded}
            for f in fits
        ]
        self.table(name, rows, ["k", "theta", "stderr", "T_lo", "T_hi", "n_points", "n_excluded"],
                   {"label": label, "sigma": sigma})

    def leverage(self, name: str, curve: LeverageCurve, label: str, sigma: float) -> None:
        rows = [
            {"tau": t, "L": v, "stderr": e, "n_terms": m, "reliable": ok}
            for t, v, e, m, ok in zip(curve.taus, curve.values, curve.stderr, curve.n_terms, curve.reliable)
        ]
        self.table(name, rows, ["tau", "L", "stderr", "n_terms", "reliable"],
                   {"label": label, "sigma": sigma, "dt": curve.dt})

    def era(self, name: str, report: EraReport) -> None:
        self.json(name, report)
        for era in report.eras:
            slug = _slug(era.label)
            self.asymmetry(f"{name}_{slug}_w", era.curves, era.label)
            self.thetas(f"{name}_{slug}_theta", era.thetas, era.label, era.sigma)

    def manifest(self, config: RunConfig, inputs: Iterable[Path]) -> Path:
        """Run record: configuration, seed, generator and checksums of inputs and outputs."""
        payload = {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "rng": RNG_ALGORITHM,
            "master_seed": config.master_seed,
            "config": config.model_dump(mode="json", exclude={"workers", "output_dir"}),
            "inputs": {Path(p).name: sha256_of(Path(p)) for p in inputs},
            "outputs": {p.name: sha256_of(p) for p in sorted(self.written)},
        }
        return self.json("manifest", payload)


def level_suffix(k: float, sign: int) -> str:
    return f"k{abs(k):g}_{'plus' if sign > 0 else 'minus'}"


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def _fmt(value: Any) -> str:
    return FLOAT_FORMAT % value if isinstance(value, float) else str(value)


def _slug(label: str) -> str:
    label = label.replace(">=", "_from_").replace("<", "_before_")
    return "".join(ch if ch.isalnum() else "_" for ch in label).strip("_") or "era"
