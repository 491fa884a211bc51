import json

from src.schemas import FptDistribution, LeverageCurve, OutputFormat, ReturnLevel, RunConfig
from src.repository.reports import ReportWriter, sha256_of
from src.services.shuffler import sweep


def _distribution() -> FptDistribution:
    return FptDistribution(
        counts={2: 1, 5: 3}, total_starts=6, censored=2, tau_max=10, level=ReturnLevel.from_k(5.0, 0.011)
    )


def test_csv_names_sigma(tmp_path):
    writer = ReportWriter(tmp_path, OutputFormat.csv)
    writer.distribution("d", _distribution(), "djia", 3)
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert "# label=djia" in lines
    assert "# sigma=0.011" in lines
    assert "# smooth=3" in lines
    assert lines[lines.index("tau,count,probability") + 1] == "2,1,0.25"
    assert not (tmp_path / "d.json").exists()


def test_json_is_sorted_and_complete(tmp_path):
    writer = ReportWriter(tmp_path, OutputFormat.json)
    curve = LeverageCurve(taus=[-1, 0, 1], values=[0.0, 1.0, -0.5], stderr=[0.1] * 3, n_terms=[9, 10, 9],
                          reliable=[False] * 3)
    writer.leverage("lev", curve, "x", 0.01)
    payload = json.loads((tmp_path / "lev.json").read_text())
    assert payload["meta"]["sigma"] == 0.01
    assert [row["tau"] for row in payload["rows"]] == [-1, 0, 1]
    assert list(payload) == sorted(payload)


def test_manifest_records_checksums(tmp_path):
    source = tmp_path / "in.csv"
    source.write_text("date,close\n2000-01-03,1\n2000-01-04,2\n")
    out = tmp_path / "out"
    writer = ReportWriter(out)
    writer.distribution("d", _distribution(), "x", 3)
    config = RunConfig(command="fpt", inputs=[source], master_seed=9)
    manifest = json.loads(writer.manifest(config, config.inputs).read_text())
    assert manifest["master_seed"] == 9
    assert manifest["inputs"] == {"in.csv": sha256_of(source)}
    assert set(manifest["outputs"]) == {"d.csv", "d.json"}
    assert "Philox" in manifest["rng"]
    assert "workers" not in manifest["config"]


def test_sweep_records_how_it_was_drawn(tmp_path, gaussian_returns):
    cells = sweep(gaussian_returns, [1, 25], [2.0], 2, 50, 3, master_seed=11)
    writer = ReportWriter(tmp_path, OutputFormat.json)
    writer.sweep("s", cells, "g", 11, 3)
    meta = json.loads((tmp_path / "s.json").read_text())["meta"]
    assert meta["master_seed"] == 11
    assert "Philox" in meta["rng"]
    assert (meta["n_p"], meta["tau_max"], meta["smooth"]) == (2, 50, 3)

    writer.sweep_histograms("g_fpt", cells, "g", 11, 3)
    hist = json.loads((tmp_path / "g_fpt_T25_k2_minus.json").read_text())
    assert hist["meta"]["T"] == 25
    assert hist["meta"]["k"] == -2.0
    assert hist["meta"]["smooth"] == 3
    assert sum(row["count"] for row in hist["rows"]) == cells[1].hist_minus.n_passages
    assert len(writer.written) == 1 + 2 * 2 * 1
