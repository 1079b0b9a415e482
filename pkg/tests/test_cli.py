import csv
import json
import shutil

import pytest

from ecolife.analysis import rq4_components
from ecolife.cli import main
from ecolife.correction import read_corrected
from ecolife.dataset import ApiRecord, from_records, write_json_lines
from ecolife.dates import iso
from ecolife.networks import build_ma, snapshot_series


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory, bundled_paths):
    dataset, store, _ = bundled_paths
    root = tmp_path_factory.mktemp("cli")
    assert run("ingest", dataset, "--out", root / "ingest") == 0
    assert run("probe", root / "ingest" / "dataset.jsonl", "--store", store,
               "--out", root / "verdicts.jsonl") == 0
    assert run("correct", root / "ingest" / "dataset.jsonl", root / "verdicts.jsonl",
               "--seed", 7, "--out", root / "corr",
               "--reference", store.parent / "reference_longevity.json") == 0
    assert run("analyze", root / "corr" / "corrected.jsonl", "--out", root / "an",
               "--n-boot", 100, "--export-edges") == 0
    return root


def test_pipeline_outputs(pipeline):
    names = {p.name for p in (pipeline / "an").iterdir()}
    assert {"rq1.csv", "rq2.csv", "rq2_degrees.csv", "rq3.csv", "rq4.csv", "rq5.csv",
            "rq6.csv", "report.json", "aa_edges.tsv", "cc_edges.tsv"} <= names
    report = json.loads((pipeline / "an" / "report.json").read_text())
    assert report["schema_version"] == 1
    assert report["config"]["seed"] == 7
    assert any("avg_days" in a for a in report["assumptions"])
    summary = json.loads((pipeline / "corr" / "fit_summary.json").read_text())
    assert summary["z_test"]["all"]["band"] == "same"
    assert sum(summary["provenance_counts"].values()) == sum(
        1 for line in open(pipeline / "ingest" / "dataset.jsonl") if line.strip())
    validation = json.loads((pipeline / "ingest" / "validation.json").read_text())
    assert validation["counts"]["implausible_death"] >= 1


def test_rq4_matches_library(pipeline):
    cd = read_corrected(pipeline / "corr" / "corrected.jsonl")
    report = json.loads((pipeline / "an" / "report.json").read_text())
    rng = report["config"]["range"]
    series = snapshot_series(build_ma(cd), "yearly", tuple(rng))
    with open(pipeline / "an" / "rq4.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["t"] for r in rows] == [iso(t) for t, _, _ in series]
    for r, (_, aa, _) in zip(rows, series):
        s = rq4_components(aa)
        assert (int(r["component_count"]), int(r["count_size_gt_4"]),
                int(r["largest_component_size"])) == tuple(s)


def test_same_seed_same_bytes(pipeline, tmp_path):
    ds = pipeline / "ingest" / "dataset.jsonl"
    assert run("correct", ds, pipeline / "verdicts.jsonl", "--seed", 7, "--out", tmp_path) == 0
    assert ((tmp_path / "corrected.jsonl").read_bytes()
            == (pipeline / "corr" / "corrected.jsonl").read_bytes())
    assert run("correct", ds, pipeline / "verdicts.jsonl", "--seed", 8, "--out", tmp_path) == 0
    assert ((tmp_path / "corrected.jsonl").read_bytes()
            != (pipeline / "corr" / "corrected.jsonl").read_bytes())


def test_analyze_subset_and_report(pipeline, tmp_path, capsys):
    assert run("analyze", pipeline / "corr" / "corrected.jsonl", "rq4", "RQ6",
               "--out", tmp_path) == 0
    assert {p.name for p in tmp_path.iterdir()} == {"rq4.csv", "rq6.csv", "report.json"}
    capsys.readouterr()
    assert run("report", pipeline / "an", "--fit-summary",
               pipeline / "corr" / "fit_summary.json") == 0
    text = capsys.readouterr().out
    assert text == (pipeline / "an" / "report.md").read_text()
    assert "## Components" in text and "## Degree distribution fits" in text


def test_probe_repeat_is_stable(pipeline, bundled_paths, tmp_path):
    assert run("probe", pipeline / "ingest" / "dataset.jsonl", "--store", bundled_paths[1],
               "--repeat", 3, "--out", tmp_path / "v.jsonl") == 0
    assert (tmp_path / "v.jsonl").read_bytes() == (pipeline / "verdicts.jsonl").read_bytes()


def test_fixture_store_from_environment(pipeline, bundled_paths, tmp_path, monkeypatch):
    monkeypatch.setenv("ECOLIFE_FIXTURE_STORE", str(bundled_paths[1]))
    assert run("probe", pipeline / "ingest" / "dataset.jsonl", "--out", tmp_path / "v") == 0
    monkeypatch.delenv("ECOLIFE_FIXTURE_STORE")
    assert run("probe", pipeline / "ingest" / "dataset.jsonl", "--out", tmp_path / "v") == 1


def test_missing_fixture_is_a_data_error(pipeline, bundled_paths, tmp_path):
    store = tmp_path / "store"
    shutil.copytree(bundled_paths[1], store)
    victim = sorted(store.iterdir())[0]
    victim.unlink()
    assert run("probe", pipeline / "ingest" / "dataset.jsonl", "--store", store,
               "--out", tmp_path / "v") == 2


def test_usage_errors(pipeline, tmp_path):
    ds = pipeline / "ingest" / "dataset.jsonl"
    verdicts = pipeline / "verdicts.jsonl"
    assert run("correct", ds, verdicts, "--out", tmp_path) == 1  # no seed
    assert run("analyze", pipeline / "corr" / "corrected.jsonl", "rq9", "--out", tmp_path) == 1
    assert run("ingest", tmp_path / "nope.jsonl", "--out", tmp_path) == 1
    assert run("correct", ds, tmp_path / "nope", "--seed", 1, "--out", tmp_path) == 1
    assert run("correct", ds, verdicts, "--seed", 1, "--beta", "2020-13-01",
               "--out", tmp_path) == 1
    assert run("frobnicate") == 1
    assert run("analyze", "--out", tmp_path) == 1


def test_thin_trust_window_is_a_data_error(pipeline, tmp_path):
    ds = pipeline / "ingest" / "dataset.jsonl"
    assert run("correct", ds, pipeline / "verdicts.jsonl", "--seed", 1,
               "--trust-window", "2005-01-01", "2005-01-02", "--out", tmp_path) == 2


def test_duplicate_ids_exit_two(tmp_path):
    row = json.dumps({"id": "/api/a", "name": "A", "start": "2010-01-01",
                      "labeled_status": "available", "primary_category": "X"})
    (tmp_path / "d.jsonl").write_text(row + "\n" + row + "\n")
    assert run("ingest", tmp_path / "d.jsonl", "--out", tmp_path / "o") == 2


def test_config_and_flag_precedence(pipeline, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("seed: 7\ncadence: {networks: monthly}\nrange: [2010-01-01, 2010-12-31]\n"
                   "n_boot: 100\n")
    corrected = pipeline / "corr" / "corrected.jsonl"
    assert run("analyze", corrected, "rq4", "--config", cfg, "--out", tmp_path / "a") == 0
    with open(tmp_path / "a" / "rq4.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 12
    assert run("analyze", corrected, "rq4", "--config", cfg, "--cadence", "yearly",
               "--out", tmp_path / "b") == 0
    with open(tmp_path / "b" / "rq4.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 1
    # a seed from the config file is enough for correct
    assert run("correct", pipeline / "ingest" / "dataset.jsonl", pipeline / "verdicts.jsonl",
               "--config", cfg, "--out", tmp_path / "c") == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("colour: blue\n")
    assert run("analyze", corrected, "--config", bad, "--out", tmp_path / "d") == 1
    assert run("analyze", corrected, "--config", tmp_path / "none.yaml",
               "--out", tmp_path / "d") == 1


def test_empty_corrected_dataset(tmp_path):
    write_json_lines(from_records([]), tmp_path / "empty.jsonl")
    (tmp_path / "v.jsonl").write_text("")
    # nothing to fit on, so correct reports a data error
    assert run("correct", tmp_path / "empty.jsonl", tmp_path / "v.jsonl", "--seed", 1,
               "--out", tmp_path / "c") == 2
    (tmp_path / "c").mkdir(exist_ok=True)
    (tmp_path / "c" / "corrected.jsonl").write_text(
        json.dumps({"record": "meta", "seed": 1, "beta": "2020-09-10"}) + "\n")
    assert run("analyze", tmp_path / "c" / "corrected.jsonl", "--out", tmp_path / "a") == 0
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["rq4"] == [] and report["rq5"]["top_pairs"] == []
    assert (tmp_path / "a" / "rq1.csv").read_text() == "t,scenario,kind,count\n"


def test_single_record_dataset(tmp_path):
    write_json_lines(from_records([ApiRecord("/api/a", "A", 100)]), tmp_path / "one.jsonl")
    assert run("ingest", tmp_path / "one.jsonl", "--out", tmp_path / "i") == 0
