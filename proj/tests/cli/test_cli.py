"""Black-box checks of the gms binary: exit codes, output files, manifests,
and a miniature ingest-to-validation run. GMS_BIN points at the built
executable (set by ctest).
"""

import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ["GMS_BIN"]


def gms(*args, cwd, expect=0):
    proc = subprocess.run(
        [BIN, *map(str, args)], capture_output=True, text=True, cwd=cwd
    )
    assert proc.returncode == expect, (
        f"gms {' '.join(map(str, args))}: rc={proc.returncode}\n"
        f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
    )
    return proc


def test_help(tmp_path):
    out = gms("--help", cwd=tmp_path).stdout
    for verb in ("ingest", "basis", "simulate", "dataset", "train", "leaderboard", "validate", "im"):
        assert verb in out


def test_version(tmp_path):
    assert gms("--version", cwd=tmp_path).stdout.strip() == "0.1.0"


def test_unknown_flag_is_a_usage_error(tmp_path):
    gms("--definitely-not-a-flag", cwd=tmp_path, expect=1)


def test_missing_subcommand_is_a_usage_error(tmp_path):
    gms(cwd=tmp_path, expect=1)


def test_missing_config_file_exits_2(tmp_path):
    proc = gms(
        "dataset", "generate",
        "--basis", "nope.qbasis",
        "--config", "nowhere.json",
        "--out", "d.qdata",
        cwd=tmp_path, expect=2,
    )
    assert "nowhere.json" in proc.stderr


def test_invalid_config_schema_exits_2(tmp_path):
    (tmp_path / "gen.json").write_text('{"n_samples": 5, "seeds": 1}\n')
    proc = gms(
        "dataset", "generate",
        "--basis", "nope.qbasis",
        "--config", "gen.json",
        "--out", "d.qdata",
        cwd=tmp_path, expect=2,
    )
    assert "seeds" in proc.stderr


def test_missing_data_file_exits_3(tmp_path):
    gms("im", "--record", "missing.csv", "--out", "im.json", cwd=tmp_path, expect=3)


def test_manifest_only_does_no_work(tmp_path):
    gms("--manifest-only", "--seed", 5, "ingest", "--synthetic", 4,
        "--out", "mo.qsuite", cwd=tmp_path)
    manifest = json.loads((tmp_path / "mo.qsuite.manifest.json").read_text())
    assert manifest["command"] == "ingest"
    assert manifest["seed"] == 5
    assert not (tmp_path / "mo.qsuite").exists()


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Run the full miniature pipeline once; individual tests inspect it."""
    d = tmp_path_factory.mktemp("cli_run")

    gms("--seed", 5, "ingest", "--synthetic", 6, "--dt", 0.02, "--duration", 20,
        "--out", "suite.qsuite", cwd=d)
    gms("basis", "build", "--suite", "suite.qsuite", "--tau", 0.99,
        "--out", "basis.qbasis", cwd=d)

    (d / "gen.json").write_text('{"n_samples": 60, "seed": 7}\n')
    gms("--workers", 2, "dataset", "generate", "--basis", "basis.qbasis",
        "--config", "gen.json", "--out", "data.qdata", cwd=d)
    gms("--seed", 3, "dataset", "split", "--data", "data.qdata",
        "--test-fraction", 0.2, cwd=d)

    (d / "hyper.json").write_text('{"max_depth": 4}\n')
    gms("--seed", 1, "train", "--data", "data.qdata", "--kind", "dt",
        "--hyper", "hyper.json", "--out", "model.qmodel", cwd=d)

    (d / "tmpl.json").write_text(
        '{"n_dof": 1, "E": [32, 48], "Fy": [0.21, 0.35], "xi": [0.04, 0.06], "b": 0.02}\n'
    )
    gms("--seed", 2, "validate", "generated", "--model", "model.qmodel",
        "--basis", "basis.qbasis", "--template", "tmpl.json",
        "--suite", "suite.qsuite", "-n", 3, "--out", "val", cwd=d)
    return d


def test_pipeline_artifacts_exist(workdir):
    for name in (
        "suite.qsuite", "suite.qsuite.json", "suite.qsuite.manifest.json",
        "basis.qbasis", "basis.qbasis.json", "basis.qbasis.manifest.json",
        "data.qdata", "data.qdata.json", "data.qdata.manifest.json",
        "model.qmodel", "model.qmodel.json", "model.qmodel.manifest.json",
        "val/report.json", "val/errors.csv", "val/manifest.json",
    ):
        assert (workdir / name).exists(), name


def test_manifest_records_inputs_and_outputs(workdir):
    manifest = json.loads((workdir / "model.qmodel.manifest.json").read_text())
    assert manifest["tool"] == "gms"
    assert manifest["command"] == "train"
    assert len(manifest["inputs"]["data"]["sha256"]) == 64
    assert "model.qmodel" in manifest["outputs"]


def test_dataset_feature_names(workdir):
    sidecar = json.loads((workdir / "data.qdata.json").read_text())
    names = sidecar["feature_names"]
    assert names[0] == "w1"
    assert names[-3:] == ["E1", "Fy1", "xi1"]
    assert len(sidecar["train_indices"]) == 48
    assert len(sidecar["test_indices"]) == 12


def test_model_sidecar_scores(workdir):
    sidecar = json.loads((workdir / "model.qmodel.json").read_text())
    assert sidecar["kind"] == "dt"
    assert "mean" in sidecar["train_r2"]
    assert "mean" in sidecar["test_r2"]


def test_validation_report_shape(workdir):
    report = json.loads((workdir / "val" / "report.json").read_text())
    names = [e["name"] for e in report["per_edp"]]
    assert names == ["peak_roof_disp", "peak_floor_accel"]
    for edp in report["per_edp"]:
        assert edp["n_errors"] + edp["excluded"] == 3
    assert report["provenance"]["protocol"] == "generated"
    assert "im_comparison" in report["extras"]

    lines = (workdir / "val" / "errors.csv").read_text().splitlines()
    assert lines[0].startswith("repeat,sample,peak_roof_disp_true")
    assert len(lines) == 1 + 3


def test_reconstruct_round_trips_a_suite_member(workdir):
    gms("basis", "sample", "--basis", "basis.qbasis", "--count", 2,
        "--out", "weights.json", "--motions-dir", "motions", cwd=workdir)
    samples = json.loads((workdir / "weights.json").read_text())
    assert len(samples["samples"]) == 2
    assert (workdir / "motions" / "sample_0.csv").exists()

    gms("basis", "reconstruct", "--basis", "basis.qbasis",
        "--record", str(workdir / "motions" / "sample_0.csv"),
        "--out", "roundtrip.csv", cwd=workdir)
    original = (workdir / "motions" / "sample_0.csv").read_text().splitlines()[1:]
    rebuilt = (workdir / "roundtrip.csv").read_text().splitlines()[1:]
    assert len(original) == len(rebuilt)
    worst = max(
        abs(float(a.split(",")[1]) - float(b.split(",")[1]))
        for a, b in zip(original, rebuilt)
    )
    assert worst < 1e-9


def test_im_table(workdir):
    gms("im", "--suite", "suite.qsuite", "--out", "im.json", cwd=workdir)
    table = json.loads((workdir / "im.json").read_text())["records"]
    assert len(table) == 6
    for row in table:
        assert row["pga_g"] > 0.0
        assert row["arias_m_per_s"] > 0.0
        assert row["lambda1"] > 0.0


def test_simulate_edp_only(workdir):
    record = workdir / "motions" / "sample_0.csv"
    (workdir / "stories.json").write_text(
        '{"stories": [{"E": 39.5, "Fy": 0.3, "xi": 0.05}]}\n'
    )
    proc = gms("simulate", "--record", record, "--stories", "stories.json",
               "--edp-only", cwd=workdir)
    edp = json.loads(proc.stdout)
    assert edp["peak_roof_disp"] > 0.0
    assert edp["peak_floor_accel_g"] > 0.0
