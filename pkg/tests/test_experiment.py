"""Batch runner artifacts: schemas, digests, determinism."""

import hashlib
import json
import os

import numpy as np
import pytest

from netlms.config import get_preset, parse_config, with_overrides
from netlms.errors import InvalidInputError
from netlms.estimator import run_trajectory, substream
from netlms.experiment import default_out_dir, run_experiment


@pytest.fixture(scope="module")
def small_cfg():
    return with_overrides(get_preset("setting-i"), horizon=300, runs=3)


@pytest.fixture(scope="module")
def artifacts(small_cfg, tmp_path_factory):
    out = tmp_path_factory.mktemp("artifacts")
    return run_experiment(small_cfg, out_dir=str(out))


def test_expected_files_exist(artifacts, small_cfg):
    assert len(artifacts.run_files) == small_cfg.runs
    for p in (*artifacts.run_files, artifacts.aggregate_file,
              artifacts.excitation_file, artifacts.config_file,
              artifacts.manifest_file):
        assert os.path.isfile(p)
    assert [os.path.basename(p) for p in artifacts.run_files] == [
        "run_0000.csv", "run_0001.csv", "run_0002.csv"]


def test_run_csv_schema_and_precision(artifacts, small_cfg):
    text = open(artifacts.run_files[0]).read()
    assert "\r" not in text  # LF only
    lines = text.strip().split("\n")
    n = small_cfg.nodes
    assert lines[0] == ("step,V," + ",".join(f"err_norm_{i+1}" for i in range(n))
                        + "," + ",".join(f"est_norm_{i+1}" for i in range(n)))
    # thinning: steps 0, 100, 200, 300 at record_every=100
    rec = run_trajectory(small_cfg, substream(small_cfg.seed, 0))
    table = np.genfromtxt(artifacts.run_files[0], delimiter=",", names=True)
    assert np.array_equal(table["step"], [0.0, 100.0, 200.0, 300.0])
    # %.17g means the written floats round-trip exactly
    assert np.array_equal(table["V"], rec.v[[0, 100, 200, 300]])
    assert np.array_equal(table["err_norm_2"], rec.err_norms[[0, 100, 200, 300], 1])


def test_aggregate_schema(artifacts, small_cfg):
    lines = open(artifacts.aggregate_file).read().strip().split("\n")
    n = small_cfg.nodes
    assert lines[0] == ("step,mean_V," + ",".join(f"regret_{i+1}" for i in range(n))
                        + ",mar")
    table = np.genfromtxt(artifacts.aggregate_file, delimiter=",", names=True)
    # mar undefined before step 2: written as nan
    assert np.isnan(table["mar"][0]) and np.isfinite(table["mar"][1:]).all()
    # regret columns are means of cumulative excess losses across runs
    runs = [run_trajectory(small_cfg, substream(small_cfg.seed, i))
            for i in range(small_cfg.runs)]
    cum = np.mean([np.cumsum(r.excess_losses, axis=0) for r in runs], axis=0)
    assert np.allclose(table["regret_1"], cum[[0, 100, 200, 300], 0], rtol=1e-12)
    mean_v = np.mean([r.v for r in runs], axis=0)
    assert np.allclose(table["mean_V"], mean_v[[0, 100, 200, 300]], rtol=1e-12)


def test_manifest_digests_and_fields(artifacts, small_cfg):
    man = json.load(open(artifacts.manifest_file))
    assert man["schema"] == 1
    assert man["seed"] == small_cfg.seed and man["runs"] == small_cfg.runs
    assert man["bound_checks"]["w_violations"] == 0
    assert man["bound_checks"]["m_violations"] == 0
    assert man["bound_checks"]["steps"] == small_cfg.runs * (small_cfg.horizon + 1)
    config_text = open(artifacts.config_file).read()
    assert man["config_sha256"] == hashlib.sha256(config_text.encode()).hexdigest()
    for name, digest in man["files"].items():
        path = os.path.join(artifacts.out_dir, name)
        assert hashlib.sha256(open(path, "rb").read()).hexdigest() == digest
    assert "timestamp" not in json.dumps(man).lower()


def test_config_artifact_round_trips(artifacts, small_cfg):
    assert parse_config(open(artifacts.config_file).read()) == small_cfg


def test_excitation_artifact(artifacts):
    doc = json.load(open(artifacts.excitation_file))
    rep = doc["report"]
    assert rep["excited"] is True
    assert rep["bound_check"]["violations"] == 0
    assert len(rep["lambda_series"]) == rep["windows_checked"]
    assert all(isinstance(v, float) and v > 0 for v in rep["lambda_series"][:5])


def test_rerun_is_byte_identical(small_cfg, artifacts, tmp_path):
    again = run_experiment(small_cfg, out_dir=str(tmp_path))
    firsts = (*artifacts.run_files, artifacts.aggregate_file,
              artifacts.excitation_file, artifacts.config_file,
              artifacts.manifest_file)
    seconds = (*again.run_files, again.aggregate_file, again.excitation_file,
               again.config_file, again.manifest_file)
    for p1, p2 in zip(firsts, seconds):
        assert open(p1, "rb").read() == open(p2, "rb").read(), os.path.basename(p1)


def test_json_format(small_cfg, tmp_path):
    cfg = with_overrides(small_cfg, runs=1, horizon=120)
    art = run_experiment(cfg, out_dir=str(tmp_path), fmt="json")
    assert art.run_files[0].endswith(".json")
    doc = json.load(open(art.run_files[0]))
    assert doc["columns"][:2] == ["step", "V"]
    assert len(doc["rows"]) == 3  # steps 0, 100, 120
    assert doc["rows"][-1][0] == 120.0
    agg = json.load(open(art.aggregate_file))
    assert agg["rows"][0][-1] is None  # mar at step 0 in strict JSON


def test_horizon_zero(tmp_path):
    cfg = with_overrides(get_preset("setting-ii"), horizon=0, runs=1)
    art = run_experiment(cfg, out_dir=str(tmp_path))
    lines = open(art.run_files[0]).read().strip().split("\n")
    assert len(lines) == 2  # header plus the initial step
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[1]) == 626.0


def test_final_row_always_recorded(tmp_path):
    cfg = with_overrides(get_preset("setting-i"), horizon=250, runs=1)
    art = run_experiment(cfg, out_dir=str(tmp_path))
    table = np.genfromtxt(art.run_files[0], delimiter=",", names=True)
    assert table["step"][-1] == 250.0  # not a multiple of record_every


def test_worker_pool_produces_identical_files(small_cfg, tmp_path):
    cfg = with_overrides(small_cfg, horizon=80, runs=2)
    seq = run_experiment(cfg, out_dir=str(tmp_path / "seq"), workers=1)
    par = run_experiment(cfg, out_dir=str(tmp_path / "par"), workers=2)
    for p1, p2 in zip(seq.run_files + (seq.aggregate_file,),
                      par.run_files + (par.aggregate_file,)):
        assert open(p1, "rb").read() == open(p2, "rb").read()


def test_argument_validation(small_cfg, tmp_path):
    with pytest.raises(InvalidInputError):
        run_experiment(small_cfg, out_dir=str(tmp_path), fmt="xml")
    with pytest.raises(InvalidInputError):
        run_experiment(small_cfg, out_dir=str(tmp_path), workers=0)


def test_default_out_dir_resolution(monkeypatch):
    cfg = get_preset("setting-i")
    monkeypatch.delenv("NETLMS_OUT", raising=False)
    assert default_out_dir(cfg) == os.path.join(".", "netlms-out", "setting-i")
    monkeypatch.setenv("NETLMS_OUT", "/data/results")
    assert default_out_dir(cfg) == os.path.join("/data/results", "setting-i")
    via_config = with_overrides(cfg, out="/explicit/dir")
    assert default_out_dir(via_config) == "/explicit/dir"
