import json
import subprocess
import sys

import numpy as np
import pytest

from specpol.cli import main
from specpol.io import read_trajectory_csv
from specpol.errors import ParseError

from conftest import two_well_trajectory

FAST_B1 = ["run", "--experiment", "blaschke1", "--M", "300", "--N", "21",
           "--grid-res", "11", "--grid-extent", "1.2"]


def run_cli(args):
    return main([str(a) for a in args])


def test_blaschke1_run_writes_artifacts(tmp_path):
    out = tmp_path / "run1"
    assert run_cli(FAST_B1 + ["--out", out]) == 0
    for name in ("residuals.csv", "eigenvalues.json", "truth.json", "meta.json"):
        assert (out / name).exists()
    header = (out / "residuals.csv").read_text().splitlines()[0]
    assert header == "re_lambda,im_lambda,residual"
    report = json.loads((out / "eigenvalues.json").read_text())
    assert {"re", "im", "residual", "accepted", "dist_to_truth"} <= set(
        report["eigenvalues"][0])


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(FAST_B1 + ["--out", a])
    run_cli(FAST_B1 + ["--out", b])
    for name in ("residuals.csv", "eigenvalues.json", "truth.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_meta_roundtrip_reproduces_run(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(FAST_B1 + ["--out", a])
    assert run_cli(["run", "--config", a / "meta.json", "--out", b]) == 0
    assert (a / "residuals.csv").read_bytes() == (b / "residuals.csv").read_bytes()


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('experiment = "blaschke1"\nn_pairs = 300\nn_modes = 21\n'
                   'grid_res = 5\nspace = "l2"\n')
    out = tmp_path / "o"
    assert run_cli(["run", "--config", cfg, "--space", "hardy-dual", "--out", out]) == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["space"] == "hardy-dual" and meta["n_pairs"] == 300


def test_blaschke2_requires_mu(tmp_path):
    code = run_cli(["run", "--experiment", "blaschke2", "--out", tmp_path / "x"])
    assert code == 2


def test_unknown_config_field_rejected(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('experiment = "blaschke1"\nbogus = 1\n')
    assert run_cli(["run", "--config", cfg, "--out", tmp_path / "x"]) == 2


def test_sweep_experiments_write_index(tmp_path):
    out = tmp_path / "sweep"
    code = run_cli(["run", "--experiment", "normality_sweep", "--N", "21",
                    "--sweep-s", "0,-1", "--out", out])
    assert code == 0
    lines = (out / "normality.csv").read_text().splitlines()
    assert lines[0] == "s,deviation" and len(lines) == 3
    assert (out / "normality_s0.json").exists() and (out / "normality_s1.json").exists()

    out2 = tmp_path / "ssweep"
    code = run_cli(["run", "--experiment", "sobolev_sweep", "--M", "300", "--N", "21",
                    "--grid-res", "5", "--sweep-s", "0,-1", "--out", out2])
    assert code == 0
    index = json.loads((out2 / "index.json").read_text())
    assert len(index["entries"]) == 2
    assert (out2 / "residuals_s1.csv").exists()


def test_kernel_blaschke_run(tmp_path):
    out = tmp_path / "kb"
    code = run_cli(["run", "--experiment", "kernel_blaschke", "--M", "200",
                    "--rank_r", "20", "--grid-res", "5", "--out", out])
    assert code == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["rank_r"] == 20
    report = json.loads((out / "eigenvalues.json").read_text())
    assert report["meta"]["rank_r"] == 20 and report["space"].startswith("gaussian")


def test_trajectory_pipeline_and_labels(tmp_path):
    traj, _ = two_well_trajectory(n_steps=2500, p_flip=0.01, noise=0.2, seed=2)
    csv_path = tmp_path / "traj.csv"
    csv_path.write_text("x,y\n" + "\n".join(f"{float(a)!r},{float(b)!r}" for a, b in traj) + "\n")
    out = tmp_path / "tp"
    code = run_cli(["run", "--experiment", "trajectory_pipeline", "--input", csv_path,
                    "--stride", "2", "--rank_r", "25", "--out", out])
    assert code == 0
    labels = (out / "labels.csv").read_text().splitlines()
    assert labels[0] == "index,label" and len(labels) == 1250


def test_ingest_counts_and_errors(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("1.0\n2.0\n3.0\n")
    out = tmp_path / "snap.npz"
    assert run_cli(["ingest", "--input", f, "--stride", "1", "--out", out]) == 0
    with np.load(out) as data:
        assert data["X"].shape == (2, 1)

    big = tmp_path / "big.csv"
    big.write_text("\n".join("0.5" for _ in range(125_000)) + "\n")
    arr = read_trajectory_csv(big)
    assert arr.shape == (125_000, 1)
    from specpol.io import ingest_trajectory
    assert ingest_trajectory(big, stride=50).n_pairs == 2499

    bad = tmp_path / "bad.csv"
    bad.write_text("1.0\nnot-a-number\n2.0\n")
    with pytest.raises(ParseError) as err:
        read_trajectory_csv(bad)
    assert "row 2" in str(err.value)
    assert run_cli(["ingest", "--input", bad, "--out", out]) == 3

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(ParseError) as err:
        read_trajectory_csv(ragged)
    assert "row 2" in str(err.value)


def test_grid_and_classify_from_saved_gram(tmp_path):
    out = tmp_path / "saved"
    assert run_cli(FAST_B1 + ["--save-gram", "--out", out]) == 0
    res = tmp_path / "grid.csv"
    assert run_cli(["grid", "--gram", out / "gram.npz", "--grid-res", "5",
                    "--out", res]) == 0
    assert res.read_text().startswith("re_lambda")
    rep = tmp_path / "report.json"
    assert run_cli(["classify", "--gram", out / "gram.npz", "--epsilon", "0.01",
                    "--out", rep]) == 0
    data = json.loads(rep.read_text())
    assert data["epsilon"] == 0.01 and data["eigenvalues"]


def test_lemma_check_cli(tmp_path):
    out = tmp_path / "lemma"
    code = run_cli(["run", "--experiment", "lemma_check", "--M", "500", "--out", out])
    assert code == 0
    data = json.loads((out / "lemma.json").read_text())
    assert data["passed"] and data["max_quad_rel_dev"] < 0.05


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "specpol.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "specpol" in proc.stdout
