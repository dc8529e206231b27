import json
import subprocess
import sys

import pytest

from fashsent.cli import main

TRAIN = ["--preset", "small", "--epochs", "2", "--seed", "1"]


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "synth.jsonl"
    assert main(["synth", "--n", "40", "--seed", "1", "--signal", "1.5", "--out", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def trained(dataset, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert main(["train", "--data", str(dataset), "--out", str(out), *TRAIN]) == 0
    return out


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_synth_is_deterministic(dataset, tmp_path):
    other = tmp_path / "again.jsonl"
    main(["synth", "--n", "40", "--seed", "1", "--signal", "1.5", "--out", str(other)])
    assert other.read_bytes() == dataset.read_bytes()


def test_train_writes_artifacts_and_manifest(trained):
    for name in ("model.ckpt", "train_log.json", "train_log.txt", "test_metrics.json", "test_metrics.txt"):
        assert (trained / name).is_file()
    m = manifest(trained)
    assert m["optimizer"]["betas"] == [0.55, 0.999]
    assert m["optimizer"]["base_lr"] == 0.001
    assert m["split_sizes"] == [32, 4, 4]
    assert m["config"]["seed"] == 1 and m["seed"] == 1
    assert len(m["data_fingerprint"]) == 64
    assert set(m["outputs"]) >= {"model.ckpt", "test_metrics.json"}
    assert abs(sum(m["fusion_weights"]) - 1) < 1e-12
    assert "timestamp" not in json.dumps(m)


def test_train_is_byte_reproducible(dataset, trained, tmp_path):
    # rerun into the same directory so the recorded --out matches too
    first = {p.name: p.read_bytes() for p in trained.iterdir()}
    assert main(["train", "--data", str(dataset), "--out", str(trained), *TRAIN]) == 0
    assert {p.name: p.read_bytes() for p in trained.iterdir()} == first


def test_eval_matches_test_metrics_shape(dataset, trained, tmp_path, capsys):
    out = tmp_path / "eval"
    assert main(["eval", "--checkpoint", str(trained / "model.ckpt"), "--data", str(dataset),
                 "--out", str(out)]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["n"] == 40
    assert set(metrics["per_class_accuracy"]) == {"positive", "neutral", "negative"}
    assert manifest(out)["optimizer"]["betas"] == [0.55, 0.999]
    assert "macro_f1" in capsys.readouterr().out


def test_predict_writes_one_line_per_record(dataset, trained, tmp_path):
    out = tmp_path / "pred"
    assert main(["predict", "--checkpoint", str(trained / "model.ckpt"), "--data", str(dataset),
                 "--out", str(out)]) == 0
    rows = [json.loads(line) for line in (out / "predictions.jsonl").read_text().splitlines()]
    assert len(rows) == 40
    assert all(abs(sum(r["scores"]) - 1) < 1e-9 for r in rows)
    assert {r["label"] for r in rows} <= {"positive", "neutral", "negative"}


def test_out_dir_defaults_to_env(dataset, tmp_path, monkeypatch):
    monkeypatch.setenv("FASHSENT_OUT", str(tmp_path / "envout"))
    assert main(["prep", "--data", str(dataset)]) == 0
    assert (tmp_path / "envout" / "clean.jsonl").is_file()
    assert (tmp_path / "envout" / "manifest.json").is_file()


@pytest.mark.parametrize("argv", [
    ["train", "--data", "{data}", "--only", "va", "--only", "ta"],
    ["train", "--data", "{data}", "--ablate", "va", "--only", "ta"],
    ["train", "--data", "{data}", "--ablate", "va,xx"],
    ["train", "--data", "/no/such/file.jsonl"],
    ["train", "--data", "{data}", "--preset", "huge"],
    ["synth", "--n", "3", "--out", "x", "--modality-strength", "1,2"],
    ["gradcheck", "--scope", "galaxy"],
])
def test_usage_errors_exit_2(argv, dataset, capsys):
    argv = [a.replace("{data}", str(dataset)) for a in argv]
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "error:" in capsys.readouterr().err


def test_ablating_every_branch_is_a_runtime_error(dataset, tmp_path, capsys):
    code = main(["train", "--data", str(dataset), "--out", str(tmp_path), "--ablate", "va,ta,vt", *TRAIN])
    assert code == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("fashsent train: error:")


def test_malformed_data_reports_one_line(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a"}\n')
    assert main(["train", "--data", str(bad), "--out", str(tmp_path / "o"), *TRAIN]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "bad.jsonl" in err[0]


def test_gradcheck_exit_codes(capsys):
    assert main(["gradcheck", "--scope", "op", "--target", "tanh"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].startswith("PASS")
    assert main(["gradcheck", "--scope", "op", "--target", "tanh", "--corrupt", "tanh"]) == 1
    assert "FAIL: tanh" in capsys.readouterr().out


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fashsent.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("fashsent")
