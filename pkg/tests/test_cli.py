import json
import subprocess
import sys

import pytest

from rgnnt.cli import main


def test_gen_writes_instances_and_manifest(tmp_path):
    out = tmp_path / "data"
    assert main(["gen", "--domain", "navig-xy", "--n", "4", "--m", "3", "--count", "20", "--seed", "7",
                 "--out", str(out)]) == 0
    assert len([p for p in out.glob("p*.pddl")]) == 20
    doc = json.loads((out / "run-manifest.json").read_text())
    assert doc["subcommand"] == "gen" and doc["config"]["seed"] == 7


def test_oracle_train_eval_pipeline(tmp_path, capsys):
    data = tmp_path / "data"
    main(["gen", "--domain", "navig-xy", "--n", "2", "--m", "3", "--count", "2", "--seed", "1", "--out", str(data)])
    assert main(["oracle", "--data", str(data), "--out", str(tmp_path / "ds.jsonl")]) == 0
    ckpt = tmp_path / "model.ckpt"
    assert main(["train", "--model", "rgnn-t", "--t", "1", "--dim", "4", "--layers", "2", "--steps", "5",
                 "--seeds", "0", "--data", str(data), "--out", str(ckpt)]) == 0
    assert ckpt.exists()
    header = (tmp_path / "model.ckpt.metrics.csv").read_text().splitlines()[0]
    assert header == "step,train_loss,val_loss,seed"
    assert main(["eval", "--model", str(ckpt), "--data", str(data)]) == 0
    assert "coverage" in capsys.readouterr().out
    assert (data / "eval.csv").exists()


def test_transform_and_unsuitable_domain(tmp_path, capsys):
    data = tmp_path / "vac"
    main(["gen", "--domain", "vacuum", "--locations", "4", "--robots", "1", "--out", str(data)])
    assert main(["transform", "--data", str(data), "--model", "rgnn-t", "--t", "1"]) == 0
    assert main(["transform", "--data", str(data), "--model", "2gnn"]) == 1
    assert "ternary" in capsys.readouterr().err


def test_wl_subcommand(tmp_path, capsys):
    (tmp_path / "c6.edges").write_text("\n".join(f"{i} {(i + 1) % 6}" for i in range(6)))
    (tmp_path / "two_triangles.edges").write_text("a b\nb c\nc a\nd e\ne f\nf d\n")
    args = ["wl", "--a", str(tmp_path / "c6.edges"), "--b", str(tmp_path / "two_triangles.edges")]
    main(args + ["--algo", "fwl2"])
    assert capsys.readouterr().out.startswith("DISTINGUISHED")
    main(args + ["--algo", "wl1"])
    assert capsys.readouterr().out.startswith("NOT-DISTINGUISHED")


def test_gradcheck_subcommand(capsys):
    assert main(["gradcheck", "--samples", "20"]) == 0
    assert "max relative error" in capsys.readouterr().out


def test_missing_data_and_usage_errors(tmp_path):
    assert main(["oracle", "--data", str(tmp_path / "none"), "--out", str(tmp_path / "x")]) == 1
    with pytest.raises(SystemExit) as e:
        main(["train"])
    assert e.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rgnnt", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
