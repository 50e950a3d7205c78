import json

import pytest

from plspath.cli import main

from .conftest import FIXTURE_CSV


def test_report_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["report", "--data", FIXTURE_CSV, "--replicates", "30", "--seed", "42", "--out", str(out)])
    assert code == 0
    assert (out / "report.json").exists() and (out / "ranking.svg").exists()
    assert {p.name for p in (out / "tables").glob("*.csv")} == {
        "measurement.csv", "reliability.csv", "hypotheses.csv", "f_square.csv", "r_squared.csv", "sosdit.csv"}
    md = json.loads((out / "report.json").read_text())["metadata"]
    assert md["B"] == 30 and md["scheme"] == "path"


def test_report_twice_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["report", "--replicates", "20", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["report"])
    assert exc.value.code == 1


def test_data_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("country,Q1-1\nFI,1\nFI,2\n")
    assert main(["fit", "--data", str(bad)]) == 2
    assert "duplicate country" in capsys.readouterr().err


def test_non_convergence_exit_3(tmp_path):
    out = tmp_path / "fit.json"
    assert main(["fit", "--max-iter", "1", "--out", str(out)]) == 3
    assert json.loads(out.read_text())["converged"] is False


def test_fit_and_bootstrap(tmp_path):
    assert main(["fit", "--out", str(tmp_path / "f.json")]) == 0
    fit = json.loads((tmp_path / "f.json").read_text())
    assert fit["loadings"]["GINI"]["GINI"] == 1.0
    assert main(["bootstrap", "-B", "10", "--out", str(tmp_path / "b.json")]) == 0
    assert json.loads((tmp_path / "b.json").read_text())["B"] == 10


def test_score_from_blocks(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["score", "--blocks", "fixture", "--out", str(out), "--chart", str(tmp_path / "c.svg")]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "country,di_score,ds_score,sosdit,rank"
    assert lines[1].startswith("FI,")


def test_simulate_csv(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"loadings": {"X": [0.9, 0.9], "Y": [1.0]}, "paths": [{"from": "X", "to": "Y", "beta": 0.5}]}))
    out = tmp_path / "r.csv"
    assert main(["simulate", "--spec", str(spec), "--reps", "3", "--seed", "1", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "kind,block,name,true,mean,bias,mae,rmse"


def test_fetch_offline(tmp_path):
    assert main(["fetch", "--offline", "--cache", str(tmp_path), "--assemble", str(tmp_path / "d.csv")]) == 0
    assert (tmp_path / "d.csv").read_text().startswith("country,Q1-1")
    assert main(["fetch", "--offline", "--cache", str(tmp_path), "Q9-9"]) == 2
