import json
import subprocess
import sys

import numpy as np
import pytest

from smco.cli import cli_main, read_config

QUICK = ["--max-iter", "100"]


def run_cli(capsys, *argv):
    code = cli_main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_json_report(capsys):
    code, out, err = run_cli(capsys, "run", "--fn", "rastrigin", "--dim", "2", "--direction", "min",
                             "--algo", "smco-r", "--starts", "14", "--reps", "10", "--seed", "7",
                             "--format", "json", *QUICK)
    assert code == 0
    report = json.loads(out)
    entry = report["algorithms"]["smco-r"]
    assert {"rmse", "ae50", "ae95", "ae99", "values"} <= set(entry)
    assert len(entry["values"]) == 10
    assert report["best_value"] == min(entry["values"])
    assert report["known_optimum"] == 0.0
    assert "mean time" in err


def test_list(capsys):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0
    names = out.split()
    for name in ("rastrigin", "ackley", "griewank", "michalewicz", "ms", "ew", "smco-br", "spsa"):
        assert name in names


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["run"],
    ["run", "--fn", "rastrigin", "--reps", "zero"],
    ["run", "--fn", "sphere"],
    ["run", "--fn", "rastrigin", "--algo", "nelder-mead"],
    ["run", "--fn", "rastrigin", "--format", "xml"],
    ["run", "--fn", "ms", "--transform", "full"],
    ["hjb", "--eps", "-1"],
    ["hjb", "--bounds", "1", "-1"],
])
def test_bad_arguments_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and err


def test_runtime_failure_exits_1(capsys, tmp_path):
    missing = tmp_path / "no" / "such" / "dir" / "out.json"
    code, _, err = run_cli(capsys, "run", "--fn", "griewank", "--out", str(missing), *QUICK)
    assert code == 1 and err.startswith("error:")


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_payload_identical_across_workers(capsys, fmt):
    argv = ["run", "--fn", "ackley", "--direction", "max", "--transform", "full",
            "--algo", "smco-r", "--algo", "gd", "--starts", "2", "--reps", "6", "--seed", "11",
            "--format", fmt, *QUICK]
    payloads = set()
    for workers in ("1", "4", "8", "1"):
        code, out, _ = run_cli(capsys, *argv, "--workers", workers)
        assert code == 0
        payloads.add(out)
    assert len(payloads) == 1


def test_csv_layout(capsys):
    code, out, _ = run_cli(capsys, "run", "--fn", "griewank", "--algo", "smco", "--algo", "gd",
                           "--reps", "3", "--format", "csv", *QUICK)
    lines = out.splitlines()
    assert lines[0] == "problem,algo,rep,value,abs_err,time_s"
    assert len(lines) == 7
    assert all(line.endswith(",") for line in lines[1:])
    code, out, _ = run_cli(capsys, "run", "--fn", "griewank", "--format", "csv", "--timing", *QUICK)
    assert float(out.splitlines()[1].split(",")[-1]) >= 0


def test_config_file_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# griewank study\nfn = griewank\nalgo = smco, gd\nreps = 2\n"
                   "max-iter = 100\nseed = 5  # trailing comment\n")
    assert read_config(cfg)["algo"] == "smco, gd"
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 0
    report = json.loads(out)
    assert set(report["algorithms"]) == {"smco", "gd"} and report["seed"] == 5
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg), "--seed", "6")
    assert json.loads(out)["seed"] == 6

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run_cli(capsys, "run", "--config", str(bad))[0] == 2


def test_workers_env_default(capsys, monkeypatch):
    monkeypatch.setenv("SMCO_WORKERS", "3")
    argv = ["run", "--fn", "griewank", "--reps", "3", *QUICK]
    code, out_env, _ = run_cli(capsys, *argv)
    assert code == 0
    monkeypatch.setenv("SMCO_WORKERS", "many")
    assert run_cli(capsys, *argv)[0] == 2
    monkeypatch.delenv("SMCO_WORKERS")
    assert run_cli(capsys, *argv)[1] == out_env


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run_cli(capsys, "run", "--fn", "griewank", "--out", str(path), *QUICK)
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["problem"] == "griewank"


def test_hjb_dump(capsys, tmp_path):
    path = tmp_path / "grid.csv"
    code, _, err = run_cli(capsys, "hjb", "--target", "0.3", "--nodes", "51", "--out", str(path))
    assert code == 0 and "u(0, 0.3)" in err
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,u"
    table = np.loadtxt(lines[1:], delimiter=",")
    assert table.shape[1] == 3 and np.all(np.isfinite(table))
    assert np.unique(table[:, 1]).size == 51


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "smco", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "rastrigin" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "smco", "run"], capture_output=True, text=True)
    assert proc.returncode == 2
