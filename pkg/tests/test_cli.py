import json

import numpy as np
import pytest

from mecpath.cli import (EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO, EXIT_NO_INPUT, EXIT_OK,
                         EXIT_TIMED_OUT, main)
from mecpath.report import TIMESERIES_COLUMNS

HEADER = "t,s_r,z,theta,beta,psi_dot,delta,z_M,theta_M,u,u_M,u_c,kappa,kappa_r,xi,eta,theta_o\n"


def write(tmp_path, doc, name="scenario.json"):
    f = tmp_path / name
    f.write_text(json.dumps(doc), encoding="utf-8")
    return str(f)


SHORT = {"simulation": {"t_max": 8.0, "skip_arclength": 0.0}}


def test_timeseries_golden_header_and_format(tmp_path):
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, SHORT), "--out", str(out)]) == EXIT_TIMED_OUT
    text = (out / "timeseries.csv").read_bytes().decode()
    assert text.startswith(HEADER)
    assert ",".join(TIMESERIES_COLUMNS) + "\n" == HEADER
    assert "\r" not in text and text.endswith("\n")
    first = text.splitlines()[1].split(",")
    assert len(first) == 17
    assert first[2] == "3.0000000000000000e+00"
    assert all("e" in v for v in first)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "TimedOut"
    assert set(summary) >= {"status", "max_error", "max_error_raw", "final_s_r", "wall_clock_s", "config"}


def test_round_trip_reproduces_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", write(tmp_path, SHORT), "--out", str(a), "--dt", "1e-3"]) == EXIT_TIMED_OUT
    echo = json.loads((a / "summary.json").read_text())["config"]
    assert main(["run", write(tmp_path, echo, "echo.json"), "--out", str(b)]) == EXIT_TIMED_OUT
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()


def test_svg_does_not_change_numbers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["run", write(tmp_path, SHORT), "--out", str(a)])
    main(["run", write(tmp_path, SHORT), "--out", str(b), "--svg"])
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()
    for name in ("trajectory.svg", "error.svg"):
        assert (b / name).read_text().lstrip().startswith("<?xml")
    assert not (a / "trajectory.svg").exists()


def test_matched_run_exit_zero(tmp_path):
    doc = {"output": {"decimate": 100}}
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, doc), "--out", str(out)]) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert s["status"] == "Completed"
    assert s["max_error"] <= 0.05
    assert s["config"]["output"]["decimate"] == 100


def test_diverged_exit(tmp_path, capsys):
    doc = {"path": {"builtin": 2}, "vehicle": {"C": 100}, "controller": {"mode": "feedforward"},
           "output": {"decimate": 50}}
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, doc), "--out", str(out)]) == EXIT_DIVERGED
    s = json.loads((out / "summary.json").read_text())
    assert s["status"] == "Diverged" and s["max_error"] == "Diverged"


def test_config_error_names_dt(tmp_path, capsys):
    assert main(["run", write(tmp_path, {"simulation": {"dt": 0}}), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "dt" in capsys.readouterr().err
    assert main(["run", "--dt", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_unreadable_and_unwritable(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_NO_INPUT
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", write(tmp_path, SHORT), "--out", str(blocker / "sub")]) == EXIT_IO
    err = capsys.readouterr().err
    assert "cannot read scenario" in err and "cannot write output" in err


def test_bad_arguments_are_config_errors(tmp_path):
    assert main(["sweep", "--c-values", "a,b"]) == EXIT_CONFIG
    assert main(["run", "--mode", "pid"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG


def test_sweep_single_matched_row(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["sweep", "--c-values", "200", "--out", str(out)]) == EXIT_OK
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "C,C_over_CM,conventional_max_error,proposed_max_error"
    c, ratio, conv, prop = lines[1].split(",")
    assert (float(c), float(ratio)) == (200.0, 1.0)
    assert conv == prop
    md = (out / "sweep.md").read_text()
    assert "| C | C/C_M |" in md and "| 200 | 1.00 |" in md


def test_sweep_path2_c100(tmp_path):
    out = tmp_path / "s"
    assert main(["sweep", "--path", "2", "--c-values", "100", "--conventional", "feedforward",
                 "--out", str(out), "--svg"]) == EXIT_OK
    row = (out / "sweep.csv").read_text().splitlines()[1].split(",")
    assert row[2] == "Diverged"
    assert float(row[3]) > 0
    assert (out / "sweep.svg").exists()


def test_path_command(tmp_path):
    out = tmp_path / "p"
    assert main(["path", "--path", "1", "--out", str(out), "--svg"]) == EXIT_OK
    data = np.loadtxt(out / "path.csv", delimiter=",", skiprows=1)
    assert data.shape == (15001, 5)
    assert (out / "path.csv").read_text().splitlines()[0] == "s,xi_r,eta_r,theta_r,kappa_r"
    assert (out / "path.svg").exists()
    assert main(["path", "--path", "2", "--out", str(out)]) == EXIT_OK
    data = np.loadtxt(out / "path.csv", delimiter=",", skiprows=1)
    assert np.all(data[:1001, 2] == -3.0)
    assert main(["path", "--path", "3", "--out", str(out)]) == EXIT_CONFIG
    assert main(["path", "--path", "1", "--ds", "0", "--out", str(out)]) == EXIT_CONFIG


def test_path_from_file(tmp_path):
    f = write(tmp_path, {"path": {"segments": [{"s_start": 0, "s_end": 20, "kind": "constant",
                                                "c": 0.05}]}}, "p.json")
    out = tmp_path / "p"
    assert main(["path", "--path", f, "--out", str(out), "--ds", "0.5"]) == EXIT_OK
    assert len((out / "path.csv").read_text().splitlines()) == 42
