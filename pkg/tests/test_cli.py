"""Command line contract: subcommand dispatch, output formats, exit
codes, and byte-stable serialization."""

import json
import subprocess
import sys

import pytest

from tandemq import cli
from tandemq.errors import ToleranceNotAchieved


def run_cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "tandemq.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def test_kt00_csv_table():
    r = run_cli("kt00", "--rates", "1,2,4", "--t", "0.5,1")
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert lines[0].rstrip("\r") == "t,value,abs_error,method"
    rows = [ln.rstrip("\r").split(",") for ln in lines[1:]]
    assert [row[0] for row in rows] == ["0.5", "1"]
    assert all(row[3] == "stationary" for row in rows)
    vals = [float(row[1]) for row in rows]
    assert all(0.375 < v < 1.0 for v in vals)
    assert vals[0] > vals[1]
    assert "auto method -> stationary" in r.stderr


def test_kt00_short_time_near_one():
    r = run_cli("kt00", "--rates", "1,2", "--t", "0.001")
    val = float(r.stdout.strip().splitlines()[1].split(",")[1])
    assert abs(val - 1.0) < 5e-3


def test_kt00_method_dispatch():
    direct = run_cli("kt00", "--rates", "1,2,4", "--t", "1", "--method", "direct")
    stat = run_cli("kt00", "--rates", "1,2,4", "--t", "1", "--method", "stationary")
    general = run_cli("kt00", "--rates", "1,2,4", "--t", "1", "--method", "general")
    a = float(direct.stdout.splitlines()[1].split(",")[1])
    b = float(stat.stdout.splitlines()[1].split(",")[1])
    c = float(general.stdout.splitlines()[1].split(",")[1])
    assert abs(a - b) < 1e-8 and abs(a - c) < 1e-6


def test_kt00_auto_falls_back_when_unstable():
    # unstable but distinct services: auto must route to the direct form
    r = run_cli("kt00", "--rates", "3,2,5", "--t", "1")
    assert r.returncode == 0
    assert "auto method -> direct" in r.stderr


def test_kt00_coincident_services_exit_2():
    r = run_cli("kt00", "--rates", "1,2,2", "--t", "1", "--method", "direct")
    assert r.returncode == 2
    assert "rates not distinct" in r.stderr


def test_kt00_json_reruns_identical():
    a = run_cli("kt00", "--rates", "1,2,4", "--t", "0.25,1,4", "--format", "json")
    b = run_cli("kt00", "--rates", "1,2,4", "--t", "0.25,1,4", "--format", "json")
    assert a.stdout == b.stdout
    rows = json.loads(a.stdout)
    assert [r["t"] for r in rows] == [0.25, 1, 4]
    assert set(rows[0]) == {"t", "value", "abs_error", "method"}


def test_kt_path_dispatch():
    bessel = run_cli("kt", "--rates", "1,2", "--q", "0", "--q2", "0", "--t", "1")
    assert bessel.returncode == 0
    assert bessel.stdout.splitlines()[1].rstrip("\r").split(",")[-1] == "bessel"
    equal = run_cli("kt", "--rates", "1,1,1", "--q", "1,0", "--q2", "0,0", "--t", "1")
    assert equal.stdout.splitlines()[1].rstrip("\r").split(",")[-1] == "equal-rates"
    general = run_cli("kt", "--rates", "1,2,4", "--q", "1,0", "--q2", "0,1", "--t", "1")
    assert general.stdout.splitlines()[1].rstrip("\r").split(",")[-1] == "intertwining"


def test_kt_agrees_across_paths():
    # the intertwining route at the empty state must reproduce kt00
    general = run_cli("kt", "--rates", "1,2,4", "--q", "0,0", "--q2", "0,0", "--t", "1")
    v1 = float(general.stdout.splitlines()[1].split(",")[3])
    kt00 = run_cli("kt00", "--rates", "1,2,4", "--t", "1")
    v2 = float(kt00.stdout.splitlines()[1].split(",")[1])
    assert abs(v1 - v2) < 1e-6


def test_kt_rejects_negative_queue():
    r = run_cli("kt", "--rates", "1,2", "--q", "-1", "--q2", "0", "--t", "1")
    assert r.returncode == 2


def test_relaxation_report():
    r = run_cli("relaxation", "--rates", "1,4,2,3")
    assert r.returncode == 0
    rep = json.loads(r.stdout)
    assert rep["analytic_rate"] == pytest.approx(3 - 2 * 2**0.5, rel=1e-12)
    assert rep["relaxation_time"] == pytest.approx(1 / (3 - 2 * 2**0.5), rel=1e-12)
    assert rep["bottleneck_station"] == 2
    assert rep["dominant_arrangement"] == [4, 3, 1, 2]
    assert rep["prefactor"] == pytest.approx(12.0, rel=1e-9)
    assert "fitted_rate" not in rep


def test_relaxation_with_grid_fits():
    r = run_cli("relaxation", "--rates", "1,4,2,3", "--t", "30,40,50,60,70,80")
    assert r.returncode == 0
    rep = json.loads(r.stdout)
    assert rep["fit_points"] >= 4
    # pre-asymptotic grid: fitted rate is near, but above, the limit rate
    assert rep["analytic_rate"] < rep["fitted_rate"] < 1.5 * rep["analytic_rate"]
    assert 0.5 < rep["ratio_to_leading_term"] < 1.5


def test_relaxation_unstable_exit_2():
    r = run_cli("relaxation", "--rates", "2,1")
    assert r.returncode == 2
    assert "unstable" in r.stderr


def test_verify_identities_fast():
    r = run_cli("verify", "identities", "--budget", "fast")
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert all(": PASS" in ln for ln in lines)
    assert "verify suite=identities" in r.stderr


def test_verify_json_format():
    r = run_cli("verify", "asymptotics", "--budget", "fast", "--format", "json")
    assert r.returncode == 0
    rows = json.loads(r.stdout)
    assert all(row["passed"] is True for row in rows)
    assert all(row["budget"] == "fast" for row in rows)


def test_verify_unknown_suite_exit_2():
    assert run_cli("verify", "nonsense").returncode == 2


def test_verify_failure_exit_4(monkeypatch, capsys):
    from tandemq.verify import CheckResult

    monkeypatch.setattr(
        cli.verify_mod,
        "run_suite",
        lambda suite, budget: [CheckResult("demo", False, 1.0, "forced")],
    )
    code = cli.main(["verify", "all"])
    assert code == 4
    out = capsys.readouterr()
    assert "demo: FAIL" in out.out


def test_tolerance_failure_exit_3(monkeypatch, capsys):
    def boom(*a, **k):
        raise ToleranceNotAchieved(1e-10, 1e-3, "forced")

    monkeypatch.setattr(cli.queueprobs, "kt00_stationary", boom)
    code = cli.main(["kt00", "--rates", "1,2", "--t", "1"])
    assert code == 3
    assert "tolerance" in capsys.readouterr().err.lower()


def test_simulate_kt_reruns_byte_identical():
    args = ("simulate", "kt", "--rates", "1,2", "--q", "0", "--q2", "0",
            "--t", "1", "--seed", "11", "--reps", "20000")
    a = run_cli(*args)
    b = run_cli(*args)
    c = run_cli(*args, "--jobs", "2")
    assert a.returncode == 0
    assert a.stdout == b.stdout == c.stdout
    lines = a.stdout.strip().splitlines()
    assert lines[0].rstrip("\r") == "estimate,half_width_95,reps,seed"
    est = float(lines[1].split(",")[0])
    assert 0 < est < 1


def test_simulate_noncross_target():
    r = run_cli("simulate", "noncross", "--rates", "3,2,1", "--x", "2,1,0",
                "--t", "1", "--seed", "3", "--reps", "10000")
    assert r.returncode == 0
    est = float(r.stdout.strip().splitlines()[1].split(",")[0])
    assert 0 < est < 1


def test_simulate_bad_inputs_exit_2():
    r = run_cli("simulate", "noncross", "--rates", "1,2", "--x", "0,1",
                "--t", "1", "--reps", "100")
    assert r.returncode == 2
    r = run_cli("simulate", "kt", "--rates", "1,2", "--q", "0", "--q2", "0",
                "--t", "1", "--reps", "0")
    assert r.returncode == 2
    r = run_cli("simulate", "kt", "--rates", "1,2", "--t", "1", "--reps", "100")
    assert r.returncode == 2


def test_precision_env_flows_through():
    import os

    env = dict(os.environ, TANDEMQ_PRECISION="high")
    r = run_cli("kt00", "--rates", "1,2,4", "--t", "1", env=env)
    assert r.returncode == 0
    hi = float(r.stdout.splitlines()[1].split(",")[1])
    lo = float(run_cli("kt00", "--rates", "1,2,4", "--t", "1").stdout.splitlines()[1].split(",")[1])
    assert abs(hi - lo) < 1e-9
