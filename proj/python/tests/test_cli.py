import json
import os
import shutil
import subprocess

import pytest

CLI = os.environ.get("QADD_CLI") or shutil.which("qadd")
pytestmark = pytest.mark.skipif(CLI is None, reason="qadd executable not found")


def run(*args, env=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env)


def test_certify_additive():
    p = run("certify", "--state", "plus", "--set", '{"type":"av_qubit","lambda":0.0}', "--alpha", "1")
    assert p.returncode == 0, p.stderr
    out = json.loads(p.stdout)
    assert out["verdict"] == "Additive"
    assert list(out)[:6] == ["verdict", "sup_value", "q_value", "margin", "witness", "search"]


def test_example_stein_bounds():
    p = run("example", "qubit-av", "--lambda", "0.4", "--what", "stein")
    assert p.returncode == 0, p.stderr
    out = json.loads(p.stdout)
    assert abs(out["lower"] - 0.6931) < 5e-4
    assert abs(out["upper"] - 0.7803) < 5e-4


def test_sweep_csv(tmp_path):
    out = tmp_path / "fpn.csv"
    env = dict(os.environ, QADD_THREADS="2")
    p = run("sweep-fpn", "--p", "0.70", "--p", "0.74", "--n-max", "30", "--out", str(out), env=env)
    assert p.returncode == 0, p.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "n,p,f_closed,f_quad"
    assert len(lines) == 61
    assert lines[1].startswith("1,0.7,")
    assert lines[31].startswith("1,0.74,")


def test_validation_exit_code():
    p = run("minimize", "--state", "[[1,0.5],[0,1]]", "--set", '{"type":"av_qubit","lambda":0}')
    assert p.returncode == 2
    err = json.loads(p.stderr)["error"]
    assert err["code"] == "ValidationError"
    assert "state[0][1]" in err["message"]


def test_unknown_field_exit_code():
    p = run("minimize", "--state", "plus", "--set", '{"type":"av_qubit","lambda":0,"x":1}')
    assert p.returncode == 2
    assert "set.x" in json.loads(p.stderr)["error"]["message"]


def test_rate_out_of_window():
    p = run("exponent", "hoeffding", "--state", "plus", "--set", '{"type":"av_qubit","lambda":0.4}', "--rate", "0.1")
    assert p.returncode == 2
    assert json.loads(p.stderr)["error"]["code"] == "RateOutOfWindow"


def test_deterministic_output():
    args = ("example", "qubit-av", "--lambda", "0.44", "--what", "certify")
    a, b = run(*args), run(*args)
    assert a.returncode == 0
    assert a.stdout == b.stdout


def test_exponent_csv():
    p = run("exponent", "chernoff", "--state", "plus", "--set", '{"type":"av_qubit","lambda":0.4}', "--format", "csv")
    assert p.returncode == 0, p.stderr
    assert p.stdout.splitlines()[0] == "kind,rate,value,lower,upper,certified"


def test_conditional_example():
    p = run("example", "conditional", "--seed", "3")
    assert p.returncode == 0, p.stderr
    assert abs(json.loads(p.stdout)["additivity_gap"]) < 1e-6
