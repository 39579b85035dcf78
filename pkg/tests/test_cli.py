import io
import json
import subprocess
import sys

import pytest

from credence.cli import run


@pytest.fixture
def b1(tmp_path):
    path = tmp_path / "b1.toml"
    path.write_text("losses = [1.0, 2.0]\ncosts = [0.2, 0.8]\n")
    return str(path)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(list(argv), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


def test_qcav_binary(b1):
    status, out, _ = call("qcav", "--model", b1, "--prior", "0.5,0.5")
    assert status == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.8, abs=1e-6)
    weights = [e["weight"] for e in doc["splitting"]]
    posts = [e["posterior"] for e in doc["splitting"]]
    assert weights == pytest.approx([1 / 6, 5 / 6], abs=1e-6)
    assert posts[0] == pytest.approx([1.0, 0.0], abs=1e-6)
    assert posts[1] == pytest.approx([0.4, 0.6], abs=1e-6)


def test_benefit_false_above_threshold(b1):
    status, out, _ = call("benefit", "--model", b1, "--prior", "0.2,0.8")
    doc = json.loads(out)
    assert status == 0
    assert doc["verdict"] == "FALSE"
    assert doc["pi_bar"] == pytest.approx(1.0) and doc["second_surplus"] == pytest.approx(0.8)


def test_verify_flags_raised_price(b1, tmp_path):
    status, out, _ = call("solve", "--model", b1, "--prior", "0.5,0.5")
    assert status == 0
    doc = json.loads(out)
    good = tmp_path / "good.profile"
    good.write_text(out)
    assert call("verify", "--model", b1, "--profile", str(good))[0] == 0
    doc["prices"][1] = 1.7
    bad = tmp_path / "bad.profile"
    bad.write_text(json.dumps(doc))
    status, out, _ = call("verify", "--model", b1, "--profile", str(bad))
    assert status == 2
    assert "client_optimality" in json.loads(out)["failures"]


def test_output_is_byte_deterministic(b1):
    first = call("solve", "--model", b1, "--prior", "0.3,0.7")[1]
    second = call("solve", "--model", b1, "--prior", "0.3,0.7")[1]
    assert first == second


def test_profits_and_binary(b1):
    doc = json.loads(call("profits", "--model", b1, "--prior", "0.5,0.5")[1])
    assert doc["pi"] == pytest.approx([0.3, 0.7]) and doc["argmax"] == [2]
    status, out, _ = call("binary", "--model", b1, "--prior", "0.5,0.5", "--spec", "0.8")
    doc = json.loads(out)
    assert status == 0 and doc["regime"] == "below_qhat"
    assert [e["services_value"] for e in doc["equilibria"]] == pytest.approx([0.0, 0.125])
    assert call("binary", "--model", b1, "--prior", "0.5,0.5")[0] == 1


def test_sweep_csv(b1, tmp_path):
    out_path = tmp_path / "sweep.csv"
    status, out, _ = call("sweep", "--model", b1, "--mesh", "10", "--out", str(out_path))
    assert status == 0 and out == ""
    lines = out_path.read_text().splitlines()
    assert lines[0] == "w1,w2,pi_bar,qcav,benefit"
    assert len(lines) == 12
    for line in lines[1:]:
        _, _, pi_bar, value, verdict = line.split(",")
        assert float(value) >= float(pi_bar) - 1e-7
        if verdict == "TRUE":
            assert float(value) > float(pi_bar) + 1e-7
        if verdict == "FALSE":
            assert float(value) <= float(pi_bar) + 1e-7


def test_transform_and_oracle(b1, tmp_path):
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps({
        "signalling": {"1": {"m1": 1.0}, "2": {"m1": 1.0}},
        "pricing": [
            {"type": 1, "message": "m1", "prices": [1.0, 1.6]},
            {"type": 2, "message": "m1", "prices": [1.0, 1.8]},
        ],
    }))
    status, out, _ = call("transform", "--pair", str(pair))
    assert status == 0 and json.loads(out)["paths_preserved"] is True
    status, out, _ = call("oracle", "--model", b1, "--prior", "0.5,0.5")
    assert status == 0 and json.loads(out)["agree"] is True


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["qcav"],
        ["qcav", "--model", "/nonexistent.toml", "--prior", "0.5,0.5"],
        ["nonsense"],
        ["qcav", "--model", "MODEL", "--prior", "0.5,0.6"],
        ["qcav", "--model", "MODEL", "--prior", "a,b"],
        ["qcav", "--model", "MODEL", "--mesh", "many"],
    ],
)
def test_usage_and_validation_errors(b1, argv):
    argv = [b1 if a == "MODEL" else a for a in argv]
    status, out, err = call(*argv)
    assert status == 1 and out == "" and err


def test_invalid_model_file(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("losses = [1.0, 2.0]\ncosts = [0.8, 0.2]\n")
    status, _, err = call("qcav", "--model", str(path), "--prior", "0.5,0.5")
    assert status == 1 and "index 2" in err


def test_console_entry_point(b1):
    proc = subprocess.run(
        [sys.executable, "-m", "credence.cli", "benefit", "--model", b1, "--prior", "0.5,0.5"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "TRUE"
