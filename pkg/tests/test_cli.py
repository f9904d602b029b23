import csv
import json
import subprocess
import sys

import pytest

from mubqss.cli import SWEEP_HEADER, main


def run_cli(*argv):
    return main(list(argv))


def test_run_worked(tmp_path):
    out = tmp_path / "t.json"
    assert run_cli("run", "--d", "5", "--t", "2", "--n", "3", "--secret", "4", "--seed", "42", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["recovered"] == {"1": 4, "2": 4} and doc["aborted"] is None and doc["seed"] == 42


@pytest.mark.parametrize("argv,msg", [
    (["run", "--d", "4", "--t", "2", "--n", "3"], "d must be an odd prime"),
    (["run", "--d", "5", "--t", "6", "--n", "3"], "t must not exceed n"),
    (["run", "--d", "5", "--t", "2", "--secret", "9"], "secret"),
    (["run", "--d", "5", "--t", "2", "--n", "3", "--recovery-set", "1,4"], "participant index"),
    (["run", "--t", "2"], "required"),
    (["mub-verify", "--d", "4"], "odd prime"),
    (["attack", "--type", "collusion", "--d", "5", "--t", "3", "--position", "1"], "t-1"),
    (["attack", "--type", "intercept-resend", "--d", "5", "--t", "3", "--position", "3"], "hop"),
    (["sweep", "--ds", ""], "non-empty"),
    (["sweep", "--ds", "3", "--ts", "3"], "n must be at most"),
])
def test_invalid_parameters(argv, msg, capsys):
    assert run_cli(*argv) == 2
    captured = capsys.readouterr()
    assert msg in captured.err and captured.out == ""


def test_io_failure(tmp_path, capsys):
    assert run_cli("run", "--d", "5", "--t", "2", "--out", str(tmp_path / "missing" / "x.json")) == 3
    assert "I/O error" in capsys.readouterr().err


def test_run_stdout_and_dump(capsys):
    assert run_cli("run", "--d", "3", "--t", "2", "--seed", "1", "--dump-states") == 0
    doc = json.loads(capsys.readouterr().out)
    states = [e["state"] for p in doc["phases"] for e in p["events"] if "state" in e]
    assert states and all(len(s) == 3 and len(s[0]) == 2 for s in states)


def test_secret_default_recorded(capsys, monkeypatch):
    monkeypatch.setenv("QSS_SEED", "77")
    assert run_cli("run", "--d", "7", "--t", "3", "--n", "4") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["seed"] == 77 and 0 <= doc["secret_S"] < 7
    assert set(doc["recovered"].values()) == {doc["secret_S"]}


def test_attack_collusion(capsys):
    assert run_cli("attack", "--type", "collusion", "--d", "3", "--t", "2", "--seed", "1") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["posterior"] == {"0": 1, "1": 1, "2": 1}


def test_attack_dishonest(capsys):
    assert run_cli("attack", "--type", "dishonest", "--d", "5", "--t", "3", "--trials", "100") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["detection_rate"] == 1.0 and doc["cheater_identified_rate"] == 1.0


def test_attack_intercept(capsys):
    assert run_cli("attack", "--type", "intercept-resend", "--d", "5", "--t", "3", "--position", "1",
                   "--trials", "2000", "--seed", "7") == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) >= {"kind", "trials", "eve_basis_match_rate", "eve_secret_guess_rate", "detection_rate",
                        "cheater_identified_rate", "posterior", "seed"}
    assert abs(doc["eve_basis_match_rate"] - 0.2) < 0.03 and abs(doc["detection_rate"] - 0.64) < 0.04


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert run_cli("sweep", "--ds", "3,5,7", "--attacks", "intercept-resend", "--trials", "1500",
                   "--seed", "2", "--out", str(out)) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "d,t,attack,metric,value,ci3sigma,trials,seed"
    rows = list(csv.DictReader(text.splitlines()))
    assert list(rows[0]) == SWEEP_HEADER
    match = {int(r["d"]): float(r["value"]) for r in rows if r["metric"] == "eve_basis_match_rate"}
    for d, rate in match.items():
        assert abs(rate - 1 / d) <= 3 * (1 / d * (1 - 1 / d) / 1500) ** 0.5


def test_mub_verify(capsys):
    assert run_cli("mub-verify", "--d", "7", "--tol", "1e-9") == 0
    assert "OK, 8 bases" in capsys.readouterr().out
    assert run_cli("mub-verify", "--d", "3") == 0
    assert "4 bases" in capsys.readouterr().out


def test_mub_verify_violation(capsys):
    assert run_cli("mub-verify", "--d", "5", "--tol", "-1") == 1
    assert "FAIL" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        proc = subprocess.run([sys.executable, "-m", "mubqss", "run", "--d", "5", "--t", "2", "--n", "3",
                               "--seed", "42", "--out", str(path)], capture_output=True)
        assert proc.returncode == 0 and proc.stdout == b""
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
