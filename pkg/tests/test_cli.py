import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from oracles import frobenius_trace as ap_oracle
from wittlift import cli
from wittlift.canlift import in_twist_orbit

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("WITTLIFT_REGEN_GOLDEN") == "1"

CASES = {
    "hasse_curve": ["hasse", "--curve", "1,0", "-p", "5"],
    "hasse_poly": ["hasse", "--poly", "x^3+y^3+z^3", "-p", "7"],
    "fsplit_poly": ["fsplit", "--poly", "x^3+y^3+z^3", "-p", "5"],
    "fsplit_curve": ["fsplit", "--curve", "1,0", "-p", "5"],
    "canlift_curve": ["canlift", "--curve", "1,0", "-p", "5"],
    "canlift_poly": ["canlift", "--poly", "x^3+y^3+z^3", "-p", "7"],
    "canlift_legendre": ["canlift", "--legendre", "-p", "5", "-D", "8"],
    "frobmat_canonical": ["frobmat", "--curve", "1,1", "-p", "5"],
    "frobmat_given": ["frobmat", "--curve", "1,0", "--lift", "11,0", "-p", "5"],
    "frobmat_naive": ["frobmat", "--curve", "0,1", "-p", "5", "--slack", "3"],
    "uniq_test": ["uniq-test", "--curve", "1,0", "-p", "5"],
    "coords": ["coords", "--lift", "((1+t)^p-1-t^p)/p", "-p", "5", "-D", "12"],
    "coords_two_vars": ["coords", "--lift", "s + 2;t + s^2", "--vars", "s,t", "-p", "3", "-D", "4"],
    "coords_not_ordinary": ["coords", "--lift", "t^2", "-p", "5", "-D", "6"],
    "qfsplit_ordinary": ["qfsplit", "--curve", "1,0", "-p", "5"],
    "qfsplit_supersingular": ["qfsplit", "--curve", "0,1", "-p", "5"],
    "suite_subset": ["suite", "--only", "3"],
    # computation errors, exit code 1
    "error_supersingular_lift": ["canlift", "--curve", "0,1", "-p", "5"],
    "error_singular": ["frobmat", "--curve", "0,0", "-p", "5"],
    "error_inconsistent_lift": ["frobmat", "--curve", "1,0", "--lift", "2,0", "-p", "5"],
    "error_small_prime": ["qfsplit", "--curve", "1,0", "-p", "3"],
    "error_not_calabi_yau": ["hasse", "--poly", "x^2+y^2+z^2", "-p", "5"],
    "error_legendre_small_prime": ["canlift", "--legendre", "-p", "3"],
}

USAGE_CASES = {
    "usage_composite_prime": ["hasse", "--curve", "1,0", "-p", "9"],
    "usage_bad_pair": ["hasse", "--curve", "1", "-p", "5"],
    "usage_bad_poly": ["fsplit", "--poly", "x^", "-p", "5"],
    "usage_no_command": [],
    "usage_slack": ["frobmat", "--curve", "1,0", "-p", "5", "--slack", "1"],
    "usage_zero_degree": ["coords", "--lift", "t", "-p", "5", "-D", "0"],
    "usage_bad_lift": ["coords", "--lift", "t^", "-p", "5"],
    "usage_suite_ids": ["suite", "--only", "11"],
    "usage_two_sources": ["canlift", "--curve", "1,0", "--legendre", "-p", "5"],
}


def check_golden(name, text, suffix):
    path = GOLDEN / f"{name}.{suffix}"
    if REGEN:
        path.write_text(text)
    assert path.exists(), f"missing golden file {path.name}"
    assert text == path.read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = cli.run(CASES[name])
    assert code == (1 if name.startswith("error_") else 0)
    payload = json.loads(text)
    if code:
        assert set(payload["error"]) == {"code", "message", "context"}
    check_golden(name, text, "json")


@pytest.mark.parametrize("name", sorted(USAGE_CASES))
def test_usage_errors(name):
    code, text = cli.run(USAGE_CASES[name])
    assert code == 2
    check_golden(name, text + "\n", "txt")


def load(name):
    return json.loads((GOLDEN / f"{name}.json").read_text())


# ---------------------------------------------------------------------------
# the frozen values agree with independent computations


def test_hasse_values():
    assert load("hasse_curve") == {"hasse_scalar": 2, "ordinary": True, "smooth": True}
    assert load("hasse_poly")["hasse_scalar"] == 6
    assert load("fsplit_poly") == {"hasse_scalar": 0, "split": False}


def test_canlift_consistent_with_uniq_test():
    lift = load("canlift_curve")
    rep = load("uniq_test")
    assert [lift["a_tilde"], lift["b_tilde"]] == rep["canonical"]
    assert rep["single_orbit"] and rep["contains_canonical"]
    for pair in rep["f1_lifts"]:
        assert in_twist_orbit(pair, rep["canonical"], 5)


def test_frobmat_anchors():
    for name in ("frobmat_canonical", "frobmat_given", "frobmat_naive"):
        out = load(name)
        assert out["det"] == 5
        assert out["trace"] % 25 == ap_oracle(out["a_tilde"] % 5, out["b_tilde"] % 5, 5) % 25
    assert load("frobmat_given")["f1_preserved"]
    assert load("frobmat_naive")["lift"] == "naive"


def test_coords_report():
    out = load("coords")
    assert out["q_tilde"] == ["t + 1"]
    assert out["teichmuller_point"] == [0]
    assert out["ordinary"]
    assert load("coords_two_vars")["teichmuller_point"] == [6, 0]
    assert load("coords_not_ordinary")["ordinary"] is False


def test_error_codes():
    assert load("error_supersingular_lift")["error"]["code"] == "not_f_split"
    assert load("error_singular")["error"]["code"] == "singular_curve"


# ---------------------------------------------------------------------------
# process-level behaviour


def test_output_file(tmp_path):
    target = tmp_path / "out.json"
    code, text = cli.run(["-o", str(target), "hasse", "--curve", "1,0", "-p", "5"])
    assert code == 0
    assert target.read_text() == text


def test_slack_environment(monkeypatch):
    monkeypatch.setenv("WITTLIFT_SLACK", "4")
    code, text = cli.run(["frobmat", "--curve", "1,1", "-p", "5"])
    assert code == 0 and json.loads(text)["slack"] == 4
    monkeypatch.setenv("WITTLIFT_SLACK", "0")
    code, _ = cli.run(["frobmat", "--curve", "1,1", "-p", "5"])
    assert code == 2


def test_run_config_validation():
    with pytest.raises(cli.UsageError):
        cli.RunConfig("hasse", p=2).validate()
    with pytest.raises(cli.UsageError):
        cli.RunConfig("coords", p=5, D=0).validate()
    cli.RunConfig("frobmat", p=7, slack=2, D=3).validate()


def test_console_script_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "wittlift.cli", "hasse", "--curve", "1,0", "-p", "5"],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    assert ok.stdout == (GOLDEN / "hasse_curve.json").read_text()
    bad = subprocess.run([sys.executable, "-m", "wittlift.cli", "hasse", "-p", "5"], capture_output=True, text=True)
    assert bad.returncode == 2
    assert bad.stdout == "" and "usage:" in bad.stderr
    err = subprocess.run([sys.executable, "-m", "wittlift.cli", "canlift", "--curve", "0,1", "-p", "5"],
                         capture_output=True, text=True)
    assert err.returncode == 1
    assert json.loads(err.stdout)["error"]["code"] == "not_f_split"
