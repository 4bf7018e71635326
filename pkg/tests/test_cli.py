import json
import subprocess
import sys

import pytest

from stuforge.cli import CURVE_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def payload(text):
    return json.loads(text)["result"]


def test_spectra_json(capsys):
    code, out, _ = run(capsys, "spectra", "--energies", "0,1,2", "--beta", "1")
    assert code == 0
    res = payload(out)
    assert res["entropy"] == pytest.approx(0.83239558183993887, abs=1e-14)
    assert json.loads(out)["config"]["energies"] == "0,1,2"


def test_infinite_beta_is_serialised_as_string(capsys):
    code, out, _ = run(capsys, "spectra", "--energies", "0,1,2", "--target-energy", "0")
    assert code == 0 and payload(out)["beta_for_energy"] == "inf"


@pytest.mark.parametrize("argv", [
    ["spectra", "--energies", "0,2,1", "--beta", "1"],
    ["spectra", "--beta", "1"],
    ["stu", "norm", "--energies", "0,1,2", "--beta", "x", "--beta-prime", "1"],
    ["nonsense"],
    ["polytope", "--energies", "0,1,2,3,4", "--beta", "1"],
    ["bounds", "asym", "--energies-a", "0,1", "--energies-b", "0,1", "--budget", "-1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 64 and "usage error" in err


def test_stu_builders(capsys):
    for method in ("majorised", "norm", "geometric"):
        code, out, _ = run(capsys, "stu", method, "--energies", "0,1,2", "--beta", "1",
                           "--beta-prime", "0.5")
        assert code == 0, method
        assert payload(out)["passed"]


def test_stu_csv_row(capsys):
    code, out, _ = run(capsys, "stu", "geometric", "--energies", "0,1,1.2,5", "--beta", "2",
                       "--beta-prime", "0.1", "--format", "csv")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0
    assert lines[0] == "beta,beta_prime,deviation_A,deviation_B,delta_E,delta_I,pass"
    assert lines[1].endswith(",1")


def test_norm_refusal_is_negative_result(capsys):
    code, out, _ = run(capsys, "stu", "norm", "--energies", "0,0.01,0.02,50", "--beta", "1",
                       "--beta-prime", "0.5")
    assert code == 1
    assert payload(out)["flag"] == "cond_ii_strong"


def test_counterexample_command(capsys):
    code, out, _ = run(capsys, "stu", "majorised", "--counterexample-d4", "--shuffles", "3")
    res = payload(out)
    assert code == 0 and res["certified"]
    assert res["claim1"]["gap"] > 1e-6 and res["claim2"]["gap"] > 1e-6


def test_bounds_curve_csv_default(capsys):
    code, out, _ = run(capsys, "bounds", "curve", "--energies", "0,1,2", "--beta", "1",
                       "--grid", "5")
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0
    assert rows[0] == ",".join(CURVE_HEADER) and len(rows) == 6


def test_bounds_asym(capsys):
    code, out, _ = run(capsys, "bounds", "asym", "--energies-a", "0,1", "--energies-b", "0,1,2",
                       "--budget", "0.5")
    res = payload(out)
    assert code == 0
    assert res["mutual_information"] == pytest.approx(1.1246702892376167, abs=1e-9)
    assert res["identity_gap"] <= 1e-9


def test_polytope_membership(capsys):
    code, out, _ = run(capsys, "polytope", "--energies", "0,1,2", "--beta", "1", "--beta-prime", "0.3")
    assert code == 0 and payload(out)["feasible"]
    code, _, _ = run(capsys, "polytope", "--energies", "0,1,2", "--beta", "1", "--point=-0.98,-0.98")
    assert code == 1
    code, out, _ = run(capsys, "polytope", "--energies", "0,1,2", "--beta", "1", "--emit-vertices")
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == "x0,x1,label" and len(rows) == 37


def test_d5_region_exit_codes(capsys):
    code, _, _ = run(capsys, "stu", "geometric", "--energies", "0,1,2,3,4", "--beta", "2",
                     "--beta-prime", "1")
    assert code == 0
    code, _, _ = run(capsys, "stu", "geometric", "--energies", "0,1,2,3,4", "--beta", "0.3")
    assert code == 1


def test_copies_and_oracle(capsys):
    code, out, _ = run(capsys, "copies", "simulate", "--energies", "0,1,2", "--beta", "2", "--n", "2",
                       "--schedule", "1.5,1")
    assert code == 0 and payload(out)["passed"]
    code, out, _ = run(capsys, "oracle", "sample", "--energies", "0,1,2", "--beta", "1", "--count", "20")
    assert code == 0 and payload(out)["escapes"] == 0
    code, out, _ = run(capsys, "oracle", "cross", "--energies", "0,1,2", "--beta", "1",
                       "--beta-prime", "0.5")
    assert code == 0 and payload(out)["agree"]


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "spectra", "--energies", "0,1", "--beta", "1", "--output", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["result"]["d"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stuforge.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "stuforge" in proc.stdout
