import json
import subprocess
import sys

import pytest

from hilbcolim.cli import main

from test_fileformat import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_lemma(capsys):
    code, out, _ = run(capsys, "verify-lemma", "--samples", 2000, "--seed", 3)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["command"] == "verify-lemma" and rep["seed"] == 3
    assert {c["name"] for c in rep["checks"]} == {"all_hold", "worst_residual", "equality_cases"}


def test_reports_are_byte_stable(capsys):
    args = ("verify-lemma", "--samples", 500, "--seed", 9, "--max-dim", 5)
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_colimit_diag(capsys):
    code, out, _ = run(
        capsys, "colimit", DATA / "diag_half.json", "--class", "0:[1, 0]", "--class", "0:[0, 1]", "--class", "2:[[0, 1], 1]"
    )
    rep = json.loads(out)
    assert code == 0
    checks = {c["name"]: c for c in rep["checks"]}
    assert abs(checks["norm[0]"]["value"] - 1.0) < 1e-12
    assert checks["is_zero[1]"]["value"] is True
    assert checks["is_zero[0]"]["value"] is False
    assert checks["norm[2]"]["value"] == pytest.approx(1.0, abs=1e-12)
    assert checks["inner[0,2]"]["value"][1] == pytest.approx(1.0, abs=1e-12)


def test_tensor_check(capsys):
    code, out, _ = run(capsys, "tensor-check", DATA / "diag_half.json", "--samples", 20, "--h-dim", 2)
    assert code == 0 and json.loads(out)["verdict"] == "pass"


@pytest.mark.parametrize("r", ["unit_at_zero", "continuous_clamp"])
def test_normalize_all_two(capsys, r):
    code, out, _ = run(capsys, "normalize", DATA / "all_two.json", "--r", r, "--depth", 6)
    rep = json.loads(out)
    assert code == 0
    assert [e["log2"] for e in rep["eta"]] == [0, -1, -2, -3, -4, -5]
    assert rep["chain"]["category"] == "contraction"


@pytest.mark.parametrize("which", ["scaling", "embedding"])
def test_counterexample(capsys, which):
    code, out, _ = run(capsys, "counterexample", which, "--depth", 10)
    assert code == 0 and json.loads(out)["verdict"] == "pass"


@pytest.mark.parametrize("name, verdict", [("diag_half", "bounded"), ("identity3", "bounded"), ("scaling", "unbounded"), ("embedding", "unbounded")])
def test_universal_map(capsys, name, verdict):
    code, out, _ = run(capsys, "universal-map", DATA / f"{name}.json", "--depth", 12)
    rep = json.loads(out)
    assert code == 0, rep
    assert rep["dichotomy"]["verdict"] == verdict


def test_failed_check_exits_one(tmp_path, capsys):
    rec = json.loads((DATA / "diag_half.json").read_text())
    rec["cocone"]["prefix_components"] = [[[0, 1]]]
    p = tmp_path / "bad_cocone.json"
    p.write_text(json.dumps(rec))
    code, out, _ = run(capsys, "universal-map", p, "--depth", 4)
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_errors_exit_two(tmp_path, capsys):
    code, _, err = run(capsys, "colimit", tmp_path / "missing.json")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "colimit", DATA / "diag_half.json", "--class", "0:[1]")
    assert code == 2
    code, _, err = run(capsys, "colimit", DATA / "diag_half.json", "--class", "nonsense")
    assert code == 2
    code, _, err = run(capsys, "universal-map", DATA / "all_two.json")
    assert code == 2
    code, _, _ = run(capsys, "colimit", DATA / "all_two.json", "--class", "0:[1]")
    assert code == 2


def test_out_file(tmp_path, capsys):
    p = tmp_path / "rep.json"
    code, out, _ = run(capsys, "counterexample", "scaling", "--depth", 5, "--out", p)
    assert code == 0 and out == ""
    assert json.loads(p.read_text())["command"] == "counterexample"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hilbcolim", "counterexample", "embedding", "--depth", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"
