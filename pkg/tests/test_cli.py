import io
import json
import subprocess
import sys

import pytest

from pdtfourier import boolfn, pdt
from pdtfourier.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "maj3.fn": boolfn.to_text(boolfn.maj3()),
        "parity5.fn": boolfn.to_text(boolfn.parity(5)),
        "parity3.fn": boolfn.to_text(boolfn.parity(3)),
        "maj3.pdt": pdt.MAJ3_TREE_TEXT,
        "corr.pdt": "n=3\n(Q 1,2 + -)\n",
        "bad.fn": "n=2\n+-+\n",
        "bad.pdt": "n=3\n(Q 1 +)\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def test_spectrum_parity5(files):
    code, out = call("spectrum", files["parity5.fn"])
    assert code == 0
    assert [ln for ln in out.splitlines() if ln.startswith("fhat")] == ["fhat({1,2,3,4,5}) = 1"]
    assert "sum_linear = 0" in out


def test_spectrum_maj3_builtin():
    code, out = call("spectrum", "builtin:maj3")
    assert code == 0
    assert "fhat({1}) = 1/2" in out and "fhat({1,2,3}) = -1/2" in out
    assert "sum_linear = 3/2" in out


def test_check_theorem1(files):
    code, out = call("check", "--which", "theorem1", files["maj3.fn"], files["maj3.pdt"])
    assert code == 0
    assert "1.5 ≤ 2.3548" in out


@pytest.mark.parametrize("which", ["theorem4", "lemma1", "lemma3", "entropy"])
def test_check_other_inequalities_hold(files, which):
    code, out = call("check", "--which", which, "builtin:maj3", files["maj3.pdt"])
    assert code == 0, out


def test_check_lemma3_equality_flag(files):
    _, out = call("check", "--which", "lemma3", "builtin:maj3", files["maj3.pdt"])
    assert "with equality" in out


def test_check_report_file(files, tmp_path):
    dest = tmp_path / "rep.json"
    code, _ = call("check", "--which", "theorem1", "builtin:maj3", files["maj3.pdt"], "--report", str(dest))
    data = json.loads(dest.read_text())
    assert code == 0 and data["lhs"] == "3/2" and data["holds"] is True


def test_check_tree_not_computing(files):
    code, out = call("check", "--which", "theorem1", files["parity3.fn"], files["maj3.pdt"])
    assert code == 1
    assert "does not compute" in out and "code" in out


def test_recmaj():
    code, out = call("recmaj", "--k", "3")
    assert code == 0
    assert "linear_sum = 27/8" in out
    assert "depth_lower_bound = 5" in out
    assert "streamed_verification = ok" in out


def test_recmaj_large_k_skips_streaming():
    code, out = call("recmaj", "--k", "4")
    assert code == 0 and "linear_sum = 81/16" in out and "skipped" in out


def test_pdt_stats(files):
    code, out = call("pdt-stats", files["maj3.pdt"])
    assert code == 0
    for line in ["depth = 2", "average_depth = 2", "second_moment = 5/2", "first_abs_moment = 3/2",
                 "correlation_free = False"]:
        assert line in out
    assert "-+\t+1\t1/4\t2\t(0,0,1)\t{1,2}" in out


def test_refine(files):
    code, out = call("refine", files["corr.pdt"])
    assert code == 0
    assert out.startswith("n=3\n(Q 1,2 (Q 1 + +) (Q 1 - -))\n")
    after = out.split("# after")[1]
    assert "correlation_free = True" in after and "second_moment = 2" in after


def test_solve():
    code, out = call("solve", "builtin:maj3")
    assert code == 0 and "min_pdt_depth = 2" in out and "min_dt_depth = 3" in out
    cert = pdt.parse(out.split("certificate:\n")[1])
    assert pdt.computes(cert, boolfn.maj3())
    assert call("solve", "builtin:parity:5")[0] == 2


@pytest.mark.parametrize("argv", [
    [],
    ["nosuch"],
    ["spectrum"],
    ["spectrum", "builtin:nope"],
    ["spectrum", "/nonexistent/file.fn"],
    ["check", "--which", "theorem9", "builtin:maj3", "x"],
    ["recmaj", "--k", "zero"],
    ["recmaj", "--k", "0"],
    ["verify", "--trials", "0"],
])
def test_usage_errors(argv, capsys):
    assert call(*argv)[0] == 2


def test_parse_errors(files):
    assert call("spectrum", files["bad.fn"])[0] == 2
    assert call("pdt-stats", files["bad.pdt"])[0] == 2
    assert call("check", "--which", "theorem1", "builtin:parity:2", files["maj3.pdt"])[0] == 2


def test_entropy_on_constant_is_usage_error(tmp_path):
    p = tmp_path / "c.pdt"
    p.write_text("n=2\n+\n")
    assert call("check", "--which", "entropy", "builtin:constant:2:1", str(p))[0] == 2
    assert call("check", "--which", "theorem1", "builtin:constant:2:1", str(p))[0] == 0


def test_byte_stable(files):
    for argv in [("pdt-stats", files["maj3.pdt"]), ("check", "--which", "entropy", "builtin:maj3",
                                                    files["maj3.pdt"])]:
        assert call(*argv) == call(*argv)


def test_verify_small():
    code, out = call("verify", "--seed", "3", "--trials", "200")
    assert code == 0
    assert out.rstrip().endswith("ALL PASS")
    assert "FAIL\t" not in out


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "pdtfourier", "spectrum", "builtin:parity:3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "fhat({1,2,3}) = 1" in proc.stdout
