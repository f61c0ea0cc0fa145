import json

import pytest

import affchar.branching as B
from affchar.cli import run
from affchar.series import QSeries


def out_of(capsys, argv):
    code = run(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


LEV = ["--p", "2", "--pp", "3"]


class TestOutput:
    @pytest.mark.parametrize("argv", [
        ["kac-table"] + LEV,
        ["char", "--kind", "kac"] + LEV + ["--r", "1", "--s", "1", "--qmax", "3"],
        ["decompose"] + LEV + ["--r", "3", "--s", "2"],
        ["loewy"] + LEV + ["--r", "1", "--s", "1"],
        ["phi", "--module", "kac"] + LEV + ["--r", "1", "--s", "1", "--qmax", "4"],
        ["staggered-beta", "--example", "I", "--json"],
    ])
    def test_byte_identical_reruns(self, capsys, argv):
        first = out_of(capsys, argv)
        assert first[0] == 0 and first[1]
        assert out_of(capsys, argv) == first

    def test_json_rationals(self, capsys):
        code, out, _ = out_of(capsys, ["char", "--kind", "kac"] + LEV + ["--r", "1", "--s", "1",
                                                                          "--qmax", "2", "--json"])
        d = json.loads(out)
        assert code == 0 and d["kind"] == "kac"
        assert d["series"]["q_shift"] == "-1/12"

    def test_decompose_text(self, capsys):
        code, out, _ = out_of(capsys, ["decompose"] + LEV + ["--r", "3", "--s", "2"])
        assert code == 0 and "A[3,2] = L[3,2] + L[5,2]" in out

    def test_negative_rational_argument(self, capsys):
        code, out, _ = out_of(capsys, ["singular"] + LEV + ["--j", "-2/3", "--charge", "1", "--grade", "1"])
        assert code == 0 and "(1/1) J+_{-1}" in out

    def test_staggered_beta_json(self, capsys):
        code, out, _ = out_of(capsys, ["staggered-beta", "--example", "I", "--json"])
        d = json.loads(out)
        assert code == 0 and d["beta"] == "-4480/19683" and d["eta"] == "0/1"

    def test_staggered_beta_from_file(self, capsys, tmp_path):
        f = tmp_path / "ex.json"
        f.write_text(json.dumps({"p": 2, "pp": 3, "j": "-2/3", "quotient": ["-5/3"],
                                 "j_S": "1/3", "j_P": "4/3"}))
        code, out, _ = out_of(capsys, ["staggered-beta", "--example", str(f), "--json"])
        assert code == 0 and json.loads(out)["beta"] == "-1/1"


class TestExitCodes:
    def test_branch_verify_pass(self, capsys):
        code, out, _ = out_of(capsys, ["branch", "verify"] + LEV + ["--n", "1", "--r", "1", "--s", "1",
                                                                       "--rho", "1", "--qmax", "6"])
        assert code == 0 and out.startswith("PASS")

    def test_branch_verify_fail(self, capsys, monkeypatch):
        real = B.branching_function

        def broken(key, q_max=None, q_top=None):
            b = real(key, q_max, q_top)
            if b.is_zero():
                return b
            e, _ = next(iter(b.terms()))
            return b + QSeries.from_terms({e + 1: 1}, b.top, shift=b.shift) if e + 1 <= b.top else b

        monkeypatch.setattr(B, "branching_function", broken)
        code, out, _ = out_of(capsys, ["branch", "verify"] + LEV + ["--n", "1", "--r", "1", "--s", "1",
                                                                       "--rho", "1", "--qmax", "6"])
        assert code == 1 and out.startswith("FAIL")

    @pytest.mark.parametrize("argv", [
        ["kac-table", "--p", "2", "--pp", "4"],
        ["char", "--kind", "kac"] + LEV + ["--r", "0", "--s", "0"],
        ["branch", "fn"] + LEV + ["--n", "1", "--r", "1", "--s", "1", "--rho", "1"],
        ["staggered-beta", "--example", "nope"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, err = out_of(capsys, argv)
        assert code == 2 and err

    def test_bad_environment_default(self, capsys, monkeypatch):
        monkeypatch.setenv("AFFCHAR_QMAX_DEFAULT", "many")
        code, _, err = out_of(capsys, ["char", "--kind", "kac"] + LEV + ["--r", "1", "--s", "1"])
        assert code == 2 and "AFFCHAR_QMAX_DEFAULT" in err


class TestEnvironment:
    def test_qmax_default(self, capsys, monkeypatch):
        argv = ["char", "--kind", "kac"] + LEV + ["--r", "1", "--s", "1", "--json"]
        monkeypatch.setenv("AFFCHAR_QMAX_DEFAULT", "2")
        short = json.loads(out_of(capsys, argv)[1])
        monkeypatch.setenv("AFFCHAR_QMAX_DEFAULT", "4")
        longer = json.loads(out_of(capsys, argv)[1])
        assert short["series"]["q_max"] == 2 and longer["series"]["q_max"] == 4


class TestVerifyAll:
    def test_subset(self, capsys):
        code, out, _ = out_of(capsys, ["verify-all", "--only", "1,2"])
        lines = out.strip().splitlines()
        assert code == 0
        assert [ln.split()[0] for ln in lines[:2]] == ["PASS", "PASS"]
        assert lines[-1] == "2/2 criteria passed"

    def test_stable_without_timings(self, capsys):
        assert out_of(capsys, ["verify-all", "--only", "2"]) == out_of(capsys, ["verify-all", "--only", "2"])
