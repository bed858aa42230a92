from __future__ import annotations

import json
import subprocess
import sys

import pytest

from liaison_forge import __version__, corpus
from liaison_forge.cli import main
from liaison_forge.pmatrix import PolyMatrix
from liaison_forge.ring import PolyRing, QQ


@pytest.fixture
def vero_file(tmp_path):
    path = tmp_path / "veronese.json"
    path.write_text(json.dumps(corpus.veronese().matrix.to_json()))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


class TestClassify:
    def test_veronese(self, capsys, vero_file):
        code, rep, _ = run_json(capsys, "classify", vero_file, "--t", "2")
        assert code == 0
        assert rep["result"]["verdict"] == "SymmetricDeterminantal"
        assert rep["result"]["actual_codim"] == 3 and rep["result"]["mu"] == 6
        assert rep["version"] == __version__ and rep["seed"] == 0 and rep["exit_code"] == 0
        assert {"parse", "classify"} <= rep["timings"].keys()

    def test_veronese_full_size(self, capsys, vero_file):
        # the principal determinant has height 1 = C(2, 2), so this is positive
        code, rep, _ = run_json(capsys, "classify", vero_file, "--t", "3")
        assert code == 0 and rep["result"]["actual_codim"] == 1

    def test_negative(self, capsys, tmp_path):
        R = PolyRing(("x", "y"), QQ)
        path = tmp_path / "neither.json"
        path.write_text(json.dumps(PolyMatrix(R, [["x", "0"], ["0", "x"]], "symmetric").to_json()))
        code, out, _ = run(capsys, "classify", path, "--t", "1")
        assert code == 2 and "Neither" in out

    def test_truncated(self, capsys, tmp_path, vero_file):
        path = tmp_path / "bad.json"
        path.write_text(vero_file.read_text()[:40])
        code, _, err = run(capsys, "classify", path, "--t", "2")
        assert code == 1 and "not valid JSON" in err

    def test_missing_file_and_t(self, capsys, tmp_path, vero_file):
        assert run(capsys, "classify", tmp_path / "none.json", "--t", "2")[0] == 1
        code, _, err = run(capsys, "classify", vero_file)
        assert code == 1 and "--t" in err

    def test_corpus_input_and_field(self, capsys):
        code, rep, _ = run_json(capsys, "classify", "corpus:ht_example/O", "--field", "zp:101")
        assert code == 0 and rep["result"]["verdict"] == "AlmostSymmetricDeterminantal"
        assert run(capsys, "classify", "corpus:veronese", "--field", "zz")[0] == 1
        assert run(capsys, "classify", "corpus:nothing")[0] == 1
        assert run(capsys, "classify", "corpus:veronese/Q")[0] == 1

    def test_general_matrix_is_usage_error(self, capsys, tmp_path):
        R = PolyRing(("x", "y"), QQ)
        path = tmp_path / "general.json"
        path.write_text(json.dumps(PolyMatrix(R, [["x", "y"]]).to_json()))
        code, _, err = run(capsys, "classify", path, "--t", "1")
        assert code == 1 and "StructureError" in err


class TestChain:
    def test_veronese(self, capsys, vero_file):
        code, out, _ = run(capsys, "chain", vero_file, "--t", "2")
        assert code == 0
        assert "chain of 1 step(s)" in out and "complete intersection: True" in out

    def test_bruns_refused(self, capsys):
        code, _, err = run(capsys, "chain", "corpus:bruns_char2")
        assert code == 3 and "characteristic" in err

    def test_bruns_forced(self, capsys):
        code, rep, err = run_json(capsys, "chain", "corpus:bruns_char2", "--force-char2")
        assert code == 4 and "ChainObstruction" in err
        assert rep["result"]["error"] == "ChainObstruction"
        assert {a["ht_ItO"] for a in rep["result"]["attempts"]} == {1}

    def test_full_size_refused(self, capsys, vero_file):
        assert run(capsys, "chain", vero_file, "--t", "3")[0] == 3

    def test_seed_from_env(self, capsys, monkeypatch, vero_file):
        monkeypatch.setenv("LIAISON_FORGE_SEED", "41")
        code, rep, _ = run_json(capsys, "chain", vero_file, "--t", "2")
        assert code == 0 and rep["seed"] == 41 and rep["result"]["seed"] == 41
        code, rep, _ = run_json(capsys, "chain", vero_file, "--t", "2", "--seed", "3")
        assert rep["seed"] == 3
        monkeypatch.setenv("LIAISON_FORGE_SEED", "x")
        assert run(capsys, "chain", vero_file, "--t", "2")[0] == 1

    def test_out_and_reverify(self, capsys, tmp_path):
        out = tmp_path / "cert.json"
        assert run(capsys, "chain", "corpus:generic_sym(4,3)", "--out", out)[0] == 0
        saved = json.loads(out.read_text())
        assert len(saved["result"]["steps"]) == 2
        code, rep, _ = run_json(capsys, "verify", "cross", out)
        assert code == 0 and rep["result"]["ok"]
        assert [s["checked"] for s in rep["result"]["certificate_steps"]] == [81, 16]
        # a certificate whose basis no longer contains I_t(O) is rejected
        saved["result"]["steps"][0]["gb_Y"] = saved["result"]["steps"][0]["gb_Y"][:1]
        out.write_text(json.dumps(saved))
        assert run(capsys, "verify", "cross", out)[0] == 1


class TestVerify:
    def test_cross_veronese(self, capsys, vero_file):
        code, rep, _ = run_json(capsys, "verify", "cross", vero_file, "--t", "2")
        assert code == 0 and rep["result"]["failed"] == 0 and rep["result"]["checked"] == 16

    def test_subm(self, capsys):
        code, rep, _ = run_json(capsys, "verify", "subm", "corpus:ht_example/O")
        assert code == 0
        assert rep["result"]["condition2"] is True and rep["result"]["sufficient"] is False

    def test_subsd_and_ht1(self, capsys, vero_file):
        assert run(capsys, "verify", "subsd", vero_file, "--t", "2")[0] == 0
        code, rep, _ = run_json(capsys, "verify", "ht1", vero_file, "--t", "2")
        assert code == 0 and rep["result"]["delta"] == 1

    def test_sylvester_generic(self, capsys, tmp_path):
        R = PolyRing(tuple(f"m{i}{j}" for i in range(3) for j in range(3)), QQ)
        path = tmp_path / "g3.json"
        path.write_text(json.dumps(PolyMatrix(R, [[f"m{i}{j}" for j in range(3)] for i in range(3)]).to_json()))
        code, rep, _ = run_json(capsys, "verify", "sylvester", path, "--t", "1")
        assert code == 0
        res = rep["result"]
        assert res["exact_checked"] == 36 and res["exact_failed"] == []
        assert res["memberships_checked"] == 81 and res["memberships_failed"] == []
        assert run(capsys, "verify", "sylvester", path, "--t", "3")[0] == 1

    def test_structure_mismatch(self, capsys):
        assert run(capsys, "verify", "subm", "corpus:veronese")[0] == 1

    def test_bad_kind(self, capsys, vero_file):
        assert run(capsys, "verify", "nope", vero_file)[0] == 1


class TestCorpus:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "corpus", "list", "--only", "ci")
        assert code == 0 and out.split() == ["ci(2)", "ci(3)", "ci(4)", "ci_almost(3)", "ci_almost(4)"]

    def test_dump(self, capsys):
        code, out, _ = run(capsys, "corpus", "dump", "veronese")
        data = json.loads(out)
        assert code == 0 and data["matrix"]["entries"] == [["x0", "x1", "x2"], ["x1", "x5", "x3"], ["x2", "x3", "x4"]]
        assert run(capsys, "corpus", "dump")[0] == 1
        assert run(capsys, "corpus", "dump", "missing")[0] == 1

    def test_run_only(self, capsys):
        code, rep, _ = run_json(capsys, "corpus", "run", "--only", "generic_sym")
        assert code == 0 and len(rep["result"]["entries"]) == 10
        assert all(e["ok"] for e in rep["result"]["entries"])
        assert run(capsys, "corpus", "run", "--only", "zzz")[0] == 1

    def test_run_all(self, capsys):
        code, out, _ = run(capsys, "corpus", "run")
        assert code == 0 and out.count(" ok ") == 24

    def test_mismatch_exit(self, capsys, monkeypatch):
        real = corpus.evaluate

        def broken(entry, seed=0):
            results = real(entry, seed)
            results[0].actual = "wrong"
            return results

        monkeypatch.setattr(corpus, "evaluate", broken)
        code, out, _ = run(capsys, "corpus", "run", "--only", "veronese")
        assert code == 2 and "MISMATCH" in out and "expected" in out


def test_console_script(vero_file):
    proc = subprocess.run(
        [sys.executable, "-m", "liaison_forge.cli", "classify", str(vero_file), "--t", "2", "--json"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["verdict"] == "SymmetricDeterminantal"


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out
