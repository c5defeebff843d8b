import io
import shlex
import subprocess
import sys

import pytest

from gwpkit.cli import main


def run(*argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv), out=out)
    return code, out.getvalue()


def records(text):
    return [dict(tok.split("=", 1) for tok in shlex.split(line)) for line in text.splitlines() if "=" in line]


class TestQuery:
    def test_pda_member(self):
        code, out = run("query", "--fixture", "f2-a", "a", "a", "a")
        assert code == 0
        rec = records(out)[0]
        assert rec["verdict"] == "member" and rec["decider"] == "pda" and rec["pda_steps"] == "3"

    def test_eda_non_member(self):
        code, out = run("query", "--fixture", "f2-a", "--decider", "eda", "--R", "6", "b a b^-1")
        assert code == 1
        assert records(out)[0]["tape"] == "b a b^-1"

    def test_vf_fixture(self):
        assert run("query", "--fixture", "z2z2-xy", "x y y x")[0] == 0

    def test_vf_spec_file(self):
        from gwpkit.problems import fixture_dir
        spec = str(fixture_dir() / "z2z2_xy.vf")
        assert run("query", "--vf", spec, "--sub", "g", "x", "y", "x", "y")[0] == 0
        assert run("query", "--vf", spec, "--sub", "g g", "x", "y")[0] == 1

    def test_oracle_decider(self):
        code, out = run("query", "--gens", "a b", "--kind", "free-abelian", "--sub", "a", "b a b^-1")
        assert code == 0 and records(out)[0]["decider"] == "oracle"

    def test_deciders_agree(self):
        for w in ["a b a^-1", "a a b a a", "b", "a b b a^-1 a a"]:
            codes = {run("query", "--fixture", "f2-a2b", "--decider", d, "--R", "6", "--radius", "7", w)[0]
                     for d in ("pda", "eda", "oracle")}
            assert len(codes) == 1, w

    def test_errors_exit_2(self, capsys):
        assert run("query", "--fixture", "nope", "a")[0] == 2
        assert run("query", "--fixture", "f2-a", "c")[0] == 2
        assert run("query", "--gens", "a b", "--sub", "a", "--decider", "oracle", "--radius", "2", "b b b")[0] == 2
        assert "error:" in capsys.readouterr().err

    def test_pretty(self):
        _, out = run("query", "--fixture", "f2-a", "--pretty", "a")
        assert "verdict: member" in out


def test_stream(monkeypatch):
    code, out = run("stream", "--fixture", "f2-a", "--R", "6", stdin="b b^-1\na a\n", monkeypatch=monkeypatch)
    recs = records(out)
    assert [r["tape"] for r in recs[:4]] == ["b", "", "", ""]
    assert recs[-1]["verdict"] == "member" and code == 0


def test_gen_dehn():
    code, out = run("gen-dehn", "--fixture", "z2z2-xy", "--k", "2")
    assert code == 0 and out.split("\n")[:2] == ["x x ->", "y y ->"]


def test_gen_anchored_round_trip(tmp_path):
    _, out = run("gen-anchored", "--fixture", "f2-a", "--R", "1")
    assert sorted(out.splitlines()) == ["H a ->", "H a^-1 ->"]
    rules = tmp_path / "rules.txt"
    rules.write_text(out + "a a^-1 ->\na^-1 a ->\nb b^-1 ->\nb^-1 b ->\n")
    assert run("query", "--fixture", "f2-a", "--decider", "eda", "--rules", str(rules), "b a b^-1 a")[0] == 1
    assert run("query", "--fixture", "f2-a", "--decider", "eda", "--rules", str(rules), "a b b^-1 a")[0] == 0


def test_fold_and_core_file(tmp_path):
    _, out = run("fold", "--fixture", "f2-a2b")
    assert out.splitlines()[0] == "xgraph 2 0"
    core = tmp_path / "core.xg"
    core.write_text(out)
    assert run("query", "--gens", "a b", "--core", str(core), "a a b")[0] == 0


def test_run_pda_trace():
    code, out = run("run-pda", "--fixture", "f2-a", "--trace", "b", "b^-1", "a")
    lines = out.splitlines()
    assert [ln.split()[0] for ln in lines[:3]] == ["row=3", "row=4", "row=2"]
    assert records(lines[3])[0]["verdict"] == "member" and code == 0


def test_oracle_dump():
    _, out = run("oracle-dump", "--fixture", "f2-a", "--radius", "1")
    assert out.splitlines() == ["- 0", "b 1", "b^-1 1"]
    _, out = run("oracle-dump", "--fixture", "f2-a", "--radius", "1", "--all-words")
    assert out.splitlines() == ["- 0", "a 0", "a^-1 0", "b 1", "b^-1 1"]


class TestVerify:
    def test_star(self):
        code, out = run("verify", "star", "--fixture", "f2-a2b", "--maxlen", "8")
        assert code == 0 and records(out)[0]["result"] == "pass"

    def test_gib_failure_has_witness(self):
        code, out = run("verify", "gib", "--fixture", "z2-a", "--k", "1", "--K", "1", "--limit", "6")
        rec = records(out)[0]
        assert code == 1 and rec["result"] == "fail" and rec["mismatch"] == "a" and rec["failed"] == "12"

    def test_equivalence_defaults(self):
        code, out = run("verify", "equivalence", "--maxlen", "6")
        assert code == 0 and [r["fixture"] for r in records(out)] == ["f2-a", "f2-a2b", "f2-aba-b2"]

    def test_pde_planted(self, tmp_path):
        rules = tmp_path / "r.txt"
        rules.write_text("a^-1 a ->\nb b^-1 ->\nb^-1 b ->\n")
        code, out = run("verify", "pde", "--rules", str(rules))
        assert code == 1 and records(out)[0]["witness"] == "a a^-1"
        assert run("verify", "pde")[0] == 0

    def test_realtime(self):
        code, out = run("verify", "realtime", "--maxlen", "6")
        assert code == 0 and records(out)[0]["gwp_failures"] == "0"

    def test_unknown_suite(self):
        with pytest.raises(SystemExit) as e:
            main(["verify", "everything"], out=io.StringIO())
        assert e.value.code == 2

    def test_equivalence_needs_free_or_vf(self):
        assert run("verify", "equivalence", "--fixture", "z2-a")[0] == 2


def test_verify_pde_command():
    code, out = run("verify-pde", "--fixture", "z2-a", "--D", "4", "--E", "4")
    assert code == 1 and records(out)[0]["witness"] == "a b a^-1"


def test_verify_realtime_command():
    assert run("verify-realtime", "--fixture", "f2-a", "--maxlen", "6", "--R", "6")[0] == 0


def test_gib_check_command():
    code, out = run("gib-check", "--fixture", "f2-a", "--k", "2", "--K", "3", "--limit", "5")
    assert code == 0 and records(out)[-1]["failed"] == "0"
    code, out = run("gib-check", "--fixture", "f2-a", "--k", "2", "--K", "0", "--limit", "2")
    assert code == 1 and records(out)[0]["center"] == ""


class TestBench:
    def test_free_reduction(self):
        code, out = run("bench", "--fixture", "f2-a", "--decider", "free-reduction", "--random", "1",
                        "--length", "100000")
        rec = records(out)[0]
        assert code == 0 and rec["max_cascade"] == "1" and rec["letters"] == "100000"

    def test_pda_one_step_per_letter(self):
        _, out = run("bench", "--fixture", "f2-aba-b2", "--decider", "pda", "--random", "5", "--length", "200")
        rec = records(out)[0]
        assert rec["pda_steps"] == rec["letters"] == "1000"

    def test_eda_corpus(self, tmp_path):
        corpus = tmp_path / "c.txt"
        corpus.write_text("a b a^-1\n\nb b b a a a\n")
        code, out = run("bench", "--fixture", "f2-a", "--R", "6", "--corpus", str(corpus))
        rec = records(out)[0]
        assert code == 0 and int(rec["applications"]) <= int(rec["letters"]) == 9

    def test_seeded(self):
        a = run("bench", "--fixture", "f2-a", "--R", "4", "--random", "3", "--length", "50", "--seed", "7")[1]
        b = run("bench", "--fixture", "f2-a", "--R", "4", "--random", "3", "--length", "50", "--seed", "7")[1]
        strip = lambda s: {k: v for k, v in records(s)[0].items() if k != "seconds"}
        assert strip(a) == strip(b)


def test_fixture_dir_override(tmp_path, monkeypatch):
    (tmp_path / "f2.alph").write_text("generators: p q\n")
    monkeypatch.setenv("GWPKIT_FIXTURES", str(tmp_path))
    assert run("query", "--fixture", "f2-trivial", "p", "p^-1")[0] == 0


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "gwpkit.cli", "query", "--fixture", "f2-a", "b"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "verdict=non-member" in proc.stdout
