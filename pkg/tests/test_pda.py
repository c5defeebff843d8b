import pytest
from hypothesis import given, strategies as st

from gwpkit.bruteforce import EnumeratedMembership
from gwpkit.errors import AlphabetError, ConfigurationError, InvariantError
from gwpkit.graphs import XGraph, core_membership, stallings_fold
from gwpkit.pda import (
    BOTTOM, SIGMA_HAT, START, CosetFsa, GwpPda, Marker, PdaConfig, SchreierRewriter, VirtuallyFreeDecider,
    build_coset_fsa, config_violations, format_trace, gwp_virtually_free, parse_vf_spec, pda_run, pda_step,
    schreier_rewrite, z2_star_z2,
)
from gwpkit.problems import read_fixture
from gwpkit.words import GeneratorAlphabet, SubgroupSpec, free_reduce, invert_word, make_oracle, words_upto
from strategies import words

F2 = GeneratorAlphabet(["a", "b"])
Z2Z2 = GeneratorAlphabet(["x", "y"], self_inverse=["x", "y"])
FIXTURE_SUBGROUPS = ["a", "a a, b", "a b a^-1, b b"]


def P(text):
    return F2.parse(text)


def pda_for(gens):
    return GwpPda.from_subgroup(SubgroupSpec.parse(F2, gens))


class TestFsa:
    def test_cyclic(self):
        fsa = build_coset_fsa(stallings_fold(SubgroupSpec.parse(F2, "a")))
        assert fsa.n_live == 1
        assert fsa.delta[1]["a"] == 1 and fsa.delta[1]["b"] == SIGMA_HAT

    def test_a2_b(self):
        fsa = build_coset_fsa(stallings_fold(SubgroupSpec.parse(F2, "a a, b")))
        assert fsa.delta[1]["a"] == 2 and fsa.delta[2]["a"] == 1
        assert fsa.delta[1]["b"] == 1 and fsa.delta[2]["b"] == SIGMA_HAT

    def test_trivial(self):
        fsa = build_coset_fsa(stallings_fold(SubgroupSpec.parse(F2, "")))
        assert fsa.n_live == 1 and set(fsa.delta[1].values()) == {SIGMA_HAT}

    @pytest.mark.parametrize("gens", FIXTURE_SUBGROUPS)
    def test_reversible_and_absorbing(self, gens):
        fsa = build_coset_fsa(stallings_fold(SubgroupSpec.parse(F2, gens)))
        for i in range(1, fsa.n_live + 1):
            for y in F2:
                j = fsa.delta[i][y]
                if j != SIGMA_HAT:
                    assert fsa.delta[j][F2.inverse[y]] == i
            assert fsa.step(SIGMA_HAT, "a") == SIGMA_HAT

    def test_accepts_reduced(self):
        fsa = build_coset_fsa(stallings_fold(SubgroupSpec.parse(F2, "a a, b")))
        assert fsa.accepts(P("a a b a^-1 a^-1"))
        assert not fsa.accepts(P("a b"))


class TestRows:
    def test_cyclic_return(self):
        accepted, final, steps = pda_for("a").run(P("b b^-1 a"), trace=True)
        assert [s.row for s in steps] == [3, 4, 2]
        assert steps[0].pushed == Marker("b", 1)
        assert accepted and final == PdaConfig(1, (BOTTOM, "a"))

    def test_cyclic_conjugate(self):
        accepted, final, steps = pda_for("a").run(P("b a b^-1"), trace=True)
        # a is read with the marker on top (row 5), b^-1 with a on top (row 7)
        assert [s.row for s in steps] == [3, 5, 7]
        assert not accepted and final.state == SIGMA_HAT

    def test_rows_1_5_6(self):
        pda = pda_for("a")
        _, _, steps = pda.run(P("a a^-1 b a a^-1 b^-1"), trace=True)
        assert [s.row for s in steps] == [2, 1, 3, 5, 6, 4]
        _, final = pda.run(P("a a^-1 b a a^-1 b^-1"))
        assert final == START

    def test_empty_input(self):
        assert pda_run(pda_for("a"), ()) == (True, START)

    def test_a2_b(self):
        assert pda_run(pda_for("a a, b"), P("a a b a a"))[0]
        assert not pda_run(pda_for("a a, b"), P("a b"))[0]

    def test_step_wrapper(self):
        pda = pda_for("a")
        assert pda_step(pda, START, "a") == PdaConfig(1, (BOTTOM, "a"))

    def test_unknown_symbol(self):
        with pytest.raises(AlphabetError):
            pda_for("a").step(START, "c")

    def test_corrupted_fsa(self):
        # a one-way edge: a leads 1 -> 2 but a^-1 is dead at 2
        delta = {1: {"a": 2, "a^-1": SIGMA_HAT}, 2: {"a": SIGMA_HAT, "a^-1": SIGMA_HAT}}
        A = GeneratorAlphabet(["a"])
        pda = GwpPda(CosetFsa(A, delta, 2, (0, 1)))
        with pytest.raises(InvariantError):
            pda.run(("a", "a^-1"))

    def test_trace_lines(self):
        _, _, steps = pda_for("a").run(P("b b^-1"), trace=True)
        lines = format_trace(steps).splitlines()
        assert lines[0] == "row=3 state=s1 input=b popped=- pushed=(b,s1) next=^"
        assert lines[1] == "row=4 state=^ input=b^-1 popped=(b,s1) pushed=- next=s1"


class TestAgainstCore:
    @pytest.mark.parametrize("gens", FIXTURE_SUBGROUPS)
    @given(words(F2, 12))
    def test_matches_core(self, gens, w):
        core = stallings_fold(SubgroupSpec.parse(F2, gens))
        accepted, final = GwpPda.from_core(core).run(w)
        assert accepted == core_membership(core, free_reduce(w, F2))
        assert config_violations(GwpPda.from_core(core), core, final) == []

    @pytest.mark.parametrize("gens", FIXTURE_SUBGROUPS)
    def test_word_times_inverse(self, gens):
        pda = pda_for(gens)
        for w in words_upto(F2, 6):
            assert pda.run(w + invert_word(w, F2)) == (True, START)

    @pytest.mark.parametrize("gens", FIXTURE_SUBGROUPS)
    @given(st.data())
    def test_backtrack_suite(self, gens, data):
        pda = pda_for(gens)
        w = free_reduce(data.draw(words(F2, 8)), F2)
        y = data.draw(st.sampled_from([s for s in F2 if not w or F2.inverse[w[-1]] != s]))
        _, before = pda.run(w)
        _, after = pda.run(w + (y, F2.inverse[y]))
        assert after == before


class TestConfigViolations:
    core = stallings_fold(SubgroupSpec.parse(F2, "a a, b"))
    pda = GwpPda.from_core(core)

    def test_good(self):
        assert config_violations(self.pda, self.core, START) == []
        _, c = self.pda.run(P("a b b"))
        assert config_violations(self.pda, self.core, c) == []

    @pytest.mark.parametrize("config", [
        PdaConfig(1, ()),
        PdaConfig(1, (BOTTOM, "a", BOTTOM)),
        PdaConfig(1, (BOTTOM, Marker("b", 1))),
        PdaConfig(SIGMA_HAT, (BOTTOM, "a")),
        PdaConfig(1, (BOTTOM, "a")),
        PdaConfig(2, (BOTTOM, "a", "a^-1", "a")),
        PdaConfig(SIGMA_HAT, (BOTTOM, Marker("a", 1))),
        PdaConfig(SIGMA_HAT, (BOTTOM, Marker("b", 2), "b^-1")),
    ])
    def test_bad(self, config):
        assert config_violations(self.pda, self.core, config)


class TestRewriter:
    rw = z2_star_z2().rewriter

    def test_examples(self):
        assert schreier_rewrite(self.rw, ("x", "y")) == (("g",), 1)
        assert schreier_rewrite(self.rw, ("x", "x")) == ((), 1)
        assert schreier_rewrite(self.rw, ()) == ((), 1)

    def test_passthrough(self):
        rw = SchreierRewriter.passthrough(F2)
        assert rw.rewrite(P("a b^-1")) == (P("a b^-1"), 1)

    def test_unknown(self):
        with pytest.raises(AlphabetError):
            self.rw.rewrite(("z",))

    def test_validation(self):
        X, Y = Z2Z2, GeneratorAlphabet(["g"])
        good_act = {(1, "x"): 2, (1, "y"): 2, (2, "x"): 1, (2, "y"): 1}
        good_sch = {(1, "x"): (), (1, "y"): ("g^-1",), (2, "x"): (), (2, "y"): ("g",)}
        SchreierRewriter(X, Y, 2, {1}, good_act, good_sch)
        with pytest.raises(ConfigurationError):
            SchreierRewriter(X, Y, 2, {2}, good_act, good_sch)
        with pytest.raises(ConfigurationError):
            SchreierRewriter(X, Y, 2, {1}, {**good_act, (2, "x"): 2}, good_sch)
        with pytest.raises(ConfigurationError):
            SchreierRewriter(X, Y, 2, {1}, good_act, {**good_sch, (2, "y"): ("g^-1",)})
        with pytest.raises(ConfigurationError):
            SchreierRewriter(X, Y, 2, {1}, {k: v for k, v in good_act.items() if k != (2, "y")}, good_sch)

    @given(words(Z2Z2, 10))
    def test_rewrite_preserves_element(self, w):
        g = z2_star_z2()
        v, t = g.rewriter.rewrite(w)
        expanded = sum((g.y_words[s] if s == "g" else invert_word(g.y_words["g"], Z2Z2) for s in v), ())
        oracle = make_oracle("free", Z2Z2)
        assert oracle(expanded + g.t_words[t]) == oracle(w)


class TestVirtuallyFree:
    def test_examples(self):
        g = z2_star_z2("g")
        pda = GwpPda.from_subgroup(g.subgroup)
        assert gwp_virtually_free(g.rewriter, pda, ("x", "y", "x", "y"))
        assert not gwp_virtually_free(g.rewriter, pda, ("x",))
        assert gwp_virtually_free(g.rewriter, pda, ("x", "y", "y", "x"))

    def test_decider_counts_steps(self):
        d = VirtuallyFreeDecider(z2_star_z2("g g"))
        assert not d(("x", "y"))
        assert d(("x", "y", "x", "y")) and d.last_steps == 2

    def test_decider_needs_subgroup(self):
        with pytest.raises(ConfigurationError):
            VirtuallyFreeDecider(z2_star_z2(None))

    @pytest.mark.parametrize("gens,hsub", [("g", "x y"), ("g g", "x y x y")])
    def test_against_enumeration(self, gens, hsub):
        g = z2_star_z2(gens)
        d = VirtuallyFreeDecider(g)
        ref = EnumeratedMembership(SubgroupSpec.parse(Z2Z2, hsub), make_oracle("free", Z2Z2), 10, 10)
        for w in words_upto(Z2Z2, 10):
            assert d(w) == ref(w), w


class TestSpecFile:
    def test_fixture_matches_builder(self):
        parsed = parse_vf_spec(read_fixture("z2z2_xy.vf"))
        built = z2_star_z2("g")
        assert parsed.rewriter.action == built.rewriter.action
        assert parsed.rewriter.schreier_words == built.rewriter.schreier_words
        assert parsed.subgroup == built.subgroup
        assert parsed.y_words == built.y_words and parsed.t_words == built.t_words

    def test_minimal_spec(self):
        text = """generators: x y
self-inverse: x y
free-generators: g
transversal: 2
marked: 1
act 1 x 2
act 1 y 2
sch 1 x :
sch 1 y : g^-1
subgroup:
g
"""
        vf = parse_vf_spec(text)
        assert vf.rewriter.action[(2, "y")] == 1
        assert vf.rewriter.schreier_words[(2, "y")] == ("g",)
        assert vf.y_words is None

    @pytest.mark.parametrize("text", [
        "generators: x\n",
        "generators: x\nself-inverse: x\nfree-generators: g\ntransversal: 1\nmarked: 1\nbogus line\n",
        "generators: x\nself-inverse: x\nfree-generators: g\ntransversal: 1\nmarked: 1\nact 1 x\n",
    ])
    def test_bad(self, text):
        with pytest.raises(ConfigurationError):
            parse_vf_spec(text)

    def test_core_file(self):
        core = stallings_fold(SubgroupSpec.parse(GeneratorAlphabet(["g"]), "g g"))
        assert XGraph.load(core.dump(), core.alphabet).edges == core.edges
