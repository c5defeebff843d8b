import pytest
from hypothesis import given

from gwpkit.bruteforce import EnumeratedMembership, coset_bfs, element_bfs, subgroup_enumerate
from gwpkit.errors import RadiusExceededError, ResourceError
from gwpkit.graphs import CoreCosets, OracleCosets, stallings_fold
from gwpkit.words import GeneratorAlphabet, SubgroupSpec, make_oracle, words_upto
from strategies import words

F2 = GeneratorAlphabet(["a", "b"])
FREE = make_oracle("free", F2)
ZZ = make_oracle("free-abelian", F2)


def sub(text):
    return SubgroupSpec.parse(F2, text)


def test_element_bfs_free():
    table = element_bfs(FREE, 3)
    assert len(table) == 53
    assert table[()] == (0, ())
    assert table[F2.parse("a b")] == (2, F2.parse("a b"))


def test_element_bfs_shortlex_geodesic():
    table = element_bfs(ZZ, 2)
    # a b and b a are the same element; a b comes first in declaration order
    assert table[F2.parse("a b")] == (2, F2.parse("a b"))


class TestCosetBfs:
    def test_free_cyclic(self):
        snap = coset_bfs(CoreCosets(stallings_fold(sub("a"))), 3)
        assert snap.length(F2.parse("a a b")) == 1
        assert snap.length(()) == 0
        assert snap.representative(()) == ()
        assert snap.representative(F2.parse("a a b")) == ("b",)

    def test_free_abelian(self):
        member = EnumeratedMembership(sub("a"), ZZ, max_products=8, radius=8)
        snap = coset_bfs(OracleCosets(member, ZZ), 3)
        assert snap.length(F2.parse("b b a")) == 2
        assert snap.member(F2.parse("a a^-1 a"))

    def test_outside_radius(self):
        snap = coset_bfs(CoreCosets(stallings_fold(sub("a"))), 2)
        with pytest.raises(RadiusExceededError):
            snap.length(F2.parse("b b b"))
        with pytest.raises(RadiusExceededError):
            snap.representative(F2.parse("b b b"))

    def test_resource_limit(self):
        with pytest.raises(ResourceError) as e:
            coset_bfs(CoreCosets(stallings_fold(sub(""))), 10, max_cosets=100)
        assert e.value.achieved_radius == 3

    @pytest.mark.parametrize("gens", ["a", "a a, b", "a b a^-1, b b"])
    def test_lipschitz(self, gens):
        cos = CoreCosets(stallings_fold(sub(gens)))
        snap = coset_bfs(cos, 5)
        for c, L in snap.lengths.items():
            for s in F2:
                t = cos.act(c, s)
                if t in snap.lengths:
                    assert abs(snap.lengths[t] - L) <= 1

    @given(words(F2, 5))
    def test_length_at_most_word_length(self, u):
        snap = coset_bfs(CoreCosets(stallings_fold(sub("a a, b"))), 5)
        assert snap.length(u) <= len(u)


class TestEnumeration:
    def test_cyclic_three(self):
        got = subgroup_enumerate(sub("a"), FREE, 3)
        want = {(), ("a",), ("a", "a"), ("a",) * 3, ("a^-1",), ("a^-1",) * 2, ("a^-1",) * 3}
        assert got == want

    def test_membership(self):
        m = EnumeratedMembership(sub("a a, b"), FREE)
        assert m(F2.parse("a a b"))
        assert not m(F2.parse("a"))

    def test_unknown_beyond_radius(self):
        m = EnumeratedMembership(sub("a a, b"), FREE, max_products=3)
        with pytest.raises(RadiusExceededError):
            m(F2.parse("a b a b"))

    def test_agrees_with_core(self):
        spec = sub("a b a^-1, b b")
        core = CoreCosets(stallings_fold(spec))
        m = EnumeratedMembership(spec, FREE, max_products=7)
        for u in words_upto(F2, 6):
            if len(FREE(u)) <= 7:
                assert m(u) == (core.locate(u) == core.base)
