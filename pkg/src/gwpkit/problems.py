"""A (group, subgroup) pair with every decider the package can build for it.

Named fixtures live as small text files in the package's ``fixtures``
directory; the ``GWPKIT_FIXTURES`` environment variable points to another
directory with the same file names.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

from .bruteforce import EnumeratedMembership
from .eda import ReducerState, generate_anchored_rules, generate_dehn_rules, reduce_stream
from .errors import ConfigurationError
from .graphs import CoreCosets, OracleCosets, XGraph, estimate_gib_radius, stallings_fold
from .pda import GwpPda, SchreierRewriter, VirtuallyFreeDecider, VirtuallyFreeGroup, parse_vf_spec
from .words import GeneratorAlphabet, SubgroupSpec, make_oracle, parse_alphabet


def fixture_dir() -> Path:
    env = os.environ.get("GWPKIT_FIXTURES")
    return Path(env) if env else Path(__file__).parent / "fixtures"


def read_fixture(name: str) -> str:
    path = fixture_dir() / name
    try:
        return path.read_text()
    except OSError as e:
        raise ConfigurationError(f"cannot read fixture file {path}: {e}") from None


class Problem:
    """Membership problem for a subgroup H of a group G = <X>.

    Either ``kind`` names a normal-form oracle over ``alphabet`` and
    ``subgroup`` gives H over X, or ``vf`` carries a virtually free group
    with K = F n H over Y (and optionally ``subgroup`` gives H over X for
    the brute-force decider).
    """

    def __init__(self, alphabet: GeneratorAlphabet, kind: str = "free", subgroup: Optional[SubgroupSpec] = None,
                 vf: Optional[VirtuallyFreeGroup] = None, core: Optional[XGraph] = None, name: str = ""):
        self.alphabet = alphabet
        self.kind = kind
        self.subgroup = subgroup
        self.vf = vf
        self.name = name
        self._core = core
        if vf is None and subgroup is None and core is None:
            raise ConfigurationError("no subgroup given")

    def __repr__(self):
        return f"<Problem {self.name or self.kind} H={self.subgroup}>"

    @property
    def is_free(self):
        return self.vf is None and self.kind == "free" and not self.alphabet.self_inverse

    @cached_property
    def oracle(self):
        if self.vf is not None:
            return make_oracle("coset-table-over-free", self.vf)
        return make_oracle(self.kind, self.alphabet)

    @cached_property
    def core(self) -> XGraph:
        """Stallings core of H (free G) or of K = F n H (virtually free G)."""
        if self._core is not None:
            return self._core
        if self.vf is not None:
            if self.vf.subgroup is None:
                raise ConfigurationError("virtually-free spec has no subgroup of F")
            return stallings_fold(self.vf.subgroup)
        if not self.is_free:
            raise ConfigurationError(f"no Stallings core for a {self.kind} group")
        return stallings_fold(self.subgroup)

    @cached_property
    def pda(self) -> GwpPda:
        return GwpPda.from_core(self.core)

    @cached_property
    def rewriter(self) -> SchreierRewriter:
        if self.vf is not None:
            return self.vf.rewriter
        return SchreierRewriter.passthrough(self.alphabet)

    def pda_decider(self):
        group = self.vf or VirtuallyFreeGroup(self.alphabet, self.alphabet, self.rewriter)
        return VirtuallyFreeDecider(group, self.core)

    def enumerated_membership(self, max_products=7, radius=None):
        if self.subgroup is None:
            raise ConfigurationError("brute-force membership needs the subgroup H over X")
        return EnumeratedMembership(self.subgroup, self.oracle, max_products, radius)

    def membership(self):
        """The fastest exact membership test available."""
        if self.is_free or self.vf is not None:
            return self.pda_decider()
        return self.enumerated_membership(max_products=24, radius=24)

    def cosets(self, member=None):
        if member is None and self.is_free:
            return CoreCosets(self.core)
        return OracleCosets(member or self.membership(), self.oracle)

    def default_R(self, k, limit=None):
        """R = 2 max(K, k, 2) with K the smallest empirical GIB(k) radius found."""
        limit = k + 2 if limit is None else limit
        K = estimate_gib_radius(self.cosets(), self.oracle, k, limit)
        return 2 * max(K if K is not None else limit, k, 2), K

    def eda(self, k=4, R=None, cosets=None):
        if R is None:
            R, _ = self.default_R(k)
        dehn = generate_dehn_rules(self.oracle, k)
        return dehn.with_rules(generate_anchored_rules(cosets or self.cosets(), R))


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    description: str
    file: str
    kind: str = "free"
    subgroup: str = ""
    vf: bool = False


FIXTURES = {f.name: f for f in [
    FixtureSpec("f2-a", "F(a,b), H = <a>", "f2.alph", subgroup="a"),
    FixtureSpec("f2-a2b", "F(a,b), H = <a^2, b>", "f2.alph", subgroup="a a, b"),
    FixtureSpec("f2-aba-b2", "F(a,b), H = <a b a^-1, b^2>", "f2.alph", subgroup="a b a^-1, b b"),
    FixtureSpec("f2-trivial", "F(a,b), H = 1", "f2.alph"),
    FixtureSpec("z2-a", "Z^2, H = <a>", "z2.alph", kind="free-abelian", subgroup="a"),
    FixtureSpec("z2z2-xy", "Z/2*Z/2, H = <x y>", "z2z2_xy.vf", subgroup="x y", vf=True),
    FixtureSpec("z2z2-xy2", "Z/2*Z/2, H = <(x y)^2>", "z2z2_xy2.vf", subgroup="x y x y", vf=True),
]}


def load_fixture(name: str) -> Problem:
    try:
        spec = FIXTURES[name]
    except KeyError:
        raise ConfigurationError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
    text = read_fixture(spec.file)
    if spec.vf:
        vf = parse_vf_spec(text)
        sub = SubgroupSpec.parse(vf.x_alphabet, spec.subgroup)
        return Problem(vf.x_alphabet, "coset-table-over-free", sub, vf=vf, name=name)
    alphabet = parse_alphabet(text)
    return Problem(alphabet, spec.kind, SubgroupSpec.parse(alphabet, spec.subgroup), name=name)


def free_reduction_eda(alphabet):
    """The eda whose rules are exactly the free cancellations."""
    return generate_dehn_rules(make_oracle("free", alphabet), 2)


def stream_tapes(eda, word):
    """Tape after each letter of word (helper for the stream command)."""
    state = ReducerState()
    for x in word:
        reduce_stream(eda, state, x)
        yield x, tuple(state.tape), state
