"""Reference deciders by exhaustive search over normal forms.

Everything here is bounded by an explicit radius; outside it the answer is
"unknown" (RadiusExceededError), never a guess.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import RadiusExceededError, ResourceError
from .words import SubgroupSpec, invert_word


def element_bfs(oracle, radius):
    """Breadth-first search of the Cayley graph from the identity.

    Returns {canonical form: (geodesic length, shortlex-least geodesic)}
    for every element of length <= radius.  Extending words in symbol order
    from a FIFO queue reaches each element first along its shortlex-least
    geodesic.
    """
    symbols = oracle.alphabet.symbols
    start = oracle(())
    table = {start: (0, ())}
    queue = deque([(start, ())])
    while queue:
        form, word = queue.popleft()
        d = len(word)
        if d == radius:
            continue
        for s in symbols:
            w = word + (s,)
            f = oracle(form + (s,))
            if f not in table:
                table[f] = (d + 1, w)
                queue.append((f, w))
    return table


@dataclass
class CosetTableSnapshot:
    """Cosets within ``radius`` of H with exact geodesic lengths."""

    cosets: object
    radius: int
    lengths: dict
    reps: dict

    def key(self, word):
        return self.cosets.locate(word)

    def length(self, word) -> int:
        """Length of the shortest word in the coset H.word."""
        k = self.cosets.locate(word)
        try:
            return self.lengths[k]
        except KeyError:
            raise RadiusExceededError(f"coset lies beyond radius {self.radius}") from None

    def representative(self, word):
        """Shortlex-least word of the coset H.word."""
        k = self.cosets.locate(word)
        try:
            return self.reps[k]
        except KeyError:
            raise RadiusExceededError(f"coset lies beyond radius {self.radius}") from None

    def member(self, word) -> bool:
        return self.length(word) == 0

    def __len__(self):
        return len(self.lengths)


def coset_bfs(cosets, radius: int, max_cosets: int = 3_000_000) -> CosetTableSnapshot:
    """Breadth-first search over the cosets of H out to ``radius``."""
    symbols = cosets.alphabet.symbols
    act = cosets.act
    lengths = {cosets.base: 0}
    reps = {cosets.base: ()}
    layer = [cosets.base]
    for d in range(radius):
        nxt = []
        for c in layer:
            rep = reps[c]
            for s in symbols:
                t = act(c, s)
                if t not in lengths:
                    lengths[t] = d + 1
                    reps[t] = rep + (s,)
                    nxt.append(t)
        if len(lengths) > max_cosets:
            raise ResourceError(f"more than {max_cosets} cosets within radius {d + 1}", achieved_radius=d)
        layer = nxt
    return CosetTableSnapshot(cosets, radius, lengths, reps)


def subgroup_enumerate(sub: SubgroupSpec, oracle, max_products: int) -> frozenset:
    """Canonical forms of all products of at most ``max_products`` generators and inverses."""
    gens = []
    for g in sub.generators:
        gens.append(g)
        gens.append(invert_word(g, sub.alphabet))
    seen = {oracle(())}
    layer = list(seen)
    for _ in range(max_products):
        nxt = []
        for f in layer:
            for g in gens:
                h = oracle(f + g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        layer = nxt
    return frozenset(seen)


class EnumeratedMembership:
    """Membership by lookup in an enumerated set of subgroup elements.

    ``radius`` bounds the canonical-form length for which a negative answer
    is trusted.  The default (= max_products) is sound whenever every
    element of length n is a product of at most n generators, e.g. for a
    Nielsen-reduced generating set of a free group.
    """

    def __init__(self, sub: SubgroupSpec, oracle, max_products: int = 7, radius=None):
        self.sub = sub
        self.oracle = oracle
        self.max_products = max_products
        self.radius = max_products if radius is None else radius
        self.elements = subgroup_enumerate(sub, oracle, max_products)

    def __call__(self, word) -> bool:
        form = self.oracle(word)
        if form in self.elements:
            return True
        if len(form) > self.radius:
            raise RadiusExceededError(
                f"element of length {len(form)} is beyond the enumeration radius {self.radius}")
        return False
