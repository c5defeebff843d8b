"""Extended Dehn algorithms: length-reducing rewriting with coset-anchored rules.

The tape holds the current coset word Hw with the H marker implicit at
position 0.  Plain rules match anywhere inside the tape; anchored rules
match only a prefix of it.  When several left hand sides occur, the one
ending closest to the start wins, then the longest; an anchored match
counts the H marker, so it beats a plain match ending at the same place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bruteforce import coset_bfs, element_bfs
from .errors import AlphabetError, ConfigurationError, ConstructionError
from .words import GeneratorAlphabet, format_word


@dataclass(frozen=True)
class Rule:
    lhs: tuple
    rhs: tuple
    anchored: bool = False

    def __post_init__(self):
        if len(self.lhs) <= len(self.rhs):
            raise ConstructionError(f"rule {self} is not length reducing")

    def __str__(self):
        s = f"{format_word(self.lhs)} -> {format_word(self.rhs)}".rstrip()
        return "H " + s if self.anchored else s


class Eda:
    """A finite length-reducing rewriting system with a fixed application order."""

    def __init__(self, alphabet: GeneratorAlphabet, rules=()):
        self.alphabet = alphabet
        self.plain = {}
        self.anchored = {}
        for r in rules:
            alphabet.check(r.lhs)
            alphabet.check(r.rhs)
            table = self.anchored if r.anchored else self.plain
            if r.lhs in table:
                kind = "anchored" if r.anchored else "plain"
                raise ConstructionError(f"two {kind} rules share the left hand side {format_word(r.lhs)!r}")
            table[r.lhs] = r
        self.rules = tuple(self.plain.values()) + tuple(self.anchored.values())
        self._plain_lengths = sorted({len(u) for u in self.plain}, reverse=True)
        self._anchored_lengths = frozenset(len(u) for u in self.anchored)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __repr__(self):
        return f"<Eda {len(self.plain)} plain + {len(self.anchored)} anchored rules>"

    def with_rules(self, extra):
        return Eda(self.alphabet, self.rules + tuple(extra))

    def without(self, *dropped):
        dropped = set(dropped)
        return Eda(self.alphabet, [r for r in self.rules if r not in dropped])

    def suffix_match(self, tape) -> Optional[Rule]:
        """Rule to apply when the only possible matches end at the tape end."""
        n = len(tape)
        if n in self._anchored_lengths:
            r = self.anchored.get(tuple(tape))
            if r is not None:
                return r
        plain = self.plain
        for L in self._plain_lengths:
            if L <= n:
                r = plain.get(tuple(tape[n - L:]))
                if r is not None:
                    return r
        return None

    def dump(self) -> str:
        return "".join(str(r) + "\n" for r in self.rules)

    @classmethod
    def load(cls, text: str, alphabet: GeneratorAlphabet):
        if "H" in alphabet:
            raise ConfigurationError("a generator named 'H' clashes with the anchored-rule prefix")
        rules = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            lhs, sep, rhs = line.partition("->")
            if not sep:
                raise ConfigurationError(f"rule line without '->': {raw!r}")
            toks = lhs.split()
            anchored = bool(toks) and toks[0] == "H"
            if anchored:
                toks = toks[1:]
            rules.append(Rule(alphabet.parse(" ".join(toks)), alphabet.parse(rhs), anchored))
        return cls(alphabet, rules)


@dataclass
class ReducerState:
    tape: list = field(default_factory=list)
    letters_consumed: int = 0
    applications: int = 0
    max_cascade: int = 0

    def copy(self):
        return ReducerState(list(self.tape), self.letters_consumed, self.applications, self.max_cascade)


def reduce_stream(eda: Eda, state: ReducerState, letter) -> ReducerState:
    """Append one letter to an already reduced tape and reduce again.

    Since the old tape was reduced, any match ends at the new tape end.
    Applying a rule pops its lhs and feeds the rhs back one letter at a
    time, so each later match found is again the one ending earliest.
    """
    if letter not in eda.alphabet:
        raise AlphabetError(f"unknown symbol {letter!r}")
    tape = state.tape
    pending = [letter]
    cascade = 0
    while pending:
        tape.append(pending.pop())
        rule = eda.suffix_match(tape)
        if rule is not None:
            del tape[len(tape) - len(rule.lhs):]
            pending.extend(reversed(rule.rhs))
            cascade += 1
    state.letters_consumed += 1
    state.applications += cascade
    if cascade > state.max_cascade:
        state.max_cascade = cascade
    return state


def reduce_batch(eda: Eda, word) -> ReducerState:
    state = ReducerState()
    for x in word:
        reduce_stream(eda, state, x)
    return state


def rewrite_by_order(eda: Eda, word):
    """Reduce Hw by repeatedly applying the globally selected rule.

    Direct rendering of the application order on the whole word, without
    the streaming argument: scan end positions left to right, and at the
    first position where some lhs ends take the anchored match if any, else
    the longest plain one.  Positions before the rewritten region are known
    to be match-free and are not rescanned.  Returns (tape, applications).
    """
    w = list(eda.alphabet.check(word))
    plain, anchored = eda.plain, eda.anchored
    plain_lengths = eda._plain_lengths
    apps = 0
    end = 1
    while end <= len(w):
        rule = anchored.get(tuple(w[:end]))
        start = 0
        if rule is None:
            for L in plain_lengths:
                if L <= end:
                    rule = plain.get(tuple(w[end - L:end]))
                    if rule is not None:
                        start = end - L
                        break
        if rule is None:
            end += 1
            continue
        w[start:end] = rule.rhs
        apps += 1
        end = start + 1
    return tuple(w), apps


# -- rule generation --------------------------------------------------------


def _shortlex_words(alphabet, maxlen, keep):
    """Grow words letter by letter, extending only those accepted by ``keep``.

    ``keep(word)`` returns True to extend the word further.
    """
    layer = [()]
    for _ in range(maxlen):
        nxt = []
        for w in layer:
            for s in alphabet.symbols:
                u = w + (s,)
                if keep(u):
                    nxt.append(u)
        layer = nxt


def generate_dehn_rules(oracle, k: int) -> Eda:
    """All minimal shortenings u -> v with |u| <= k.

    u is non-geodesic while every proper subword is geodesic; v is the
    shortlex-least word for the same element.
    """
    if k < 2:
        raise ConstructionError("Dehn rules need k >= 2")
    alphabet = oracle.alphabet
    table = element_bfs(oracle, k)
    geodesic = {()}
    rules = []

    def keep(u):
        if u[:-1] not in geodesic or u[1:] not in geodesic:
            return False
        length, best = table[oracle(u)]
        if length == len(u):
            geodesic.add(u)
            return True
        rules.append(Rule(u, best))
        return False

    _shortlex_words(alphabet, k, keep)
    return Eda(alphabet, rules)


def generate_anchored_rules(cosets, R: int):
    """Anchored rules Hv1 -> Hv2 for |v2| < |v1| <= R, v1 minimal.

    Every proper prefix of v1 is coset-geodesic; v2 is the shortlex-least
    word of the coset Hv1.
    """
    if R < 1:
        raise ConstructionError("anchored rules need R >= 1")
    snap = coset_bfs(cosets, R)
    rules = []
    act, lengths, reps = cosets.act, snap.lengths, snap.reps
    where = {(): cosets.base}

    def keep(u):
        c = act(where[u[:-1]], u[-1])
        if lengths[c] == len(u):
            where[u] = c
            return True
        rules.append(Rule(u, reps[c], anchored=True))
        return False

    _shortlex_words(cosets.alphabet, R, keep)
    return rules


def adjoin_absorption_rules(eda: Eda, symbols) -> Eda:
    """Add anchored rules Hz -> H for every symbol z of the given set."""
    extra = []
    for z in dict.fromkeys(symbols):
        if z not in eda.alphabet:
            raise AlphabetError(f"unknown symbol {z!r}")
        extra.append(Rule((z,), (), anchored=True))
    return eda.with_rules(extra)


def two_family_eda(oracle, cosets, k=4, R=6) -> Eda:
    """Plain Dehn rules up to length k plus anchored coset rules up to length R."""
    dehn = generate_dehn_rules(oracle, k)
    return dehn.with_rules(generate_anchored_rules(cosets, R))


# -- verifiers --------------------------------------------------------------


@dataclass
class PdeReport:
    D: int
    E: int
    word_limit: int
    passed: bool
    short_word_violations: list  # reduced, |w| <= E, not geodesic
    short_element_violations: list  # reduced, element length <= D, not geodesic
    words_checked: int

    @property
    def witness(self):
        v = self.short_word_violations or self.short_element_violations
        return v[0] if v else None


def _plain_reduced_words(eda, maxlen):
    """Words of length <= maxlen containing no plain lhs (subword closed)."""
    plain, lengths = eda.plain, eda._plain_lengths
    out = [()]

    def keep(u):
        n = len(u)
        for L in lengths:
            if L <= n and u[n - L:] in plain:
                return False
        out.append(u)
        return True

    _shortlex_words(eda.alphabet, maxlen, keep)
    return out


def verify_pde(eda: Eda, oracle, D: int, E: int, word_limit=None) -> PdeReport:
    """Check the geodesy conditions on the plain rules of an eda.

    Short-word condition: every reduced word of length <= E is geodesic.
    Short-element condition: every reduced word (searched up to length
    ``word_limit``, default 2D) whose element has length <= D is geodesic.
    The alphabet-decomposition conditions are vacuous with a single alphabet.
    """
    if not D >= E >= 0:
        raise ConfigurationError("need D >= E >= 0")
    word_limit = 2 * D if word_limit is None else word_limit
    table = element_bfs(oracle, max(D, E))
    words = _plain_reduced_words(eda, max(E, word_limit))
    short_word, short_elem = [], []
    for w in words:
        entry = table.get(oracle(w))
        if len(w) <= E and (entry is None or entry[0] != len(w)):
            short_word.append(w)
        if entry is not None and entry[0] <= D and entry[0] != len(w):
            short_elem.append(w)
    return PdeReport(D, E, word_limit, not short_word and not short_elem, short_word, short_elem, len(words))


def tape_census(eda: Eda, cosets, maxlen: int, visit):
    """Call ``visit(tape, coset, witness)`` once per reachable pair.

    The pair (reduced tape of w, coset Hw) of w.x is a function of the pair
    of w and the letter x, so walking the pair graph breadth-first to depth
    maxlen meets (tape(w), Hw) for every word |w| <= maxlen; ``witness`` is
    the shortlex-least such w.  Returns the number of pairs.
    """
    symbols = eda.alphabet.symbols
    act = cosets.act
    start = ((), cosets.base)
    seen = {start}
    layer = [((), cosets.base, ())]
    visit((), cosets.base, ())
    step_cache = {}
    for _ in range(maxlen):
        nxt = []
        for tape, c, w in layer:
            for s in symbols:
                t = step_cache.get((tape, s))
                if t is None:
                    st = ReducerState(list(tape))
                    reduce_stream(eda, st, s)
                    t = step_cache[(tape, s)] = tuple(st.tape)
                key = (t, act(c, s))
                if key not in seen:
                    seen.add(key)
                    u = w + (s,)
                    visit(key[0], key[1], u)
                    nxt.append((key[0], key[1], u))
        layer = nxt
        step_cache.clear()
    return len(seen)


@dataclass
class RealtimeReport:
    maxlen: int
    pairs_checked: int
    max_ratio: Optional[Fraction]
    max_ratio_witness: Optional[tuple]
    violations: list  # nonempty tape on a word of H, or empty tape off H
    coset_mismatches: list  # tape not in the coset of the input
    distance_violations: list  # |tape| > R and coset length < |tape| / 2
    ratio_bound: Optional[Fraction] = None

    @property
    def passed(self):
        ok = not self.violations and not self.coset_mismatches and not self.distance_violations
        if self.ratio_bound is not None and self.max_ratio is not None:
            ok = ok and self.max_ratio <= self.ratio_bound
        return ok


def verify_realtime_bound(eda: Eda, cosets, maxlen: int, R=None, ratio_bound=None) -> RealtimeReport:
    """Exhaustive check of |tape(w)| <= ratio * (shortest word in Hw) for |w| <= maxlen.

    Also records GWP failures (tape empty exactly when w is in H), tapes
    that left the coset of their input, and, when R is given, reduced
    tapes longer than R whose coset is closer than half their length.
    """
    snap = coset_bfs(cosets, maxlen)
    lengths = snap.lengths
    best = [None, None]
    violations, mismatches, far = [], [], []

    def visit(tape, c, w):
        L = lengths[c]
        T = len(tape)
        if cosets.locate(tape) != c:
            mismatches.append(w)
        if L == 0 or T == 0:
            if (L == 0) != (T == 0):
                violations.append(w)
        else:
            r = Fraction(T, L)
            if best[0] is None or r > best[0]:
                best[0], best[1] = r, w
        if R is not None and T > R and 2 * L < T:
            far.append(w)

    pairs = tape_census(eda, cosets, maxlen, visit)
    bound = None if ratio_bound is None else Fraction(ratio_bound)
    return RealtimeReport(maxlen, pairs, best[0], best[1], violations, mismatches, far, bound)
