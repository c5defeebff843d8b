"""Alphabets, words, free reduction and normal-form oracles.

A word is a plain tuple of symbol names.  Inverse symbols are named by
suffixing ``^-1`` to the generator name unless the generator is declared
self-inverse, in which case it is its own inverse.  Declaration order of the
symbols (each generator followed by its inverse) is the total order used for
every shortlex choice in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from string import ascii_lowercase
from typing import Callable, Iterable, Sequence

from .errors import AlphabetError, ConfigurationError

Word = tuple

INVERSE_SUFFIX = "^-1"


class GeneratorAlphabet:
    """Inverse-closed, totally ordered set of generator symbols."""

    def __init__(self, generators: Sequence[str], self_inverse: Iterable[str] = ()):
        self_inverse = set(self_inverse)
        unknown = self_inverse - set(generators)
        if unknown:
            raise AlphabetError(f"self-inverse symbols not declared as generators: {sorted(unknown)}")
        if len(set(generators)) != len(generators):
            raise AlphabetError("generator names must be unique")
        symbols = []
        inverse = {}
        for g in generators:
            if not g or any(c.isspace() for c in g) or g.endswith(INVERSE_SUFFIX):
                raise AlphabetError(f"bad generator name {g!r}")
            symbols.append(g)
            if g in self_inverse:
                inverse[g] = g
            else:
                gi = g + INVERSE_SUFFIX
                symbols.append(gi)
                inverse[g] = gi
                inverse[gi] = g
        self.generators = tuple(generators)
        self.self_inverse = frozenset(self_inverse)
        self.symbols = tuple(symbols)
        self.inverse = inverse
        self.order = {s: i for i, s in enumerate(symbols)}

    @classmethod
    def free(cls, rank: int, self_inverse=()):
        if not 0 <= rank <= len(ascii_lowercase):
            raise ConfigurationError(f"rank must be between 0 and 26, got {rank}")
        return cls(list(ascii_lowercase[:rank]), self_inverse)

    def __repr__(self):
        extra = f", self_inverse={sorted(self.self_inverse)}" if self.self_inverse else ""
        return f"GeneratorAlphabet({list(self.generators)}{extra})"

    def __eq__(self, other):
        return (isinstance(other, GeneratorAlphabet) and self.generators == other.generators
                and self.self_inverse == other.self_inverse)

    def __hash__(self):
        return hash((self.generators, self.self_inverse))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol):
        return symbol in self.order

    def inv(self, symbol: str) -> str:
        try:
            return self.inverse[symbol]
        except KeyError:
            raise AlphabetError(f"unknown symbol {symbol!r}") from None

    def is_positive(self, symbol: str) -> bool:
        """True for generators (the first member of each inverse pair)."""
        return symbol in self.generators

    def check(self, word) -> Word:
        word = tuple(word)
        for s in word:
            if s not in self.order:
                raise AlphabetError(f"unknown symbol {s!r} (alphabet {list(self.symbols)})")
        return word

    def parse(self, text: str) -> Word:
        """Parse whitespace-separated tokens; ``x^-1`` names the inverse of x."""
        out = []
        for tok in text.split():
            if tok in self.order:
                out.append(tok)
            elif tok.endswith(INVERSE_SUFFIX) and tok[: -len(INVERSE_SUFFIX)] in self.order:
                out.append(self.inverse[tok[: -len(INVERSE_SUFFIX)]])
            else:
                raise AlphabetError(f"unknown token {tok!r} (alphabet {list(self.symbols)})")
        return tuple(out)

    def sort_key(self, word):
        """Shortlex key: length first, then declaration order."""
        order = self.order
        return (len(word), tuple(order[s] for s in word))


def format_word(word) -> str:
    return " ".join(word)


def parse_alphabet(text: str) -> GeneratorAlphabet:
    """Parse the alphabet file format.

    ``generators: a b`` declares the generators (names may continue on
    following lines); an optional ``self-inverse: x`` line marks order-2
    generators.  ``#`` starts a comment.
    """
    sections = {"generators": [], "self-inverse": []}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if sep and head.strip() in sections:
            current = head.strip()
            sections[current].extend(rest.split())
        elif current is not None:
            sections[current].extend(line.split())
        else:
            raise ConfigurationError(f"unexpected line in alphabet file: {raw!r}")
    if not sections["generators"]:
        raise ConfigurationError("alphabet file declares no generators")
    return GeneratorAlphabet(sections["generators"], sections["self-inverse"])


def free_reduce(word, alphabet: GeneratorAlphabet) -> Word:
    """Cancel adjacent inverse pairs until none remain.

    With self-inverse symbols this is the normal form of the free product of
    the corresponding order-2 and infinite cyclic groups.
    """
    inverse = alphabet.inverse
    out = []
    for s in word:
        try:
            si = inverse[s]
        except KeyError:
            raise AlphabetError(f"unknown symbol {s!r}") from None
        if out and out[-1] == si:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def is_freely_reduced(word, alphabet: GeneratorAlphabet) -> bool:
    inverse = alphabet.inverse
    return all(inverse[a] != b for a, b in zip(word, word[1:]))


def invert_word(word, alphabet: GeneratorAlphabet) -> Word:
    inverse = alphabet.inverse
    try:
        return tuple(inverse[s] for s in reversed(word))
    except KeyError as e:
        raise AlphabetError(f"unknown symbol {e.args[0]!r}") from None


@dataclass(frozen=True)
class SubgroupSpec:
    """Finitely generated subgroup given by generator words.

    An empty generator list is the trivial subgroup.  Generators that are
    empty after free reduction are rejected, since they usually indicate a
    typo rather than an intended trivial generator.
    """

    alphabet: GeneratorAlphabet
    generators: tuple = field(default=())

    def __post_init__(self):
        gens = tuple(self.alphabet.check(g) for g in self.generators)
        for g in gens:
            if not free_reduce(g, self.alphabet):
                raise ConfigurationError(f"subgroup generator {format_word(g)!r} is trivial after free reduction")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def parse(cls, alphabet, text: str):
        """Generators separated by commas or newlines."""
        parts = [p for chunk in text.split("\n") for p in chunk.split(",")]
        return cls(alphabet, tuple(alphabet.parse(p) for p in parts if p.strip()))

    @property
    def is_trivial(self):
        return not self.generators

    def __str__(self):
        return "<" + ", ".join(format_word(g) for g in self.generators) + ">"


class NormalFormOracle:
    """Maps each word to a canonical word for its group element.

    The empty word is the canonical form of the identity.  Subclasses
    implement ``normal_form``.
    """

    kind = "abstract"

    def __init__(self, alphabet: GeneratorAlphabet):
        self.alphabet = alphabet

    def __call__(self, word) -> Word:
        return self.normal_form(tuple(word))

    def normal_form(self, word: Word) -> Word:
        raise NotImplementedError

    def equal(self, u, v) -> bool:
        return self(u) == self(v)

    def __repr__(self):
        return f"<{type(self).__name__} {self.kind} over {self.alphabet!r}>"


class FreeOracle(NormalFormOracle):
    kind = "free"

    def normal_form(self, word):
        return free_reduce(word, self.alphabet)


class FreeAbelianOracle(NormalFormOracle):
    """Sorted exponent normal form, generators in declaration order."""

    kind = "free-abelian"

    def __init__(self, alphabet):
        if alphabet.self_inverse:
            raise ConfigurationError("free-abelian oracle needs an alphabet without self-inverse generators")
        super().__init__(alphabet)
        self._exp = {}
        for i, g in enumerate(alphabet.generators):
            self._exp[g] = (i, 1)
            self._exp[alphabet.inverse[g]] = (i, -1)

    def exponents(self, word) -> list:
        vec = [0] * len(self.alphabet.generators)
        try:
            for s in word:
                i, e = self._exp[s]
                vec[i] += e
        except KeyError as e:
            raise AlphabetError(f"unknown symbol {e.args[0]!r}") from None
        return vec

    def normal_form(self, word):
        out = []
        for g, e in zip(self.alphabet.generators, self.exponents(word)):
            out.extend([g] * e if e > 0 else [self.alphabet.inverse[g]] * -e)
        return tuple(out)


class CosetTableOracle(NormalFormOracle):
    """Normal form for a virtually free group presented by a Schreier rewriter.

    A word w is rewritten to v t with v over the free generators Y of a
    finite-index free subgroup and t a transversal element; the pair
    (free_reduce(v), t) identifies the element.  The canonical word is the
    expansion of that pair over X, freely reduced.
    """

    kind = "coset-table-over-free"

    def __init__(self, group):
        if group.y_words is None or group.t_words is None:
            raise ConfigurationError("coset-table oracle needs 'expand' and 'rep' words for Y and T")
        super().__init__(group.x_alphabet)
        self.group = group
        y = group.y_alphabet
        self._expand = {}
        for g in y.generators:
            xw = group.y_words[g]
            self._expand[g] = xw
            self._expand[y.inverse[g]] = invert_word(xw, group.x_alphabet)

    def key(self, word):
        v, t = self.group.rewriter.rewrite(word)
        return free_reduce(v, self.group.y_alphabet), t

    def normal_form(self, word):
        v, t = self.key(word)
        out = []
        for s in v:
            out.extend(self._expand[s])
        out.extend(self.group.t_words[t])
        return free_reduce(out, self.alphabet)


def make_oracle(kind: str, data) -> NormalFormOracle:
    """Build a normal-form oracle.

    ``free`` and ``free-abelian`` take a GeneratorAlphabet or a rank;
    ``coset-table-over-free`` takes a VirtuallyFreeGroup.  With an alphabet
    carrying self-inverse generators, ``free`` is the free product of the
    corresponding cyclic groups (e.g. Z/2 * Z/2).
    """
    if kind in ("free", "free-abelian"):
        if isinstance(data, int) and not isinstance(data, bool):
            data = GeneratorAlphabet.free(data)
        if not isinstance(data, GeneratorAlphabet):
            raise ConfigurationError(f"{kind} oracle needs an alphabet or a rank, got {data!r}")
        return FreeOracle(data) if kind == "free" else FreeAbelianOracle(data)
    if kind == "coset-table-over-free":
        if not all(hasattr(data, a) for a in ("x_alphabet", "y_alphabet", "rewriter", "y_words", "t_words")):
            raise ConfigurationError("coset-table-over-free oracle needs virtually-free group data")
        return CosetTableOracle(data)
    raise ConfigurationError(f"unknown oracle kind {kind!r}")


def words_upto(alphabet: GeneratorAlphabet, maxlen: int, symbols=None):
    """All words of length <= maxlen in shortlex order."""
    symbols = tuple(alphabet.symbols if symbols is None else symbols)
    layer = [()]
    yield ()
    for _ in range(maxlen):
        layer = [w + (s,) for w in layer for s in symbols]
        yield from layer


def reduced_words_upto(alphabet: GeneratorAlphabet, maxlen: int):
    """Freely reduced words of length <= maxlen in shortlex order."""
    inverse = alphabet.inverse
    layer = [()]
    yield ()
    for _ in range(maxlen):
        layer = [w + (s,) for w in layer for s in alphabet.symbols if not w or inverse[w[-1]] != s]
        yield from layer


MembershipTest = Callable[[Word], bool]
