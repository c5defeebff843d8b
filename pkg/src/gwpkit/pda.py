"""Membership in subgroups of virtually free groups with a deterministic pda.

A Schreier rewriter turns a word w over X into v t, with v a word over the
free generators Y of a finite-index free subgroup F and t a transversal
index.  Then w is in H iff t is marked and v lies in K = F n H.  The pda
reads v, tracking the coset of K in the Stallings core of K while using
the stack for the free reduction of what it has read.

States are integers: 1..r for the live states (1 = the subgroup K itself,
start and sole accepting state) and ``SIGMA_HAT`` = 0 for the state
entered on leaving the core.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import AlphabetError, ConfigurationError, InvariantError
from .graphs import XGraph, stallings_fold
from .words import GeneratorAlphabet, SubgroupSpec, free_reduce, invert_word

SIGMA_HAT = 0


class _Bottom:
    def __repr__(self):
        return "$"

    __str__ = __repr__


BOTTOM = _Bottom()


class Marker(NamedTuple):
    """Stack symbol (y, i): y left the core from live state i."""

    symbol: str
    state: int

    def __str__(self):
        return f"({self.symbol},{state_name(self.state)})"


def state_name(state):
    return "^" if state == SIGMA_HAT else f"s{state}"


@dataclass(frozen=True)
class CosetFsa:
    """Transition table of the coset automaton; delta[i][y] is a state."""

    alphabet: GeneratorAlphabet
    delta: dict
    n_live: int
    vertices: tuple = ()  # vertices[i - 1] is the core vertex of live state i

    def step(self, state, y):
        if state == SIGMA_HAT:
            return SIGMA_HAT
        return self.delta[state][y]

    def accepts(self, word):
        s = 1
        for y in word:
            s = self.step(s, y)
        return s == 1


def build_coset_fsa(core: XGraph) -> CosetFsa:
    """Live states are the core vertices (base = state 1), in BFS order."""
    number = {v: i + 1 for i, v in enumerate(core.distances())}
    delta = {}
    for v, i in number.items():
        out = core.edges[v]
        delta[i] = {y: number[out[y]] if y in out else SIGMA_HAT for y in core.alphabet.symbols}
    return CosetFsa(core.alphabet, delta, len(number), tuple(number))


class PdaConfig(NamedTuple):
    state: int
    stack: tuple  # bottom first; stack[0] is BOTTOM

    def __str__(self):
        return f"state={state_name(self.state)} stack={' '.join(str(s) for s in self.stack[1:]) or '-'}"


START = PdaConfig(1, (BOTTOM,))


class TraceStep(NamedTuple):
    row: int
    state: int
    symbol: str
    popped: object
    pushed: object
    after: PdaConfig

    def __str__(self):
        return (f"row={self.row} state={state_name(self.state)} input={self.symbol} "
                f"popped={self.popped if self.popped is not None else '-'} "
                f"pushed={self.pushed if self.pushed is not None else '-'} "
                f"next={state_name(self.after.state)}")


class GwpPda:
    """Deterministic pda over Y recognising the words that represent elements of K."""

    def __init__(self, fsa: CosetFsa):
        self.fsa = fsa
        self.alphabet = fsa.alphabet
        self._inv = fsa.alphabet.inverse

    @classmethod
    def from_core(cls, core: XGraph):
        return cls(build_coset_fsa(core))

    @classmethod
    def from_subgroup(cls, sub: SubgroupSpec):
        return cls.from_core(stallings_fold(sub))

    def transition(self, config: PdaConfig, y):
        """Return (row, next config, popped symbol, pushed symbol)."""
        try:
            yi = self._inv[y]
        except KeyError:
            raise AlphabetError(f"unknown symbol {y!r}") from None
        state, stack = config
        top = stack[-1]
        if state != SIGMA_HAT:
            j = self.fsa.delta[state][y]
            if j != SIGMA_HAT:
                if top == yi:
                    return 1, PdaConfig(j, stack[:-1]), top, None
                return 2, PdaConfig(j, stack + (y,)), None, y
            if top == yi:
                raise InvariantError(
                    f"dead transition on {y} from {state_name(state)} with {yi} on top: "
                    "the coset automaton is not reversible")
            m = Marker(y, state)
            return 3, PdaConfig(SIGMA_HAT, stack + (m,)), None, m
        if type(top) is Marker:
            if top.symbol == yi:
                return 4, PdaConfig(top.state, stack[:-1]), top, None
            return 5, PdaConfig(SIGMA_HAT, stack + (y,)), None, y
        if top == yi:
            return 6, PdaConfig(SIGMA_HAT, stack[:-1]), top, None
        return 7, PdaConfig(SIGMA_HAT, stack + (y,)), None, y

    def step(self, config: PdaConfig, y) -> PdaConfig:
        return self.transition(config, y)[1]

    def run(self, word, trace=False):
        """Return (accepted, final config) or, with trace, (accepted, final, steps)."""
        config = START
        steps = []
        for y in word:
            row, nxt, popped, pushed = self.transition(config, y)
            if trace:
                steps.append(TraceStep(row, config.state, y, popped, pushed, nxt))
            config = nxt
        accepted = config.state == 1
        return (accepted, config, steps) if trace else (accepted, config)


def config_violations(pda: GwpPda, core: XGraph, config: PdaConfig):
    """Describe every way ``config`` breaks the stack discipline (empty if none).

    In a live state the stack holds a freely reduced word tracing the core
    from the base to that state.  In the failure state exactly one marker
    sits on the stack; below it is such a word for the state the marker
    records, whose edge on the marker symbol is missing; above it is a
    freely reduced word.
    """
    out = []
    state, stack = config
    inv = pda.alphabet.inverse
    if not stack or stack[0] is not BOTTOM or any(s is BOTTOM for s in stack[1:]):
        out.append("bottom marker misplaced")
        return out
    body = stack[1:]
    marks = [i for i, s in enumerate(body) if type(s) is Marker]
    if len(marks) != (1 if state == SIGMA_HAT else 0):
        out.append(f"{len(marks)} markers in state {state_name(state)}")
        return out

    def reduced(word):
        return all(inv[a] != b for a, b in zip(word, word[1:]))

    vertex = pda.fsa.vertices
    if state != SIGMA_HAT:
        if not reduced(body):
            out.append("stack word not freely reduced")
        if core.follow(body) != vertex[state - 1]:
            out.append("stack word does not reach the current state")
        return out
    m = marks[0]
    below, mark, above = body[:m], body[m], body[m + 1:]
    if not reduced(below) or not reduced(above) or (above and above[0] == inv[mark.symbol]):
        out.append("stack word not freely reduced")
    if core.follow(below) != vertex[mark.state - 1]:
        out.append("word below the marker does not reach its recorded state")
    elif core.target(vertex[mark.state - 1], mark.symbol) is not None:
        out.append("marker records a live transition")
    return out


def pda_step(pda: GwpPda, config: PdaConfig, y) -> PdaConfig:
    return pda.step(config, y)


def pda_run(pda: GwpPda, word):
    return pda.run(word)


# -- Schreier rewriting -----------------------------------------------------


class SchreierRewriter:
    """Coset action of X on a transversal of F and the Schreier words u(i, x).

    Indices run 1..n with 1 the identity coset F; ``marked`` is the subset
    of indices whose transversal elements lie in H.
    """

    def __init__(self, x_alphabet, y_alphabet, n, marked, action, schreier_words):
        self.x_alphabet = x_alphabet
        self.y_alphabet = y_alphabet
        self.n = n
        self.marked = frozenset(marked)
        self.action = dict(action)
        self.schreier_words = {k: tuple(v) for k, v in schreier_words.items()}
        self._validate()

    def _validate(self):
        X, Y = self.x_alphabet, self.y_alphabet
        if self.n < 1:
            raise ConfigurationError("transversal must have at least one element")
        if 1 not in self.marked:
            raise ConfigurationError("index 1 (the identity coset) must be marked")
        if not self.marked <= set(range(1, self.n + 1)):
            raise ConfigurationError("marked indices out of range")
        for i in range(1, self.n + 1):
            for x in X.symbols:
                if (i, x) not in self.action or (i, x) not in self.schreier_words:
                    raise ConfigurationError(f"coset table has no entry for ({i}, {x})")
                j = self.action[(i, x)]
                if not 1 <= j <= self.n:
                    raise ConfigurationError(f"act {i} {x} {j}: index out of range")
                if self.action.get((j, X.inverse[x])) != i:
                    raise ConfigurationError(f"act {i} {x} {j} has no inverse entry")
                u = Y.check(self.schreier_words[(i, x)])
                back = self.schreier_words.get((j, X.inverse[x]), ())
                if free_reduce(u + back, Y):
                    raise ConfigurationError(f"Schreier words for ({i}, {x}) and ({j}, {X.inverse[x]}) are not inverse")

    @classmethod
    def passthrough(cls, alphabet: GeneratorAlphabet):
        """The free group itself: one coset, u(1, x) = x."""
        return cls(alphabet, alphabet, 1, {1},
                   {(1, x): 1 for x in alphabet.symbols},
                   {(1, x): (x,) for x in alphabet.symbols})

    def emissions(self, word):
        """Yield (emitted Y-word, index after the letter) for each letter of word."""
        i = 1
        action, sw = self.action, self.schreier_words
        for x in word:
            try:
                u = sw[(i, x)]
            except KeyError:
                raise AlphabetError(f"unknown symbol {x!r}") from None
            i = action[(i, x)]
            yield u, i

    def rewrite(self, word):
        v = []
        i = 1
        for u, i in self.emissions(word):
            v.extend(u)
        return tuple(v), i


def schreier_rewrite(rw: SchreierRewriter, word):
    return rw.rewrite(word)


@dataclass
class VirtuallyFreeGroup:
    """Virtually free group data: rewriter, K = F n H over Y, optional expansions.

    ``y_words`` maps each free generator to a word over X and ``t_words``
    maps each transversal index to a word over X; both are only needed by
    the normal-form oracle.
    """

    x_alphabet: GeneratorAlphabet
    y_alphabet: GeneratorAlphabet
    rewriter: SchreierRewriter
    subgroup: Optional[SubgroupSpec] = None
    y_words: Optional[dict] = None
    t_words: Optional[dict] = None

    def with_subgroup(self, sub):
        return VirtuallyFreeGroup(self.x_alphabet, self.y_alphabet, self.rewriter, sub, self.y_words, self.t_words)


def gwp_virtually_free(rw: SchreierRewriter, pda: GwpPda, word) -> bool:
    """Single pass: each Schreier emission is fed straight into the pda."""
    config = START
    step = pda.step
    i = 1
    for u, i in rw.emissions(word):
        for y in u:
            config = step(config, y)
    return i in rw.marked and config.state == 1


class VirtuallyFreeDecider:
    """Convenience bundle: rewriter + pda for K, with step counters."""

    def __init__(self, group: VirtuallyFreeGroup, core: Optional[XGraph] = None):
        if core is None:
            if group.subgroup is None:
                raise ConfigurationError("no subgroup K given")
            core = stallings_fold(group.subgroup)
        self.group = group
        self.core = core
        self.pda = GwpPda.from_core(core)
        self.last_steps = 0

    def __call__(self, word) -> bool:
        config = START
        steps = 0
        step = self.pda.step
        i = 1
        for u, i in self.group.rewriter.emissions(word):
            for y in u:
                config = step(config, y)
                steps += 1
        self.last_steps = steps
        return i in self.group.rewriter.marked and config.state == 1


def z2_star_z2(subgroup_text="g") -> VirtuallyFreeGroup:
    """Z/2 * Z/2 = <x, y> with F = <g>, g = xy, transversal {1, x}."""
    X = GeneratorAlphabet(["x", "y"], self_inverse=["x", "y"])
    Y = GeneratorAlphabet(["g"])
    g, G = "g", Y.inverse["g"]
    rw = SchreierRewriter(
        X, Y, 2, {1},
        {(1, "x"): 2, (1, "y"): 2, (2, "x"): 1, (2, "y"): 1},
        {(1, "x"): (), (1, "y"): (G,), (2, "x"): (), (2, "y"): (g,)},
    )
    sub = SubgroupSpec.parse(Y, subgroup_text) if subgroup_text is not None else None
    return VirtuallyFreeGroup(X, Y, rw, sub, {g: ("x", "y")}, {1: (), 2: ("x",)})


# -- virtually-free spec files ---------------------------------------------


def parse_vf_spec(text: str) -> VirtuallyFreeGroup:
    """Parse a virtually-free group spec file.

    Lines::

        generators: x y            # the group alphabet X
        self-inverse: x y
        free-generators: g         # free basis of F (Y = basis and inverses)
        transversal: 2
        marked: 1
        act 1 x 2                  # t_1 x = u(1,x) t_2
        sch 1 y : g^-1             # u(1,y) as a word over Y
        expand g : x y             # optional, for the normal-form oracle
        rep 2 : x                  # optional, word for t_2
        subgroup:                  # generators of K over Y, one per line
        g
    """
    from .words import parse_alphabet

    header, acts, schs, expands, reps, sub_lines = [], [], [], [], [], []
    n = None
    marked = None
    free_gens = None
    in_sub = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_sub:
            sub_lines.append(line)
            continue
        key = line.split()[0]
        if line.startswith("subgroup:"):
            in_sub = True
            rest = line[len("subgroup:"):].strip()
            if rest:
                sub_lines.append(rest)
        elif line.startswith(("generators:", "self-inverse:")):
            header.append(line)
        elif line.startswith("free-generators:"):
            free_gens = line.split(":", 1)[1].split()
        elif line.startswith("transversal:"):
            n = int(line.split(":", 1)[1])
        elif line.startswith("marked:"):
            marked = [int(t) for t in line.split(":", 1)[1].split()]
        elif key == "act":
            acts.append(line.split()[1:])
        elif key == "sch":
            schs.append(line[3:])
        elif key == "expand":
            expands.append(line[6:])
        elif key == "rep":
            reps.append(line[3:])
        else:
            raise ConfigurationError(f"unrecognised line in vf spec: {raw!r}")
    if not header or free_gens is None or n is None or marked is None:
        raise ConfigurationError("vf spec needs generators, free-generators, transversal and marked")
    X = parse_alphabet("\n".join(header))
    Y = GeneratorAlphabet(free_gens)
    action = {}
    for parts in acts:
        if len(parts) != 3:
            raise ConfigurationError(f"bad act line: act {' '.join(parts)}")
        i, x, j = int(parts[0]), parts[1], int(parts[2])
        (x,) = X.parse(x)
        action[(i, x)] = j
    words = {}
    for rest in schs:
        lhs, sep, rhs = rest.partition(":")
        parts = lhs.split()
        if not sep or len(parts) != 2:
            raise ConfigurationError(f"bad sch line: sch {rest}")
        (x,) = X.parse(parts[1])
        words[(int(parts[0]), x)] = Y.parse(rhs)
    # entries for x^-1 follow from those for x when the spec gives only generators
    for (i, x), j in list(action.items()):
        xi = X.inverse[x]
        if (j, xi) not in action:
            action[(j, xi)] = i
            if (i, x) in words:
                words[(j, xi)] = invert_word(words[(i, x)], Y)
    rw = SchreierRewriter(X, Y, n, marked, action, words)
    y_words = t_words = None
    if expands:
        y_words = {}
        for rest in expands:
            lhs, _, rhs = rest.partition(":")
            y_words[lhs.strip()] = X.parse(rhs)
        if set(y_words) != set(Y.generators):
            raise ConfigurationError("expand lines must cover every free generator")
    if reps:
        t_words = {}
        for rest in reps:
            lhs, _, rhs = rest.partition(":")
            t_words[int(lhs)] = X.parse(rhs)
        if set(t_words) != set(range(1, n + 1)):
            raise ConfigurationError("rep lines must cover every transversal index")
    sub = SubgroupSpec.parse(Y, "\n".join(sub_lines)) if sub_lines else None
    return VirtuallyFreeGroup(X, Y, rw, sub, y_words, t_words)


def format_trace(steps):
    return "\n".join(str(s) for s in steps)
