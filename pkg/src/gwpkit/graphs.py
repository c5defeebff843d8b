"""X-graphs: Stallings cores, Cayley and Schreier balls, ball comparison.

An X-graph here is a deterministic *partial* edge-labelled graph whose edge
map respects the alphabet involution: ``p --x--> q`` iff ``q --x^-1--> p``.
Cayley and Schreier graphs are complete X-graphs; what we hold of them are
finite balls, which record the radius out to which they are complete.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .errors import (
    ConfigurationError,
    InsufficientRadiusError,
    OracleError,
    PreconditionError,
    ResourceError,
)
from .words import (
    GeneratorAlphabet,
    SubgroupSpec,
    format_word,
    free_reduce,
    invert_word,
    is_freely_reduced,
)


class XGraph:
    """Deterministic partial X-graph on vertices ``0..n-1``.

    ``radius`` is None for a graph that is exactly what it claims to be (a
    Stallings core, a loaded fixture) and an integer for a ball that is only
    complete out to that distance from ``base``.  ``keys`` optionally names
    the vertices (canonical words, coset keys).
    """

    def __init__(self, alphabet: GeneratorAlphabet, edges, base=0, radius=None, keys=None, check=True):
        self.alphabet = alphabet
        self.edges = [dict(e) for e in edges]
        self.base = base
        self.radius = radius
        self.keys = keys
        if check:
            self._check()

    def _check(self):
        n = len(self.edges)
        if not 0 <= self.base < n:
            raise ConfigurationError(f"base {self.base} is not a vertex")
        inv = self.alphabet.inverse
        for p, out in enumerate(self.edges):
            for x, q in out.items():
                if x not in inv:
                    raise ConfigurationError(f"edge label {x!r} not in alphabet")
                if not 0 <= q < n:
                    raise ConfigurationError(f"edge {p} {x} {q} leaves the vertex set")
                if self.edges[q].get(inv[x]) != p:
                    raise ConfigurationError(f"edge {p} {x} {q} has no inverse edge")

    @property
    def n_vertices(self):
        return len(self.edges)

    @property
    def n_edges(self):
        """Number of undirected edges (an x-edge and its x^-1 partner count once)."""
        count = 0
        for p, out in enumerate(self.edges):
            for x, q in out.items():
                if self._is_representative(p, x, q):
                    count += 1
        return count

    def _is_representative(self, p, x, q):
        alphabet = self.alphabet
        if x in alphabet.self_inverse:
            return p <= q
        return alphabet.is_positive(x)

    def target(self, vertex, symbol):
        return self.edges[vertex].get(symbol)

    def follow(self, word, start=None):
        """End vertex of the path labelled ``word``, or None if it falls off."""
        v = self.base if start is None else start
        edges = self.edges
        for s in word:
            v = edges[v].get(s)
            if v is None:
                return None
        return v

    def distances(self, start=None):
        start = self.base if start is None else start
        dist = {start: 0}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for s in self.alphabet.symbols:
                t = self.edges[v].get(s)
                if t is not None and t not in dist:
                    dist[t] = dist[v] + 1
                    queue.append(t)
        return dist

    def rebased(self, base, radius=None):
        g = XGraph.__new__(XGraph)
        g.alphabet, g.edges, g.keys = self.alphabet, self.edges, self.keys
        g.base, g.radius = base, radius
        return g

    def dump(self) -> str:
        lines = [f"xgraph {self.n_vertices} {self.base}"]
        for p, out in enumerate(self.edges):
            for x in self.alphabet.symbols:
                q = out.get(x)
                if q is not None and self._is_representative(p, x, q):
                    lines.append(f"{p} {x} {q}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str, alphabet: GeneratorAlphabet):
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ConfigurationError("empty graph file")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "xgraph":
            raise ConfigurationError(f"bad graph header {lines[0]!r}")
        n, base = int(head[1]), int(head[2])
        edges = [{} for _ in range(n)]
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ConfigurationError(f"bad edge line {ln!r}")
            p, label, q = int(parts[0]), parts[1], int(parts[2])
            (x,) = alphabet.parse(label)
            xi = alphabet.inverse[x]
            for a, s, b in ((p, x, q), (q, xi, p)):
                if not 0 <= a < n or not 0 <= b < n:
                    raise ConfigurationError(f"edge {ln!r} leaves the vertex set")
                if edges[a].setdefault(s, b) != b:
                    raise ConfigurationError(f"edge {ln!r} breaks determinism")
        return cls(alphabet, edges, base)

    def __repr__(self):
        return f"<XGraph {self.n_vertices} vertices, {self.n_edges} edges, base {self.base}>"


def _renumber(alphabet, edges, base):
    """Relabel vertices in BFS order from base, following symbol order."""
    order = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for s in alphabet.symbols:
            t = edges[v].get(s)
            if t is not None and t not in order:
                order[t] = len(order)
                queue.append(t)
    new = [None] * len(order)
    for old, i in order.items():
        new[i] = {s: order[t] for s, t in edges[old].items()}
    return new


def stallings_fold(sub: SubgroupSpec) -> XGraph:
    """Folded core graph of a subgroup of the free group on ``sub.alphabet``.

    Vertices are numbered breadth-first from the base (vertex 0).
    """
    alphabet = sub.alphabet
    if alphabet.self_inverse:
        raise PreconditionError("Stallings folding needs a free group (no self-inverse generators)")
    inv = alphabet.inverse
    n = 1
    queue = deque()
    for g in sub.generators:
        g = free_reduce(g, alphabet)
        p = 0
        for i, x in enumerate(g):
            if i == len(g) - 1:
                q = 0
            else:
                q = n
                n += 1
            queue.append((p, x, q))
            queue.append((q, inv[x], p))
            p = q

    parent = list(range(n))
    adj = [{} for _ in range(n)]

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    while queue:
        p, x, q = queue.popleft()
        p, q = find(p), find(q)
        t = adj[p].get(x)
        if t is None:
            adj[p][x] = q
            continue
        t = find(t)
        if t == q:
            continue
        keep, gone = min(t, q), max(t, q)
        parent[gone] = keep
        for y, r in adj[gone].items():
            queue.append((keep, y, r))
        adj[gone] = {}
        queue.append((p, x, q))

    roots = sorted({find(v) for v in range(n)})
    edges = {r: {x: find(t) for x, t in adj[r].items()} for r in roots}
    return XGraph(alphabet, _renumber(alphabet, edges, find(0)), 0)


def core_membership(core: XGraph, word) -> bool:
    """True iff the freely reduced ``word`` labels a base loop of the core."""
    word = core.alphabet.check(word)
    if not is_freely_reduced(word, core.alphabet):
        raise PreconditionError(f"word {format_word(word)!r} is not freely reduced")
    return core.follow(word) == core.base


class CoreMembership:
    """Membership test for a subgroup of a free group via its Stallings core."""

    def __init__(self, core: XGraph):
        self.core = core
        self.alphabet = core.alphabet

    def __call__(self, word) -> bool:
        return self.core.follow(free_reduce(word, self.alphabet)) == self.core.base


# -- coset spaces -----------------------------------------------------------


class CosetSpace:
    """Right cosets Hg with the right action of the generators.

    Cosets are represented by hashable keys; ``base`` is the key of H.
    """

    alphabet: GeneratorAlphabet
    base = None

    def act(self, coset, symbol):
        raise NotImplementedError

    def locate(self, word, start=None):
        c = self.base if start is None else start
        for s in word:
            c = self.act(c, s)
        return c

    def same(self, u, v) -> bool:
        return self.locate(u) == self.locate(v)


class CoreCosets(CosetSpace):
    """Exact Schreier graph of K <= F read off the Stallings core of K.

    The Schreier graph is the core with a tree hung on every missing edge,
    so a coset is a pair (core vertex, freely reduced tail leaving the core).
    """

    def __init__(self, core: XGraph):
        if core.radius is not None:
            raise ConfigurationError("CoreCosets needs a core graph, not a truncated ball")
        self.core = core
        self.alphabet = core.alphabet
        self.base = (core.base, ())
        self._inv = core.alphabet.inverse

    def act(self, coset, symbol):
        vertex, tail = coset
        if tail:
            if self._inv[tail[-1]] == symbol:
                return (vertex, tail[:-1])
            return (vertex, tail + (symbol,))
        t = self.core.edges[vertex].get(symbol)
        if t is None:
            if symbol not in self._inv:
                raise ConfigurationError(f"unknown symbol {symbol!r}")
            return (vertex, (symbol,))
        return (t, ())


class OracleCosets(CosetSpace):
    """Cosets deduplicated by a membership test: Hu = Hv iff u v^-1 in H.

    Keys are integers in discovery order.  New words are first matched by
    canonical form, then compared against every known representative.
    """

    def __init__(self, member, oracle):
        self.member = member
        self.oracle = oracle
        self.alphabet = oracle.alphabet
        self.reps = [()]
        self._inv_reps = [()]
        self._by_form = {oracle(()): 0}
        self._edges = {}
        self.base = 0

    def _find(self, word):
        form = self.oracle(word)
        hit = self._by_form.get(form)
        if hit is not None:
            return hit
        member = self.member
        for j, ir in enumerate(self._inv_reps):
            if member(form + ir):
                self._by_form[form] = j
                return j
        self.reps.append(form)
        self._inv_reps.append(invert_word(form, self.alphabet))
        self._by_form[form] = len(self.reps) - 1
        return len(self.reps) - 1

    def act(self, coset, symbol):
        key = (coset, symbol)
        hit = self._edges.get(key)
        if hit is None:
            if symbol not in self.alphabet:
                raise ConfigurationError(f"unknown symbol {symbol!r}")
            hit = self._edges[key] = self._find(self.reps[coset] + (symbol,))
        return hit


# -- balls -------------------------------------------------------------------


def bfs_graph(alphabet, start, step, radius, max_vertices=None):
    """Ball of the given radius around ``start`` in the X-graph defined by ``step``.

    Returns (graph, dist) where dist[i] is the distance of vertex i from
    the base.  Edges between vertices inside the ball are all present.
    """
    keys = [start]
    index = {start: 0}
    dist = [0]
    edges = [{}]
    layer = [0]
    symbols = alphabet.symbols
    for d in range(radius + 1):
        nxt = []
        for v in layer:
            kv = keys[v]
            out = edges[v]
            for s in symbols:
                t = step(kv, s)
                i = index.get(t)
                if i is None:
                    if d == radius:
                        continue
                    i = index[t] = len(keys)
                    keys.append(t)
                    dist.append(d + 1)
                    edges.append({})
                    nxt.append(i)
                    if max_vertices is not None and len(keys) > max_vertices:
                        raise ResourceError(f"ball exceeds {max_vertices} vertices", achieved_radius=d)
                out[s] = i
        layer = nxt
    g = XGraph(alphabet, edges, 0, radius=radius, keys=keys, check=False)
    return g, dist


def cayley_ball(oracle, k: int) -> XGraph:
    """Ball of radius k around the identity of the Cayley graph."""
    if k < 0:
        raise PreconditionError("radius must be non-negative")

    def step(form, s):
        t = oracle(form + (s,))
        if oracle(t) != t:
            raise OracleError(f"oracle is not idempotent on {format_word(form + (s,))!r}")
        return t

    start = oracle(())
    if start != ():
        raise OracleError("oracle does not map the empty word to itself")
    g, _ = bfs_graph(oracle.alphabet, start, step, k)
    try:
        g._check()
    except ConfigurationError as e:
        raise OracleError(f"oracle is inconsistent with the alphabet involution: {e}") from None
    return g


def schreier_ball(cosets: CosetSpace, center_word, k: int) -> XGraph:
    """Ball of radius k around the coset H.center_word in the Schreier graph."""
    if k < 0:
        raise PreconditionError("radius must be non-negative")
    start = cosets.locate(cosets.alphabet.check(center_word))
    g, _ = bfs_graph(cosets.alphabet, start, cosets.act, k)
    return g


@dataclass
class BallReport:
    center: tuple  # word leading from the Schreier base to the center
    radius: int
    passed: bool
    witness: Optional[tuple] = None  # (path word from the center, symbol)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing report needs a witness")

    def __str__(self):
        s = f"center={format_word(self.center) or '-'} radius={self.radius} passed={str(self.passed).lower()}"
        if self.witness is not None:
            path, sym = self.witness
            s += f" witness_path={format_word(path) or '-'} witness_symbol={sym}"
        return s


def ball_isomorphic(g1: XGraph, g2: XGraph, k: int, center=()) -> BallReport:
    """Compare the closed k-balls around the bases of two X-graphs.

    The closed k-ball holds the vertices within distance k and every edge
    leaving a vertex at distance < k.  Both balls are walked in lockstep
    along identical labels; determinism makes the base-preserving
    isomorphism unique, so a mismatch in edge definedness or in vertex
    identification is a complete obstruction.
    """
    if g1.alphabet != g2.alphabet:
        raise ConfigurationError("graphs are over different alphabets")
    for g in (g1, g2):
        if g.radius is not None and g.radius < k:
            raise InsufficientRadiusError(f"graph is complete only to radius {g.radius} < {k}")
    phi = {g1.base: g2.base}
    image = {g2.base}
    path = {g1.base: ()}
    layer = [g1.base]
    symbols = g1.alphabet.symbols
    e1, e2 = g1.edges, g2.edges
    for _ in range(k):
        nxt = []
        for v in layer:
            pv = phi[v]
            for s in symbols:
                t1 = e1[v].get(s)
                t2 = e2[pv].get(s)
                if t1 is None or t2 is None:
                    if t1 is not t2:
                        return BallReport(center, k, False, (path[v], s))
                    continue
                known = phi.get(t1)
                if known is not None:
                    if known != t2:
                        return BallReport(center, k, False, (path[v], s))
                elif t2 in image:
                    return BallReport(center, k, False, (path[v], s))
                else:
                    phi[t1] = t2
                    image.add(t2)
                    path[t1] = path[v] + (s,)
                    nxt.append(t1)
        layer = nxt
    return BallReport(center, k, True)


def gib_check(cosets: CosetSpace, oracle, k: int, K: int, radius_limit: int, jobs: int = 1):
    """Compare B_k(p) with the Cayley k-ball for every coset p with K <= d(H, p) <= radius_limit.

    Returns one report per center, in breadth-first (shortlex) order of the
    centers.  This is a bounded empirical check only.
    """
    if not 0 <= K <= radius_limit or k < 0:
        raise PreconditionError("need radius_limit >= K >= 0 and k >= 0")
    cayley = cayley_ball(oracle, k)
    big, dist = bfs_graph(cosets.alphabet, cosets.base, cosets.act, radius_limit + k)
    reps = _bfs_representatives(big)
    centers = [v for v in range(big.n_vertices) if K <= dist[v] <= radius_limit]

    def check(v):
        return ball_isomorphic(big.rebased(v, radius=k), cayley, k, center=reps[v])

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(check, centers))
    return [check(v) for v in centers]


def _bfs_representatives(g: XGraph):
    reps = {g.base: ()}
    queue = deque([g.base])
    while queue:
        v = queue.popleft()
        for s in g.alphabet.symbols:
            t = g.edges[v].get(s)
            if t is not None and t not in reps:
                reps[t] = reps[v] + (s,)
                queue.append(t)
    return reps


def estimate_gib_radius(cosets, oracle, k, radius_limit):
    """Smallest K such that every center with K <= d <= radius_limit passes, or None."""
    reports = gib_check(cosets, oracle, k, 0, radius_limit)
    failing = [len(r.center) for r in reports if not r.passed]
    if not failing:
        return 0
    K = max(failing) + 1
    return K if K <= radius_limit else None
