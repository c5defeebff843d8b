"""Exhaustive verification suites shared by the ``verify`` command and the tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bruteforce import EnumeratedMembership
from .eda import (
    ReducerState, generate_dehn_rules, reduce_stream, rewrite_by_order, two_family_eda, verify_pde,
    verify_realtime_bound,
)
from .errors import ConfigurationError
from .graphs import core_membership, gib_check
from .pda import START, config_violations, gwp_virtually_free
from .words import make_oracle


@dataclass
class SuiteResult:
    suite: str
    fixture: str
    passed: bool
    checked: int
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - t0
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def pda_equivalence(problem, maxlen=10, max_witnesses=10):
    """pda verdict vs free reduction + core loop test on all words over Y up to maxlen."""
    core, pda = problem.core, problem.pda
    Y = core.alphabet
    inv = Y.inverse
    step = pda.step
    memo = {}
    bad = []
    checked = 0
    todo = [((), START, ())]
    while todo:
        word, config, reduced = todo.pop()
        checked += 1
        ref = memo.get(reduced)
        if ref is None:
            ref = memo[reduced] = core_membership(core, reduced)
        if (config.state == 1) != ref and len(bad) < max_witnesses:
            bad.append(word)
        if len(word) < maxlen:
            for y in Y.symbols:
                r = reduced[:-1] if reduced and reduced[-1] == inv[y] else reduced + (y,)
                todo.append((word + (y,), step(config, y), r))
    return SuiteResult("equivalence", problem.name, not bad, checked, bad, {"maxlen": maxlen})


@_timed
def vf_equivalence(problem, maxlen=12, max_witnesses=10):
    """Single-pass rewriter + pda vs enumerated subgroup elements, all words over X up to maxlen."""
    rw, pda = problem.rewriter, problem.pda
    # free normal form over a self-inverse alphabet is the free product of Z/2's,
    # so this reference never touches the coset table used by the rewriter
    member = EnumeratedMembership(problem.subgroup, make_oracle("free", problem.alphabet), maxlen, maxlen)
    bad = []
    checked = 0
    layer = [()]
    symbols = problem.alphabet.symbols
    for n in range(maxlen + 1):
        for w in layer:
            checked += 1
            if gwp_virtually_free(rw, pda, w) != member(w) and len(bad) < max_witnesses:
                bad.append(w)
        if n < maxlen:
            layer = [w + (x,) for w in layer for x in symbols]
    return SuiteResult("equivalence", problem.name, not bad, checked, bad, {"maxlen": maxlen})


def equivalence(problem, maxlen=10):
    if problem.vf is not None:
        return vf_equivalence(problem, maxlen)
    if not problem.is_free:
        raise ConfigurationError(f"equivalence suite needs a free or virtually free fixture, not {problem.name}")
    return pda_equivalence(problem, maxlen)


@_timed
def backtrack_suite(problem, maxlen=8, max_witnesses=10):
    """Reading y y^-1 after a freely reduced w y-extendable prefix restores the configuration.

    Every freely reduced w with |w| <= maxlen and every y with w y freely
    reduced is checked, and every configuration met is checked against the
    stack discipline.
    """
    core, pda = problem.core, problem.pda
    Y = core.alphabet
    inv = Y.inverse
    bad, broken = [], []
    checked = 0
    layer = [((), START)]
    for n in range(maxlen + 1):
        nxt = []
        for w, config in layer:
            problems = config_violations(pda, core, config)
            if problems and len(broken) < max_witnesses:
                broken.append((w, problems))
            for y in Y.symbols:
                if w and w[-1] == inv[y]:
                    continue
                after = pda.step(config, y)
                back = pda.step(after, inv[y])
                checked += 1
                if back != config and len(bad) < max_witnesses:
                    bad.append(w + (y,))
                if n < maxlen:
                    nxt.append((w + (y,), after))
        layer = nxt
    return SuiteResult("star", problem.name, not bad and not broken, checked, bad,
                       {"maxlen": maxlen, "invariant_failures": broken})


@_timed
def stream_batch(eda, maxlen=10, name="", max_witnesses=10):
    """Streaming reduction vs whole-word rule selection on every word up to maxlen.

    Also checks the work bounds: rule applications <= |w| and the longest
    cascade triggered by one letter <= |w|.
    """
    bad, over = [], []
    checked = 0
    worst_cascade = 0
    symbols = eda.alphabet.symbols
    todo = [((), ReducerState())]
    while todo:
        word, state = todo.pop()
        checked += 1
        tape, apps = rewrite_by_order(eda, word)
        if (tuple(state.tape) != tape or state.applications != apps) and len(bad) < max_witnesses:
            bad.append(word)
        if (state.applications > len(word) or state.max_cascade > len(word)) and len(over) < max_witnesses:
            over.append(word)
        worst_cascade = max(worst_cascade, state.max_cascade)
        if len(word) < maxlen:
            for x in symbols:
                todo.append((word + (x,), reduce_stream(eda, state.copy(), x)))
    return SuiteResult("stream", name, not bad and not over, checked, bad + over,
                       {"maxlen": maxlen, "work_bound_failures": over, "max_cascade": worst_cascade})


@_timed
def realtime(problem, k=4, R=6, maxlen=12, bound=2, eda=None):
    """Real-time ratio, GWP correctness and distance bound for the two-family eda."""
    if eda is None:
        eda = two_family_eda(problem.oracle, problem.cosets(), k, R)
    rep = verify_realtime_bound(eda, problem.cosets(), maxlen, R=R, ratio_bound=bound)
    witnesses = rep.violations + rep.coset_mismatches + rep.distance_violations
    if rep.max_ratio is not None and rep.max_ratio > bound:
        witnesses.append(rep.max_ratio_witness)
    return SuiteResult("realtime", problem.name, rep.passed, rep.pairs_checked, witnesses[:10], {
        "k": k, "R": R, "maxlen": maxlen, "rules": len(eda),
        "max_ratio": rep.max_ratio, "max_ratio_witness": rep.max_ratio_witness,
        "gwp_failures": len(rep.violations), "coset_mismatches": len(rep.coset_mismatches),
        "distance_failures": len(rep.distance_violations), "report": rep,
    })


@_timed
def gib(problem, k=2, K=3, limit=8, jobs=1):
    reports = gib_check(problem.cosets(), problem.oracle, k, K, limit, jobs=jobs)
    failed = [r for r in reports if not r.passed]
    details = {"k": k, "K": K, "limit": limit, "failed": len(failed), "reports": reports}
    if failed:
        path, symbol = failed[0].witness
        details["mismatch"] = path + (symbol,)
    return SuiteResult("gib", problem.name, not failed, len(reports), [r.center for r in failed[:10]], details)


@_timed
def pde(problem, D=3, E=3, k=2, eda=None):
    if eda is None:
        eda = generate_dehn_rules(problem.oracle, k)
    rep = verify_pde(eda, problem.oracle, D, E)
    wit = (rep.short_word_violations + rep.short_element_violations)[:10]
    return SuiteResult("pde", problem.name, rep.passed, rep.words_checked, wit,
                       {"D": D, "E": E, "rules": len(eda), "report": rep})
