"""Command line interface.

Output is one ``key=value`` record per line (values shell-quoted) so that
test harnesses can diff it; ``--pretty`` switches to a human layout.
Exit codes: 0 member / pass, 1 non-member / fail, 2 error.
"""

from __future__ import annotations

import argparse
import random
import shlex
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import suites
from .bruteforce import coset_bfs
from .eda import Eda, ReducerState, generate_anchored_rules, generate_dehn_rules, reduce_stream, verify_pde
from .errors import GwpError
from .graphs import XGraph, gib_check
from .pda import parse_vf_spec
from .problems import FIXTURES, Problem, free_reduction_eda, load_fixture
from .words import GeneratorAlphabet, SubgroupSpec, format_word, parse_alphabet, words_upto

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


@dataclass
class RunReport:
    command: str
    verdicts: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    seconds: float = 0.0
    witnesses: list = field(default_factory=list)

    @property
    def ok(self):
        return all(v in ("member", "pass") for v in self.verdicts)


def _value(v):
    if isinstance(v, tuple):
        return format_word(v)
    return str(v)


def emit(out, record: dict, pretty=False):
    if pretty:
        out.write("  ".join(f"{k}: {_value(v)}" for k, v in record.items()) + "\n")
    else:
        out.write(" ".join(f"{k}={shlex.quote(_value(v))}" for k, v in record.items()) + "\n")


# -- building the problem from options --------------------------------------


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as e:
        raise GwpError(f"cannot read {path}: {e}") from None


def _alphabet_from_args(args):
    if args.alphabet:
        return parse_alphabet(_read(args.alphabet))
    if args.gens:
        return GeneratorAlphabet(args.gens.split(), (args.self_inverse or "").split())
    return None


def _subgroup_text(args):
    if args.sub_file:
        return _read(args.sub_file)
    return args.sub


def build_problem(args) -> Problem:
    sub_text = _subgroup_text(args)
    if args.vf:
        vf = parse_vf_spec(_read(args.vf))
        if sub_text is not None:
            vf = vf.with_subgroup(SubgroupSpec.parse(vf.y_alphabet, sub_text))
        hsub = SubgroupSpec.parse(vf.x_alphabet, args.hsub) if args.hsub else None
        core = XGraph.load(_read(args.core), vf.y_alphabet) if args.core else None
        return Problem(vf.x_alphabet, "coset-table-over-free", hsub, vf=vf, core=core, name=Path(args.vf).stem)
    if args.fixture and sub_text is None and not args.core:
        return load_fixture(args.fixture)
    alphabet = _alphabet_from_args(args)
    if alphabet is None and args.fixture:
        alphabet = load_fixture(args.fixture).alphabet
    if alphabet is None:
        raise GwpError("give --fixture, --vf, --alphabet or --gens")
    kind = args.kind or (FIXTURES[args.fixture].kind if args.fixture in FIXTURES else "free")
    sub = SubgroupSpec.parse(alphabet, sub_text or "")
    core = XGraph.load(_read(args.core), alphabet) if args.core else None
    return Problem(alphabet, kind, sub, core=core, name=args.fixture or "")


def build_eda(args, problem) -> Eda:
    if getattr(args, "rules", None):
        return Eda.load(_read(args.rules), problem.alphabet)
    return problem.eda(args.k, args.R)


def _word(problem, tokens):
    return problem.alphabet.parse(" ".join(tokens))


# -- commands ----------------------------------------------------------------


def cmd_query(args, out):
    problem = build_problem(args)
    word = _word(problem, args.word)
    decider = args.decider or ("pda" if problem.is_free or problem.vf is not None else "oracle")
    counters = {"letters": len(word)}
    if decider == "pda":
        d = problem.pda_decider()
        verdict = d(word)
        counters["pda_steps"] = d.last_steps
    elif decider == "eda":
        state = ReducerState()
        eda = build_eda(args, problem)
        for x in word:
            reduce_stream(eda, state, x)
        verdict = not state.tape
        counters["applications"] = state.applications
        counters["tape"] = tuple(state.tape)
    else:
        verdict = problem.enumerated_membership(args.radius, args.radius)(word)
    emit(out, {"command": "query", "decider": decider, "word": word,
               "verdict": "member" if verdict else "non-member", **counters}, args.pretty)
    return EXIT_OK if verdict else EXIT_NO


def cmd_stream(args, out):
    problem = build_problem(args)
    eda = free_reduction_eda(problem.alphabet) if args.free_reduction else build_eda(args, problem)
    state = ReducerState()
    source = args.input if args.input is not None else sys.stdin
    for line in source:
        for x in problem.alphabet.parse(line):
            reduce_stream(eda, state, x)
            emit(out, {"letter": x, "tape": tuple(state.tape), "applications": state.applications}, args.pretty)
    verdict = not state.tape
    emit(out, {"letters": state.letters_consumed, "applications": state.applications,
               "max_cascade": state.max_cascade, "verdict": "member" if verdict else "non-member"}, args.pretty)
    return EXIT_OK if verdict else EXIT_NO


def cmd_gen_dehn(args, out):
    problem = build_problem(args)
    out.write(generate_dehn_rules(problem.oracle, args.k).dump())
    return EXIT_OK


def cmd_gen_anchored(args, out):
    problem = build_problem(args)
    eda = Eda(problem.alphabet, generate_anchored_rules(problem.cosets(), args.R))
    out.write(eda.dump())
    return EXIT_OK


def cmd_fold(args, out):
    problem = build_problem(args)
    out.write(problem.core.dump())
    return EXIT_OK


def cmd_run_pda(args, out):
    problem = build_problem(args)
    pda = problem.pda
    word = pda.alphabet.parse(" ".join(args.word))
    accepted, config, steps = pda.run(word, trace=True)
    if args.trace:
        for s in steps:
            out.write(str(s) + "\n")
    emit(out, {"command": "run-pda", "word": word, "final": str(config),
               "verdict": "member" if accepted else "non-member", "pda_steps": len(steps)}, args.pretty)
    return EXIT_OK if accepted else EXIT_NO


def cmd_oracle_dump(args, out):
    problem = build_problem(args)
    cosets = problem.cosets()
    snap = coset_bfs(cosets, args.radius)
    if args.all_words:
        for w in words_upto(problem.alphabet, args.radius):
            out.write(f"{format_word(w) or '-'} {snap.length(w)}\n")
    else:
        for c, rep in snap.reps.items():
            out.write(f"{format_word(rep) or '-'} {snap.lengths[c]}\n")
    return EXIT_OK


def _suite_record(r: suites.SuiteResult):
    rec = {"suite": r.suite, "fixture": r.fixture, "result": "pass" if r.passed else "fail", "checked": r.checked}
    for k, v in r.details.items():
        if k in ("report", "reports", "invariant_failures", "work_bound_failures"):
            continue
        rec[k] = v
    if r.witnesses:
        rec["witness"] = r.witnesses[0]
    rec["seconds"] = f"{r.seconds:.2f}"
    return rec


DEFAULT_FIXTURES = {
    "equivalence": ["f2-a", "f2-a2b", "f2-aba-b2"],
    "star": ["f2-a", "f2-a2b", "f2-aba-b2"],
    "realtime": ["f2-a"],
    "gib": ["f2-a"],
    "pde": ["f2-trivial"],
}


def run_suite(args, name, fixture):
    problem = load_fixture(fixture) if fixture else build_problem(args)
    if name == "equivalence":
        return suites.equivalence(problem, args.maxlen if args.maxlen is not None else 10)
    if name == "star":
        return suites.backtrack_suite(problem, args.maxlen if args.maxlen is not None else 8)
    if name == "realtime":
        eda = Eda.load(_read(args.rules), problem.alphabet) if args.rules else None
        return suites.realtime(problem, args.k or 4, args.R or 6,
                               args.maxlen if args.maxlen is not None else 12, eda=eda)
    if name == "gib":
        return suites.gib(problem, args.k if args.k is not None else 2, args.K if args.K is not None else 3,
                          args.limit if args.limit is not None else 8, jobs=args.jobs)
    if name == "pde":
        eda = Eda.load(_read(args.rules), problem.alphabet) if args.rules else None
        return suites.pde(problem, args.D, args.E, eda=eda)
    raise GwpError(f"unknown suite {name!r}")


def cmd_verify(args, out):
    if args.vf or args.gens or args.alphabet:
        fixtures = [None]
    elif args.fixture:
        fixtures = [args.fixture]
    else:
        fixtures = args.fixture_list or DEFAULT_FIXTURES[args.suite]
    ok = True
    for fx in fixtures:
        r = run_suite(args, args.suite, fx)
        ok = ok and r.passed
        emit(out, _suite_record(r), args.pretty)
        if args.suite == "gib" and args.verbose:
            for rep in r.details["reports"]:
                if not rep.passed:
                    out.write(f"  {rep}\n")
    return EXIT_OK if ok else EXIT_NO


def cmd_verify_pde(args, out):
    problem = build_problem(args)
    eda = Eda.load(_read(args.rules), problem.alphabet) if args.rules else generate_dehn_rules(problem.oracle, args.k)
    rep = verify_pde(eda, problem.oracle, args.D, args.E)
    rec = {"suite": "pde", "D": args.D, "E": args.E, "result": "pass" if rep.passed else "fail",
           "checked": rep.words_checked, "short_word_failures": len(rep.short_word_violations),
           "short_element_failures": len(rep.short_element_violations)}
    if rep.witness is not None:
        rec["witness"] = rep.witness
    emit(out, rec, args.pretty)
    return EXIT_OK if rep.passed else EXIT_NO


def cmd_verify_realtime(args, out):
    problem = build_problem(args)
    eda = build_eda(args, problem)
    R = args.R if args.R is not None else None
    r = suites.realtime(problem, args.k, R if R is not None else 6, args.maxlen, eda=eda)
    emit(out, _suite_record(r), args.pretty)
    return EXIT_OK if r.passed else EXIT_NO


def cmd_gib_check(args, out):
    problem = build_problem(args)
    reports = gib_check(problem.cosets(), problem.oracle, args.k, args.K, args.limit, jobs=args.jobs)
    failed = [r for r in reports if not r.passed]
    for r in failed if not args.verbose else reports:
        emit(out, {"center": r.center, "result": "pass" if r.passed else "fail",
                   **({"witness": r.witness[0] + (r.witness[1],)} if r.witness else {})}, args.pretty)
    emit(out, {"suite": "gib", "k": args.k, "K": args.K, "limit": args.limit, "centers": len(reports),
               "failed": len(failed), "result": "fail" if failed else "pass"}, args.pretty)
    return EXIT_NO if failed else EXIT_OK


def _corpus(args, alphabet):
    if args.corpus:
        return [alphabet.parse(line) for line in _read(args.corpus).splitlines() if line.strip()]
    rng = random.Random(args.seed)
    return [tuple(rng.choice(alphabet.symbols) for _ in range(args.length)) for _ in range(args.random)]


def cmd_bench(args, out):
    problem = build_problem(args)
    corpus = _corpus(args, problem.alphabet)
    letters = sum(len(w) for w in corpus)
    t0 = time.perf_counter()
    report = RunReport("bench")
    if args.decider == "pda":
        d = problem.pda_decider()
        steps = 0
        for w in corpus:
            d(w)
            steps += d.last_steps
        report.counters = {"words": len(corpus), "letters": letters, "pda_steps": steps}
        # one pda step per emitted letter of the rewritten word
        report.verdicts.append("pass" if problem.vf is not None or steps == letters else "fail")
    else:
        eda = free_reduction_eda(problem.alphabet) if args.decider == "free-reduction" else build_eda(args, problem)
        apps, worst = 0, 0
        for w in corpus:
            state = ReducerState()
            for x in w:
                reduce_stream(eda, state, x)
            apps += state.applications
            worst = max(worst, state.max_cascade)
            if state.applications > len(w):
                report.witnesses.append(w)
        report.counters = {"words": len(corpus), "letters": letters, "applications": apps,
                           "max_cascade": worst, "mean_per_letter": f"{apps / letters:.4f}" if letters else "0"}
        report.verdicts.append("pass" if apps <= letters and not report.witnesses else "fail")
    report.seconds = time.perf_counter() - t0
    rec = {"command": "bench", "decider": args.decider, **report.counters,
           "result": report.verdicts[0], "seconds": f"{report.seconds:.2f}"}
    if report.witnesses:
        rec["witness"] = report.witnesses[0]
    emit(out, rec, args.pretty)
    return EXIT_OK if report.ok else EXIT_NO


def cmd_fixtures(args, out):
    for f in FIXTURES.values():
        emit(out, {"name": f.name, "kind": "virtually-free" if f.vf else f.kind, "description": f.description},
             args.pretty)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _group_options(p):
    g = p.add_argument_group("group and subgroup")
    g.add_argument("--fixture", help="named fixture: " + ", ".join(FIXTURES))
    g.add_argument("--alphabet", help="alphabet file")
    g.add_argument("--gens", help="generator names, e.g. 'a b'")
    g.add_argument("--self-inverse", help="generators of order 2")
    g.add_argument("--kind", choices=["free", "free-abelian"], help="normal-form oracle (default free)")
    g.add_argument("--vf", help="virtually-free spec file")
    g.add_argument("--sub", help="subgroup generators separated by commas (over Y with --vf)")
    g.add_argument("--sub-file", help="file with one subgroup generator per line")
    g.add_argument("--hsub", help="with --vf: H over X, for the brute-force decider")
    g.add_argument("--core", help="precomputed core in the xgraph dump format")
    p.add_argument("--pretty", action="store_true", help="human-readable output")


def _eda_options(p, k=4):
    p.add_argument("--rules", help="rule file instead of generated rules")
    p.add_argument("--k", type=int, default=k, help="max Dehn rule length")
    p.add_argument("--R", type=int, default=None, help="max anchored rule length (default 2 max(K, k, 2))")


def build_parser():
    ap = argparse.ArgumentParser(prog="gwpkit", description="Subgroup membership deciders and their verifiers.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("query", help="decide whether a word lies in H")
    _group_options(p)
    _eda_options(p)
    p.add_argument("--decider", choices=["pda", "eda", "oracle"])
    p.add_argument("--radius", type=int, default=12, help="enumeration radius for the oracle decider")
    p.add_argument("word", nargs="*")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stream", help="reduce letters read from stdin, echoing the tape")
    _group_options(p)
    _eda_options(p)
    p.add_argument("--free-reduction", action="store_true", help="use only the free cancellation rules")
    p.set_defaults(func=cmd_stream, input=None)

    p = sub.add_parser("gen-dehn", help="print the Dehn rules up to length k")
    _group_options(p)
    p.add_argument("--k", type=int, default=4)
    p.set_defaults(func=cmd_gen_dehn)

    p = sub.add_parser("gen-anchored", help="print the anchored coset rules up to length R")
    _group_options(p)
    p.add_argument("--R", type=int, default=6)
    p.set_defaults(func=cmd_gen_anchored)

    p = sub.add_parser("fold", help="print the Stallings core")
    _group_options(p)
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("run-pda", help="run the pushdown automaton on a word over Y")
    _group_options(p)
    p.add_argument("--trace", action="store_true", help="one line per step")
    p.add_argument("word", nargs="*")
    p.set_defaults(func=cmd_run_pda)

    p = sub.add_parser("oracle-dump", help="print 'word length' lines for cosets within a radius")
    _group_options(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--all-words", action="store_true", help="every word, not one representative per coset")
    p.set_defaults(func=cmd_oracle_dump)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["pde", "realtime", "gib", "star", "equivalence"])
    _group_options(p)
    p.add_argument("--fixtures", dest="fixture_list", nargs="+", help="run over several fixtures")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--maxlen", type=int)
    p.add_argument("--D", type=int, default=3)
    p.add_argument("--E", type=int, default=3)
    p.add_argument("--k", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--R", type=int)
    p.add_argument("--rules")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-pde", help="check the geodesy conditions of a rule set")
    _group_options(p)
    p.add_argument("--rules")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--D", type=int, default=3)
    p.add_argument("--E", type=int, default=3)
    p.set_defaults(func=cmd_verify_pde)

    p = sub.add_parser("verify-realtime", help="exhaustive tape-length ratio check")
    _group_options(p)
    _eda_options(p)
    p.add_argument("--maxlen", type=int, default=12)
    p.set_defaults(func=cmd_verify_realtime)

    p = sub.add_parser("gib-check", help="compare Schreier balls with the Cayley ball")
    _group_options(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--limit", type=int, default=8)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true", help="print passing centers too")
    p.set_defaults(func=cmd_gib_check)

    p = sub.add_parser("bench", help="per-letter work statistics over a corpus")
    _group_options(p)
    _eda_options(p)
    p.add_argument("--decider", choices=["eda", "pda", "free-reduction"], default="eda")
    p.add_argument("--corpus", help="file with one word per line")
    p.add_argument("--random", type=int, default=10, help="number of random words")
    p.add_argument("--length", type=int, default=1000, help="length of random words")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("fixtures", help="list the built-in fixtures")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except GwpError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
