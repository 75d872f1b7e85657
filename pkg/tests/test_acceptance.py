"""Acceptance criteria; each test prints one PASS/FAIL line (run with -s to see them)."""
import time

import pytest

from seqcore.bundled import get, load_corpus
from seqcore.cli import diffrun_entry
from seqcore.compile import encode_command
from seqcore.frontend import Strategy, lmtm_run, polarize
from seqcore.gen import Generator, random_commands
from seqcore.iso import check_encoding, run_suite
from seqcore.kinds import core_signature
from seqcore.lmtm import LCmd, LCoVar, LLit
from seqcore.machine import Machine, Status
from seqcore.surface import inline_lmtm, parse_command, parse_program
from seqcore.syntax import (
    Case, CoCase, Con, CoPattern, CoVar, Cut, Des, Discipline, Pattern, Subst, TApp, TCon, alpha_eq, substitute,
)
from seqcore.typing import Mode, TypeContext, check_command, check_entry


def report(n, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail} ({elapsed * 1000:.1f} ms, budget {budget * 1000:.0f} ms)")
    return ok


def test_1_critical_pair():
    c = parse_command("< mu d. < x | _ : v | a > | _ : v | mut z. < y | _ : v | b > >")
    m = Machine()
    t = time.perf_counter()
    under_v = m.step(c).next
    under_n = m.step(Cut(c.term, c.type, Discipline.N, c.coterm)).next
    dt = time.perf_counter() - t
    ok = alpha_eq(under_v, parse_command("< x | _ : v | a >")) and alpha_eq(under_n, parse_command("< y | _ : v | b >"))
    assert report(1, ok, "v picks the producer, n the consumer", dt, 0.001)


def test_2_golden_trace():
    prog = get("i_example").program()
    c = inline_lmtm(prog, prog.entries["main"])
    t = time.perf_counter()
    direct = lmtm_run(c, Strategy.NEED)
    pz = polarize(c, Strategy.NEED)
    machine = Machine(pz.signature).run(pz.command)
    dt = time.perf_counter() - t
    rules = [r.value for r, _ in direct.trace]
    ok = (rules == ["bfun", "bmu", "bfun", "bmut", "bfun", "bfun"]
          and direct.status is Status.FINISHED and direct.needed == {"alpha"}
          and machine.status is Status.FINISHED and machine.needed == {"alpha"}
          and direct.final == LCmd(LLit(5), LCoVar("alpha"))
          and machine.final.term == Con("5") and machine.final.coterm == CoVar("alpha"))
    assert report(2, ok, f"direct rules {rules}, needed {sorted(direct.needed)} / {sorted(machine.needed)}", dt, 0.010)


def _visit(machine, c, fuel=10_000):
    """Yield every state of the run of c."""
    yield c
    for _ in range(fuel):
        r = machine.step(c)
        if r is None:
            return
        c = r.next
        yield c


def test_3_determinism():
    t = time.perf_counter()
    corpus = load_corpus("cd")
    states = bad = 0
    for cf in corpus:
        prog = cf.program()
        m = Machine(prog.signature())
        for name in prog.entries:
            fuel = 200 if cf.name == "loop" else 10_000
            for s in _visit(m, prog.entry(name).command, fuel):
                states += 1
                bad += len(m.applicable(s)) > 1
    core = Machine()
    commands = random_commands(1000, seed=2024, depth=4)
    for c in commands:
        for s in _visit(core, c, 200):
            states += 1
            bad += len(core.applicable(s)) > 1
    dt = time.perf_counter() - t
    ok = len(corpus) >= 30 and len(commands) >= 1000 and bad == 0
    assert report(3, ok, f"{len(corpus)} programs + {len(commands)} random commands, {states} states, "
                         f"{bad} with >1 redex", dt, 30)


def test_4_type_safety():
    t = time.perf_counter()
    states = violations = 0
    for cf in load_corpus("cd"):
        if not cf.well_typed:
            continue
        prog = cf.program()
        sig = prog.signature()
        for name in prog.entries:
            el = check_entry(sig, prog.entry(name))
            ctx = TypeContext(sig, el.theta, el.gamma, el.delta, Mode.TYPED)
            obs = Machine(sig).run(el.command, 10_000, trace=True)
            violations += obs.status is Status.STUCK
            for r in obs.trace:
                states += 1
                try:
                    check_command(ctx, r.next)
                except Exception:
                    violations += 1
    dt = time.perf_counter() - t
    assert report(4, violations == 0, f"{states} intermediate states re-checked, {violations} violations", dt, 30)


def test_5_operational_correspondence():
    t = time.perf_counter()
    runs = mismatches = 0
    for cf in load_corpus("cd"):
        prog = cf.program()
        for name in prog.entries:
            r = diffrun_entry(prog, name, 10_000, cf.name)
            runs += 1
            if not r.equal or r.compiled.steps < r.source.steps:
                mismatches += 1
    dt = time.perf_counter() - t
    assert report(5, mismatches == 0, f"{runs} source/core pairs, {mismatches} mismatches", dt, 60)


REDEX_DECLS = """
data Tri (X:v) (Y:v) : v where A : (X, Y) |- ; B : (Y) |- ; C : () |- ;
data Sub (X:v) (Y:n) : v where Minus : (X) |- (Y) ;
data Box (X:n) : need where Hold : (X) |- ;
data Ex : v where Pk : [Y:n] (Y) |- ;
codata Fun (X:v) (Y:n) : n where Call : (X) -| (Y) ; Skip : () -| () ;
codata Poly : n where Inst : [Y:v] (Y) -| (ToNeg@v Y) ;
codata Two : coneed where L : () -| (Bot) ; R : (One, One) -| () ;
"""


def _pattern(d, x, g, tvs=None, xs=None, bs=None):
    tvs = tvs if tvs is not None else tuple(g._name("Y") for _ in x.quantified)
    xs = xs if xs is not None else tuple(g._name("w") for _ in x.term_inputs)
    bs = bs if bs is not None else tuple(g._name("q") for _ in x.coterm_inputs)
    return Pattern(x.name, tvs, bs, xs) if d.is_data else CoPattern(x.name, tvs, xs, bs)


def beta_redexes(rounds=8, seed=11):
    """(redex, direct c[rho], signature) triples over several declared connectives."""
    sig = parse_program(REDEX_DECLS).signature()
    g = Generator(seed)
    out = []
    for _ in range(rounds):
        for d in sig.declared():
            for x in d.xtors:
                env0 = (dict(g.free_vars), dict(g.free_covars))
                tvs = tuple(g._name("Y") for _ in x.quantified)
                xs = tuple(g._name("y") for _ in x.term_inputs)
                bs = tuple(g._name("be") for _ in x.coterm_inputs)
                env = ({**env0[0], **{y: s for y, (_, s) in zip(xs, x.term_inputs)}},
                       {**env0[1], **{b: s for b, (_, s) in zip(bs, x.coterm_inputs)}})
                tys = tuple(TApp(TCon(f"FromPos@{q.value}"), TCon("One")) for _, q in x.quantified)
                vals = tuple(g.value(s, 2, env0) for _, s in x.term_inputs)
                covs = tuple(g.covalue(s, 2, env0) for _, s in x.coterm_inputs)
                body = g.command_at(3, env)
                branches = tuple((_pattern(d, x, g, tvs, xs, bs), body) if x2 is x
                                 else (_pattern(d, x2, g), g.command_at(1, env0)) for x2 in d.xtors)
                if d.is_data:
                    redex = Cut(Con(x.name, tys, covs, vals), None, d.result, Case(branches))
                else:
                    redex = Cut(CoCase(branches), None, d.result, Des(x.name, tys, vals, covs))
                rho = Subst(types=dict(zip(tvs, tys)), terms=dict(zip(xs, vals)), coterms=dict(zip(bs, covs)))
                out.append((redex, substitute(body, rho), sig))
    return out


def test_6_macro_matching():
    t = time.perf_counter()
    core = Machine(core_signature())
    redexes = beta_redexes()
    failures = 0
    for redex, direct, sig in redexes:
        goal = encode_command(sig, direct)
        reached = False
        for s in _visit(core, encode_command(sig, redex), 100):
            if alpha_eq(s, goal):
                reached = True
                break
        failures += not reached
    dt = time.perf_counter() - t
    ok = len(redexes) >= 50 and failures == 0
    assert report(6, ok, f"{len(redexes)} encoded beta-redexes, {failures} failures", dt, 60)


ENCODED = """
data Either (X:v) (Y:v) : v where Left : (X) |- ; Right : (Y) |- ;
data Sub (X:v) (Y:n) : v where Minus : (X) |- (Y) ;
data Three : v where R : () |- ; G : () |- ; B : () |- ;
codata Fun (X:v) (Y:n) : n where Call : (X) -| (Y) ;
codata Pick : n where First : [Y:v] (Y) -| (ToNeg@v Y) ; Second : () -| (Bot) ;
"""


def test_7_isomorphism_suite():
    t = time.perf_counter()
    laws = run_suite()
    sig = parse_program(ENCODED).signature()
    enc = [check_encoding(sig, d.name) for d in sig.declared()]
    dt = time.perf_counter() - t
    lines = len(laws.lines) + sum(len(r.lines) for r in enc)
    failed = len(laws.failures) + sum(len(r.failures) for r in enc)
    for f in laws.failures[:5]:
        print(f)
    assert report(7, failed == 0 and lines > 0, f"{lines} round trips, {failed} failures", dt, 60)


def test_8_non_termination():
    cf = get("loop")
    prog = cf.program()
    sig = prog.signature()
    entry = prog.entry("main")
    check_entry(sig, entry, Mode.DISCIPLINE)
    t = time.perf_counter()
    obs = Machine(sig).run(entry.command, 10_000)
    dt = time.perf_counter() - t
    with pytest.raises(Exception):
        check_entry(sig, entry, Mode.TYPED)
    ok = obs.status is Status.TIMEOUT and obs.steps == 10_000
    assert report(8, ok, f"{obs.status} after {obs.steps} steps; typed checker rejects", dt, 1.0)


def test_9_substitution_closure():
    t = time.perf_counter()
    m = Machine()
    g = Generator(99)
    pairs = failures = 0
    while pairs < 500:
        c = g.command(4)
        for s in _visit(m, c, 30):
            r = m.step(s)
            if r is None:
                break
            rho = g.substitution(s)
            after = m.step(substitute(s, rho))
            pairs += 1
            if after is None or not alpha_eq(after.next, substitute(r.next, rho)):
                failures += 1
            if pairs >= 500:
                break
    dt = time.perf_counter() - t
    assert report(9, failures == 0, f"{pairs} (step, rho) pairs, {failures} failures", dt, 60)
