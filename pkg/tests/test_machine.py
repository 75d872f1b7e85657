import pytest
from hypothesis import given

from conftest import commands
from seqcore.bundled import load_corpus
from seqcore.machine import Machine, Rule, Status
from seqcore.surface import parse_command, parse_term
from seqcore.syntax import Discipline, alpha_eq

M = Machine()


def steps_to(text, expected):
    r = M.step(parse_command(text))
    assert r is not None
    assert alpha_eq(r.next, parse_command(expected))
    return r


def test_value_classification():
    mu = parse_term("mu a. < x | _ : v | a >")
    assert not M.is_value(mu, Discipline.V)
    assert M.is_value(mu, Discipline.N)
    assert M.is_value(parse_term("Inl(x)"), Discipline.V)
    assert not M.is_weak(parse_term("Inl(mu a. < x | _ : v | a >)"))


@pytest.mark.parametrize("disc, expected", [("v", "< x | _ : v | a >"), ("n", "< y | _ : n | b >")])
def test_critical_pair(disc, expected):
    steps_to(f"< mu d. < x | _ : {disc} | a > | _ : {disc} | mut z. < y | _ : {disc} | b > >", expected)


def test_pattern_match():
    r = steps_to("< Inr(Unit) | _ : v | case { Inl(x) => < x | _ : v | a > | Inr(y) => < y | _ : v | b > } >",
                 "< Unit | _ : v | b >")
    assert r.rule is Rule.BP


def test_copattern_match():
    r = steps_to("< cocase { Fst[k] => < x | _ : n | k > | Snd[k] => < y | _ : n | k > } | _ : n | Snd[a] >",
                 "< y | _ : n | a >")
    assert r.rule is Rule.BQ


def test_need_delays_then_shares():
    c = parse_command("< mu a. < Unit | _ : v | c > | _ : need | mut x. < x | _ : need | a > >")
    # the consumer forces x, so the producer runs first
    r = M.step(c)
    assert r.rule is Rule.BMU


def test_need_binding_does_not_substitute_variables():
    c = parse_command("< x | _ : need | mut y. < y | _ : need | b > >")
    assert M.step(c) is None
    assert M.needed(c) == {"x", "b"}


def test_coneed_dual():
    c = parse_command("< z | _ : coneed | mut y. < y | _ : coneed | b > >")
    assert M.step(c).rule is Rule.BMUT


def test_statuses():
    assert M.run(parse_command("< x | _ : v | a >")).status is Status.FINISHED
    stuck = parse_command("< Unit | _ : v | case { Inl(x) => < x | _ : v | a > } >")
    assert M.run(stuck).status is Status.STUCK
    loop = load_corpus("cd")
    prog = next(f for f in loop if f.name == "loop").program()
    obs = Machine(prog.signature()).run(prog.entry("main").command, fuel=50)
    assert obs.status is Status.TIMEOUT and obs.steps == 50


def test_heap_descent_reports_depth():
    # y is delayed and never forced, so reduction continues under the need frame
    c = parse_command("< mu a. < x | _ : v | a > | _ : need | mut y. "
                      "< Inl(Unit) | _ : v | case { Inl(u) => < u | _ : v | b > } > >")
    r = M.step(c)
    assert r.rule is Rule.BP and r.depth == 1
    assert alpha_eq(r.next, parse_command("< mu a. < x | _ : v | a > | _ : need | mut y. < Unit | _ : v | b > >"))


def test_rule_sequence_of_shared_thunk():
    prog = next(f for f in load_corpus("cd") if f.name == "need_share").program()
    obs = Machine(prog.signature()).run(prog.entry("main").command, trace=True)
    assert [str(r.rule) for r in obs.trace] == ["bmu", "bmut_need", "bp"]
    assert obs.needed == {"a"}


@given(commands())
def test_at_most_one_redex(c):
    for _ in range(50):
        assert len(M.applicable(c)) <= 1
        r = M.step(c)
        if r is None:
            break
        assert M.applicable(c)[0] == (r.rule, r.depth)
        c = r.next


@given(commands())
def test_normal_forms_need_something_or_are_stuck(c):
    obs = M.run(c, fuel=300)
    if obs.status is Status.FINISHED:
        assert obs.needed and M.step(obs.final) is None
    elif obs.status is Status.STUCK:
        assert not obs.needed
