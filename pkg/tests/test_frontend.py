import pytest

from seqcore.bundled import load_corpus
from seqcore.errors import CompileError
from seqcore.frontend import (
    Scheme, Strategy, is_lcovalue, is_lvalue, lfree, lmtm_run, lmtm_step, lsubst, polarize, well_formed,
)
from seqcore.machine import Machine, Status
from seqcore.surface import inline_lmtm, parse_lmtm, print_lmtm
from seqcore.typing import Mode, TypeContext, check_command

LMTM = load_corpus("lmtm")


def main_of(cf):
    prog = cf.program()
    return inline_lmtm(prog, prog.entries["main"])


def test_strategy_aliases():
    assert Strategy.parse("cbv") is Strategy.Q and Strategy.parse("T") is Strategy.T
    with pytest.raises(ValueError):
        Strategy.parse("eager")


@pytest.mark.parametrize("s, goal", [(Strategy.Q, "< x | alpha >"), (Strategy.T, "< y | beta >")])
def test_critical_pair(s, goal):
    c = parse_lmtm("< mu d. < x | alpha > | mut z. < y | beta > >")
    rule, nxt, _ = lmtm_step(c, s)
    assert print_lmtm(nxt) == goal


def test_values_per_strategy():
    mu = parse_lmtm("< mu a. < x | a > | b >").term
    assert is_lvalue(mu, Strategy.T) and not is_lvalue(mu, Strategy.Q)
    need_mu_t = parse_lmtm("< y | mut x. < x | alpha > >").coterm
    assert is_lcovalue(need_mu_t, Strategy.NEED)
    assert not is_lcovalue(parse_lmtm("< y | mut x. < 1 | alpha > >").coterm, Strategy.NEED)


def test_free_names_and_substitution():
    c = parse_lmtm("< \\(x, a). < x | b > | y . a >")
    fv, fc = lfree(c)
    assert fv == {"y"} and fc == {"a", "b"}
    out = lsubst(c, {"y": parse_lmtm("< x | k >").term}, {})
    assert "x" in lfree(out)[0]
    assert well_formed(c, Strategy.NEED)


def test_i_example_under_need():
    c = main_of(next(f for f in LMTM if f.name == "i_example"))
    obs = lmtm_run(c, Strategy.NEED)
    assert [str(r) for r, _ in obs.trace] == ["bfun", "bmu", "bfun", "bmut", "bfun", "bfun"]
    assert print_lmtm(obs.final) == "< 5 | alpha >" and obs.needed == {"alpha"}


def test_classic_scheme_only_covers_value_and_name():
    c = parse_lmtm("< 1 | alpha >")
    for s in (Strategy.NEED, Strategy.CONEED):
        with pytest.raises(CompileError):
            polarize(c, s, Scheme.CLASSIC)


CASES = [(f, s, sch) for f in LMTM for s in Strategy
         for sch in ((Scheme.GENERIC, Scheme.CLASSIC) if s in (Strategy.Q, Strategy.T) else (Scheme.GENERIC,))]


@pytest.mark.parametrize("cf, s, scheme", CASES, ids=lambda x: getattr(x, "name", str(x)))
def test_polarization_preserves_observations(cf, s, scheme):
    c = main_of(cf)
    direct = lmtm_run(c, s)
    pz = polarize(c, s, scheme)
    obs = Machine(pz.signature).run(pz.command)
    assert obs.status == direct.status
    assert obs.needed == direct.needed
    if pz.typed:
        ctx = TypeContext(pz.signature, pz.theta, pz.gamma, pz.delta, Mode.TYPED)
        check_command(ctx, pz.command)
    else:
        assert pz.note


def test_polarized_program_prints():
    pz = polarize(parse_lmtm("< inr 7 | case { inl x => < 1 | alpha > | inr y => < y | alpha > } >"), Strategy.Q)
    text = pz.program().entries
    assert text and Machine(pz.signature).run(pz.command).status is Status.FINISHED
