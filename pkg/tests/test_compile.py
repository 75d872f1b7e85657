import pytest
from hypothesis import given

from conftest import commands
from seqcore.bundled import load_corpus
from seqcore.compile import (
    PCon, PVar, QDes, QVar, compile_command, encode_type, flatten_case, flatten_cocase, focus, is_focused, lift,
    uses_only_core,
)
from seqcore.kinds import core_signature
from seqcore.machine import Machine, Status
from seqcore.surface import parse_command, parse_program, parse_term, parse_type, print_type
from seqcore.syntax import Case, Cut, Discipline, alpha_eq

EITHER = parse_program("""
data Either (X:v) (Y:v) : v where Left : (X) |- ; Right : (Y) |- ;
codata Fun (X:v) (Y:n) : n where Call : (X) -| (Y) ;
""")
V = Discipline.V


def run(c, sig=None):
    return Machine(sig or core_signature()).run(c)


def test_lift_focuses_constructor_arguments():
    c = parse_command("< Inl(mu b. < Unit | _ : v | b >) | _ : v | k >")
    assert not is_focused(c)
    lifted = lift(c)
    assert is_focused(lifted)
    # the machine only reduces focused commands: the original is stuck, the lifted one runs
    assert run(c).status is Status.STUCK
    obs = run(lifted)
    assert obs.needed == {"k"} and alpha_eq(obs.final, parse_command("< Inl(Unit) | _ : v | k >"))


@given(commands())
def test_lift_preserves_focused_behaviour(c):
    lifted = lift(c)
    assert is_focused(lifted)
    assert alpha_eq(focus(c), c)
    a, b = Machine().run(c, 300), Machine().run(lifted, 3000)
    if a.status is not Status.TIMEOUT and b.status is not Status.TIMEOUT:
        assert a.summary() == b.summary()


NESTED = [
    (PCon("Inl", args=(PCon("Pair", args=(PVar("x"), PVar("y"))),)), parse_command("< x | _ : v | a >")),
    (PCon("Inr", args=(PVar("z"),)), parse_command("< z | _ : v | b >")),
]


@pytest.mark.parametrize("value, needed", [("Inl(Pair(Unit, u))", {"a"}), ("Inr(w)", {"b", "w"})])
def test_nested_patterns_flatten(value, needed):
    e = flatten_case(NESTED, parse_type("Sum (Tensor One One) One"))
    obs = run(Cut(parse_term(value), None, V, e))
    assert obs.status is Status.FINISHED and obs.needed == needed


def test_partial_match_stays_partial():
    e = flatten_case(NESTED[:1], parse_type("Sum (Tensor One One) One"))
    assert isinstance(e, Case) and [p.xtor for p, _ in e.branches] == ["Inl"]
    assert run(Cut(parse_term("Inr(Unit)"), None, V, e)).status is Status.STUCK


def test_overlapping_rows_take_the_first():
    rows = [(PCon("Inl", args=(PVar("x"),)), parse_command("< x | _ : v | a >")),
            (PVar("w"), parse_command("< w | _ : v | b >"))]
    e = flatten_case(rows, parse_type("Sum One One"))
    assert run(Cut(parse_term("Inl(Unit)"), None, V, e)).needed == {"a"}
    assert run(Cut(parse_term("Inr(Unit)"), None, V, e)).needed == {"b"}


def test_nested_copatterns_flatten():
    rows = [(QDes("Fst", coargs=(QDes("Snd", coargs=(QVar("k"),)),)), parse_command("< u | _ : n | k >")),
            (QDes("Fst", coargs=(QVar("j"),)), parse_command("< t | _ : n | j >")),
            (QDes("Snd", coargs=(QVar("m"),)), parse_command("< s | _ : n | m >"))]
    v = flatten_cocase(rows, parse_type("With (With Top Top) Top"))
    assert run(Cut(v, None, Discipline.N, parse_command("< x | _ : n | Fst[Snd[a]] >").coterm)).needed >= {"u"}
    assert run(Cut(v, None, Discipline.N, parse_command("< x | _ : n | Fst[Fst[a]] >").coterm)).needed >= {"t"}


def test_zero_rows_refute_empty_types():
    e = flatten_case([], parse_type("Tensor Zero One"))
    assert isinstance(e, Case)


def test_encode_type_reaches_core():
    sig = EITHER.signature()
    t = encode_type(sig, parse_type("Either One Zero", ["Either"]))
    assert print_type(t) == "FromPos@v (Sum (Tensor (ToPos@v One) One) (Sum (Tensor (ToPos@v Zero) One) Zero))"


@pytest.mark.parametrize("cf", [f for f in load_corpus("cd") if f.name != "loop"], ids=lambda f: f.name)
def test_compiled_corpus_agrees(cf):
    prog = cf.program()
    sig = prog.signature()
    for name in prog.entries:
        src = prog.entry(name).command
        core = compile_command(sig, src)
        assert uses_only_core(core)
        a, b = run(src, sig), run(core)
        assert (a.status, a.needed) == (b.status, b.needed)
        assert b.steps >= a.steps
