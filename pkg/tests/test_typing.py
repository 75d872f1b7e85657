import pytest
from hypothesis import given

from conftest import commands
from seqcore.bundled import get
from seqcore.errors import TypeCheckError
from seqcore.kinds import core_signature
from seqcore.surface import parse_command, parse_term, parse_type, print_command
from seqcore.syntax import Discipline
from seqcore.typing import (
    DisciplineChecker, FocusMode, Mode, TypeContext, check_command, check_entry, check_term, elaborate,
    generate_rules,
)

SIG = core_signature()


def ctx(gamma=None, delta=None, mode=Mode.TYPED):
    g = {k: parse_type(v) for k, v in (gamma or {}).items()}
    d = {k: parse_type(v) for k, v in (delta or {}).items()}
    return TypeContext(SIG, {}, g, d, mode)


def test_well_typed_injection():
    check_command(ctx({"x": "One"}, {"a": "Sum One One"}), parse_command("< Inl(x) | Sum One One : v | a >"))


@pytest.mark.parametrize("text, rule", [
    ("< Inl(x) | Sum One Zero : v | a >", "VL"),
    ("< x | One : n | a >", "Cut"),
    ("< y | One : v | a >", "VR"),
])
def test_rejections(text, rule):
    with pytest.raises(TypeCheckError) as info:
        check_command(ctx({"x": "One"}, {"a": "Sum One One"}), parse_command(text))
    assert info.value.rule == rule


def test_focused_judgment_requires_values():
    c = ctx({"x": "One"})
    t = parse_type("Sum One One")
    unfocused = parse_term("Inl(mu b. < x | One : v | b >)")
    check_term(c, unfocused, t)
    with pytest.raises(TypeCheckError):
        check_term(c, unfocused, t, FocusMode.FOCUSED)
    check_term(c, parse_term("Inl(x)"), t, FocusMode.FOCUSED)


def test_elaboration_fills_wildcards():
    el = elaborate(ctx({"x": "One"}, {"a": "Sum One One"}), parse_command("< Inr(x) | _ : v | a >"))
    assert print_command(el.command) == "< Inr(x) | Sum One One : v | a >"


def test_generated_rules():
    assert [r.name for r in generate_rules(SIG, SIG.decl("Sum"))] == ["SumR1", "SumR2", "SumL"]
    rules = generate_rules(SIG, SIG.decl("With"))
    assert {r.side for r in rules} == {"left", "right"}


def test_loop_is_discipline_only():
    prog = get("loop").program()
    sig = prog.signature()
    check_entry(sig, prog.entry("main"), Mode.DISCIPLINE)
    with pytest.raises(TypeCheckError):
        check_entry(sig, prog.entry("main"), Mode.TYPED)


def test_misaligned_disciplines():
    prog = get("misaligned").program()
    with pytest.raises(TypeCheckError):
        check_entry(prog.signature(), prog.entry("main"))


@given(commands())
def test_generated_commands_are_well_disciplined(c):
    from seqcore.gen import DISCS
    gamma = {f"x{s.value}0": s for s in DISCS}
    delta = {f"a{s.value}0": s for s in DISCS}
    DisciplineChecker(SIG).check_command(gamma, delta, c)


def test_discipline_checker_catches_mismatch():
    c = parse_command("< x | _ : v | a >")
    with pytest.raises(TypeCheckError):
        DisciplineChecker(SIG).check_command({"x": Discipline.N}, {"a": Discipline.V}, c)
