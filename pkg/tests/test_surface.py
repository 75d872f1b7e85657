import pytest
from hypothesis import given

from conftest import commands
from seqcore.bundled import load_corpus
from seqcore.errors import ParseError
from seqcore.surface import (
    parse_command, parse_kind, parse_lmtm, parse_program, parse_type, print_command, print_lmtm, print_program,
    print_type,
)
from seqcore.syntax import Discipline, KArrow, alpha_eq


def test_infix_connectives():
    assert print_type(parse_type("X (+) Y")) == "Sum X Y"
    assert print_type(parse_type("X (&) (Y (|) Z)")) == "With X (Par Y Z)"


def test_kinds():
    assert parse_kind("v -> n") == KArrow(Discipline.V, Discipline.N)
    assert parse_kind("need") is Discipline.NEED


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_command("< x | _ : v | >")
    err = info.value
    assert err.line == 1 and err.column > 1
    assert err.to_dict()["rule"] == "parse"


def test_unknown_discipline_rejected():
    with pytest.raises(ParseError):
        parse_command("< x | _ : lazy | a >")


@pytest.mark.parametrize("cf", load_corpus("cd"), ids=lambda f: f.name)
def test_corpus_print_parse_round_trip(cf):
    prog = cf.program()
    again = parse_program(print_program(prog))
    assert list(again.entries) == list(prog.entries)
    for name in prog.entries:
        assert alpha_eq(again.entry(name).command, prog.entry(name).command)


@given(commands())
def test_print_parse_round_trip(c):
    assert alpha_eq(parse_command(print_command(c)), c)


def test_lmtm_round_trip():
    text = "< mu b. < \\(x, a). < x | a > | y . b > | mut f. < f | 5 . alpha > >"
    c = parse_lmtm(text)
    assert parse_lmtm(print_lmtm(c)) == c


def test_program_items():
    prog = parse_program("""
        data Bool : v where True : () |- ; False : () |- ;
        def t : Bool : v = True
        cmd main [a : Bool] = < t | Bool : v | a >
    """)
    assert "Bool" in prog.signature()
    entry = prog.entry("main")
    assert print_command(entry.command) == "< True | Bool : v | a >"
