from hypothesis import given

from conftest import command_and_subst, commands
from seqcore.surface import parse_command, parse_term
from seqcore.syntax import (
    Cut, CoVar, Discipline, Mu, MuT, Subst, TVar, Var, alpha_eq, canonical, free, fresh, rename_var, size,
    subst_type, substitute,
)


def test_fresh_avoids():
    assert fresh("x", {"y"}) == "x"
    assert fresh("x", {"x", "x0"}) not in {"x", "x0"}
    assert fresh("k3", {"k3"}).startswith("k")


def test_free_names_respect_binders():
    c = parse_command("< mu a. < x | _ : v | a > | _ : v | mut y. < y | _ : v | b > >")
    fv = free(c)
    assert fv.vars == {"x"} and fv.covars == {"b"}


def test_substitution_is_capture_avoiding():
    # substituting y for x under a binder named y must rename the binder
    c = parse_command("< mu a. < x | _ : v | a > | _ : v | mut y. < y | _ : v | b > >")
    out = substitute(c, Subst(terms={"x": Var("y")}))
    assert "y" in free(out).vars
    assert alpha_eq(out, parse_command("< mu a. < y | _ : v | a > | _ : v | mut z. < z | _ : v | b > >"))


def test_alpha_eq_distinguishes_free_names():
    a = parse_command("< x | _ : v | a >")
    b = parse_command("< y | _ : v | a >")
    assert not alpha_eq(a, b)
    assert alpha_eq(parse_term("mu k. < x | _ : v | k >"), parse_term("mu j. < x | _ : v | j >"))


def test_subst_type():
    assert subst_type(TVar("X"), {"X": TVar("Y")}) == TVar("Y")


@given(commands())
def test_empty_substitution_is_identity(c):
    assert substitute(c, Subst()) == c


@given(commands())
def test_canonical_is_alpha_invariant(c):
    renamed = rename_var(c, "xv0", "fresh_name")
    assert canonical(c) == canonical(rename_var(renamed, "fresh_name", "xv0"))
    assert size(c) > 0


@given(command_and_subst())
def test_substitution_removes_replaced_names(pair):
    c, rho = pair
    fv = free(substitute(c, rho))
    introduced = set()
    for node in list(rho.terms.values()) + list(rho.coterms.values()):
        introduced |= free(node).vars
    for x in rho.terms:
        if x not in introduced:
            assert x not in fv.vars


def test_binder_shapes():
    assert isinstance(Mu("a", Cut(Var("x"), None, Discipline.V, CoVar("a"))), Mu)
    assert MuT("x", Cut(Var("x"), None, Discipline.N, CoVar("a"))).var == "x"
