import dataclasses

import pytest

from seqcore.errors import IsoError
from seqcore.iso import (
    LAWS, IsoWitness, check_encoding, check_iso_observational, iso_compose, iso_refl, iso_symm, law,
    law_instances, run_suite, worker_wrapper,
)
from seqcore.machine import Machine
from seqcore.surface import parse_program, parse_term, parse_type, print_type
from seqcore.syntax import Case, CoVar, Cut, Discipline

ONE_PLUS = [parse_type("One"), parse_type("Sum One One")]


def test_catalog_has_both_polarities_and_quantifiers():
    assert {"plus-comm", "par-comm", "notn-plus", "not-forall", "shift-pos-n"} <= set(LAWS)
    assert not LAWS["with-forall"].verifiable and not LAWS["plus-exists"].verifiable
    assert sum(1 for l in LAWS.values() if l.verifiable) == len(LAWS) - 2


@pytest.mark.parametrize("name", sorted(LAWS))
def test_parametric_witnesses_type_check(name):
    for _, w in law_instances(name)[:1] or [(None, LAWS[name].build())]:
        w.check()


@pytest.mark.parametrize("name", [n for n in sorted(LAWS) if LAWS[n].verifiable])
def test_law_round_trips(name):
    report = run_suite([name])
    assert report.ok, [str(f) for f in report.failures[:3]]
    # both sides of these laws are uninhabited, so there is nothing to sample
    assert bool(report.lines) != (name in ("tensor-zero", "notp-top"))


def test_instantiation_and_kind_check():
    w = law("plus-comm", ONE_PLUS)
    assert print_type(w.A) == "Sum One (Sum One One)"
    w.check()
    with pytest.raises(IsoError):
        law("plus-comm", [parse_type("Bot"), parse_type("One")])
    with pytest.raises(IsoError):
        law("no-such-law")


def test_broken_witness_is_caught():
    w = law("plus-comm", ONE_PLUS)
    case = w.fwd.coterm
    assert isinstance(case, Case)
    (p1, c1), (p2, _) = case.branches
    # both branches now reuse the first one's body: a constant map, never invertible
    constant = Cut(w.fwd.term, w.fwd.type, w.fwd.disc, Case(((p1, c1), (p2, c1))))
    mutant = dataclasses.replace(w, fwd=constant)
    assert not check_iso_observational(mutant).ok


def test_combinators():
    w = law("tensor-comm", ONE_PLUS)
    back = iso_symm(w)
    assert back.A == w.B and back.B == w.A
    assert check_iso_observational(iso_compose(w, back)).ok
    assert check_iso_observational(iso_compose(iso_refl(w.A), w)).ok
    with pytest.raises(IsoError):
        iso_compose(w, w)


def test_worker_wrapper_converts_terms():
    w = law("plus-comm", ONE_PLUS)
    assert print_type(w.B) == "Sum (Sum One One) One"
    wrapped = worker_wrapper(w, parse_term("Inl(Unit)"))
    obs = Machine().run(Cut(wrapped, w.B, Discipline.V, CoVar("k")))
    assert obs.needed == {"k"} and obs.final.term == parse_term("Inr(Unit)")


def test_encoding_isomorphisms():
    sig = parse_program("""
        data Either (X:v) (Y:v) : v where Left : (X) |- ; Right : (Y) |- ;
        codata Pick : n where First : [Y:v] (Y) -| (ToNeg@v Y) ; Second : () -| (Bot) ;
    """).signature()
    for name in ("Either", "Pick"):
        report = check_encoding(sig, name)
        assert report.lines and report.ok
    assert iso_refl(parse_type("One")).A == parse_type("One")


def test_uninstantiated_check_refused():
    with pytest.raises(IsoError):
        check_iso_observational(LAWS["plus-comm"].build())
