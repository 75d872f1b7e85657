import pytest

from seqcore.errors import KindError
from seqcore.kinds import (
    DISCIPLINES, core_signature, kind_of, normalize_type, types_equal, xtor_components,
)
from seqcore.surface import parse_program, parse_type
from seqcore.syntax import Discipline, KArrow

V, N = Discipline.V, Discipline.N


@pytest.fixture(scope="module")
def sig():
    return core_signature()


def test_core_connectives(sig):
    for name in ("Sum", "Tensor", "Zero", "One", "NotP", "With", "Par", "Top", "Bot", "NotN"):
        assert name in sig
    for s in DISCIPLINES:
        for shift in ("ToPos", "ToNeg", "FromPos", "FromNeg", "Exists", "Forall"):
            assert f"{shift}@{s.value}" in sig


def test_kind_of_application(sig):
    assert kind_of({}, sig, parse_type("Sum One One")) is V
    assert kind_of({}, sig, parse_type("Sum")) == KArrow(V, KArrow(V, V))
    assert kind_of({}, sig, parse_type("ToNeg@v One")) is N
    assert kind_of({}, sig, parse_type("FromPos@need One")) is Discipline.NEED


def test_kind_mismatch(sig):
    with pytest.raises(KindError) as info:
        kind_of({}, sig, parse_type("Sum Bot One"))
    assert info.value.rule == "TyApp"
    with pytest.raises(KindError):
        kind_of({}, sig, parse_type("One One"))
    with pytest.raises(KindError):
        kind_of({}, sig, parse_type("X"))


def test_type_lambda_normalizes(sig):
    t = parse_type("(\\Y:v. Tensor Y One) Zero")
    assert types_equal(t, parse_type("Tensor Zero One"))
    assert normalize_type(parse_type("\\Y:v. Sum One Y")) == parse_type("Sum One")
    assert kind_of({}, sig, parse_type("Forall@v (\\Y:v. ToNeg@v Y)")) is N


def test_declaration_checks():
    with pytest.raises(KindError):
        parse_program("data L : v where Cons : (L) |- ;").signature()
    with pytest.raises(KindError):
        parse_program("data D : v where K : () |- ; K : () |- ;").signature()
    with pytest.raises(KindError):
        parse_program("data D (F:v -> v) : v where K : (F) |- ;").signature()
    sig = parse_program("data D (X:v) (Y:n) : v where K : (X) |- (Y) ;").signature()
    assert sig.connective_kind("D") == KArrow(V, KArrow(N, V))
    terms, coterms = xtor_components(sig, "K", [parse_type("One"), parse_type("Bot")], [])
    assert terms == [(parse_type("One"), V)] and coterms == [(parse_type("Bot"), N)]
