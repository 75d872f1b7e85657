"""Parametric type isomorphisms: witnesses, the core law catalog, and observational checks.

A witness for ``A ≅ B`` is a pair of commands ``fwd : (x:A ⊢ b:B)`` and
``bwd : (y:B ⊢ a:A)``.  Laws are built from (co)pattern correspondences which
are flattened with the compile module's match compiler, so the same pair of
commands is used at every instantiation of the law's parameters.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .compile import (
    PCon, PVar, QDes, QVar, encode_pattern, encode_type, flatten_case, flatten_cocase, from_flat,
)
from .errors import IsoError
from .kinds import Signature, base_kind, core_signature, head_connective, kind_of, normalize_type, xtor_components
from .machine import Machine, Status
from .syntax import (
    Case, CoCase, Con, CoPattern, CoVar, Cut, Des, Discipline, KArrow, Kind, Mu, MuT, Pattern, Subst,
    TApp, TCon, TLam, TVar, TypeExpr, Var, alpha_eq, canonical, map_types, substitute,
)

V, N, NEED, CONEED = Discipline.V, Discipline.N, Discipline.NEED, Discipline.CONEED
DISCIPLINES = (V, N, NEED, CONEED)


def tc(name: str, *args: TypeExpr) -> TypeExpr:
    t: TypeExpr = TCon(name)
    for a in args:
        t = TApp(t, a)
    return t


def default_instance(s: Discipline) -> TypeExpr:
    """The type chosen for a quantifier that the other side does not determine."""
    return tc(f"FromPos@{s.value}", tc("One"))


def quantifier_instances(s: Discipline) -> list[TypeExpr]:
    """Two closed types of kind s, one positive and one negative at heart."""
    return [tc(f"FromPos@{s.value}", tc("One")), tc(f"FromNeg@{s.value}", tc("Bot"))]


# --- witnesses --------------------------------------------------------------

@dataclass
class IsoWitness:
    theta: dict
    A: TypeExpr
    B: TypeExpr
    kind: Kind
    fwd: Cut        # x : A ⊢ b : B
    bwd: Cut        # y : B ⊢ a : A
    name: str = "iso"
    sig: Signature = field(default_factory=core_signature)

    @property
    def disc(self) -> Discipline:
        return self.kind if isinstance(self.kind, Discipline) else base_kind(self.theta, self.sig, self.A)

    def check(self) -> None:
        """Type-check both commands at their sequents."""
        from .typing import TypeContext, check_command
        check_command(TypeContext(self.sig, self.theta, {"x": self.A}, {"b": self.B}), self.fwd)
        check_command(TypeContext(self.sig, self.theta, {"y": self.B}, {"a": self.A}), self.bwd)

    def instantiate(self, args: dict) -> "IsoWitness":
        """Substitute closed types for (some of) the parameters in theta."""
        rho = Subst(types=dict(args))
        theta = {x: k for x, k in self.theta.items() if x not in args}
        A = normalize_type(_subst_ty(self.A, args))
        B = normalize_type(_subst_ty(self.B, args))
        fwd = map_types(substitute(self.fwd, rho), normalize_type)
        bwd = map_types(substitute(self.bwd, rho), normalize_type)
        return IsoWitness(theta, A, B, self.kind, fwd, bwd, self.name, self.sig)

    def __str__(self) -> str:
        from .surface import print_type
        return f"{self.name}: {print_type(self.A)} ≅ {print_type(self.B)}"


def _subst_ty(t, mapping):
    from .syntax import subst_type
    return subst_type(t, mapping)


def iso_refl(A: TypeExpr, sig: Optional[Signature] = None, theta: Optional[dict] = None) -> IsoWitness:
    sig = sig or core_signature()
    theta = dict(theta or {})
    A = normalize_type(A)
    s = base_kind(theta, sig, A)
    return IsoWitness(theta, A, A, s, Cut(Var("x"), A, s, CoVar("b")), Cut(Var("y"), A, s, CoVar("a")),
                      "refl", sig)


def iso_symm(w: IsoWitness) -> IsoWitness:
    ren_f = Subst(terms={"x": Var("y")}, coterms={"b": CoVar("a")})
    ren_b = Subst(terms={"y": Var("x")}, coterms={"a": CoVar("b")})
    return IsoWitness(dict(w.theta), w.B, w.A, w.kind, substitute(w.bwd, ren_b), substitute(w.fwd, ren_f),
                      f"symm({w.name})", w.sig)


def iso_compose(w1: IsoWitness, w2: IsoWitness) -> IsoWitness:
    """A ≅ B and B ≅ C give A ≅ C by cutting the witnesses at B."""
    if not alpha_eq(normalize_type(w1.B), normalize_type(w2.A)):
        raise IsoError(f"cannot compose {w1} with {w2}: middle types differ", rule="compose")
    if w1.disc != w2.disc:
        raise IsoError(f"cannot compose {w1} with {w2}: kinds differ", rule="compose")
    s = w1.disc
    sig = w1.sig if len(w1.sig.declared()) >= len(w2.sig.declared()) else w2.sig
    fwd = Cut(Mu("b", w1.fwd), w1.B, s, MuT("x", w2.fwd))
    bwd = Cut(Mu("a", w2.bwd), w2.A, s, MuT("y", w1.bwd))
    return IsoWitness({**w1.theta, **w2.theta}, w1.A, w2.B, w1.kind, fwd, bwd,
                      f"{w1.name};{w2.name}", sig)


def worker_wrapper(w: IsoWitness, v) -> Mu:
    """Turn a term at A into one at B: μb.⟨v ‖ A ‖ μ̃x.fwd⟩."""
    return Mu("b", Cut(v, w.A, w.disc, MuT("x", w.fwd)))


def worker_wrapper_coterm(w: IsoWitness, e) -> MuT:
    """Turn a coterm at B into one at A: μ̃x.⟨μb.fwd ‖ B ‖ e⟩."""
    return MuT("x", Cut(Mu("b", w.fwd), w.B, w.disc, e))


# --- building witnesses from (co)pattern correspondences -------------------

def _pat_tyvars(p) -> set:
    if isinstance(p, (PVar, QVar)):
        return set()
    out = set(p.tyvars)
    for q in p.coargs + p.args:
        out |= _pat_tyvars(q)
    return out


def emit(p, bound: set, sig: Signature):
    """The (co)term a nested pattern denotes; unbound type variables take the default instance."""
    if isinstance(p, PVar):
        return Var(p.name)
    if isinstance(p, QVar):
        return CoVar(p.name)
    d, i = sig.xtor(p.xtor)
    quant = d.xtors[i].quantified
    tys = tuple(TVar(y) if y in bound else default_instance(quant[k][1]) for k, y in enumerate(p.tyvars))
    if isinstance(p, PCon):
        return Con(p.xtor, tys, tuple(emit(q, bound, sig) for q in p.coargs),
                   tuple(emit(a, bound, sig) for a in p.args))
    return Des(p.xtor, tys, tuple(emit(a, bound, sig) for a in p.args),
               tuple(emit(q, bound, sig) for q in p.coargs))


def from_patterns(name: str, theta: dict, A: TypeExpr, B: TypeExpr, rows, sig: Optional[Signature] = None
                  ) -> IsoWitness:
    """Witness from rows (pattern on A, pattern on B); copattern rows give a negative witness."""
    sig = sig or core_signature()
    A, B = normalize_type(A), normalize_type(B)
    s = base_kind(theta, sig, A)
    t = base_kind(theta, sig, B)
    if s != t:
        raise IsoError(f"{name}: sides have kinds {s.value} and {t.value}", rule="law")
    rows = list(rows)
    negative = any(isinstance(p, (QVar, QDes)) for r in rows for p in r)
    if not rows:
        negative = bool((d := _decl_of(sig, A)) and not d.is_data)
    if not negative:
        fwd = Cut(Var("x"), A, s, flatten_case(
            [(pa, Cut(emit(pb, _pat_tyvars(pa), sig), B, s, CoVar("b"))) for pa, pb in rows], A, sig))
        bwd = Cut(Var("y"), B, s, flatten_case(
            [(pb, Cut(emit(pa, _pat_tyvars(pb), sig), A, s, CoVar("a"))) for pa, pb in rows], B, sig))
    else:
        fwd = Cut(flatten_cocase(
            [(qb, Cut(Var("x"), A, s, emit(qa, _pat_tyvars(qb), sig))) for qa, qb in rows], B, sig),
            B, s, CoVar("b"))
        bwd = Cut(flatten_cocase(
            [(qa, Cut(Var("y"), B, s, emit(qb, _pat_tyvars(qa), sig))) for qa, qb in rows], A, sig),
            A, s, CoVar("a"))
    return IsoWitness(dict(theta), A, B, s, fwd, bwd, name, sig)


def _decl_of(sig, t):
    hc = head_connective(t)
    return sig.decl(hc[0]) if hc else None


# --- the law catalog --------------------------------------------------------

def _C(x, *args, co=(), ty=()):
    return PCon(x, tuple(ty), tuple(co), tuple(args))


def _D(x, *coargs, args=(), ty=()):
    return QDes(x, tuple(ty), tuple(args), tuple(coargs))


u1, u2, u3 = PVar("u1"), PVar("u2"), PVar("u3")
k1, k2, k3 = QVar("k1"), QVar("k2"), QVar("k3")


@dataclass(frozen=True)
class Law:
    name: str
    statement: str
    verifiable: bool
    build: Callable[..., IsoWitness]     # (args, discs) -> witness
    arity: int


_A, _B, _C3 = TVar("A"), TVar("B"), TVar("C")


def _algebraic(name, kinds, A, B, rows):
    def build(S=V, T=V):
        theta = {n: k for n, k in zip("ABC", kinds)}
        return from_patterns(name, theta, A, B, rows)
    return build


def _pos3(name, A, B, rows):
    return _algebraic(name, (V, V, V), A, B, rows)


def _neg3(name, A, B, rows):
    return _algebraic(name, (N, N, N), A, B, rows)


def _shift_pos_n(S=V, T=V):
    B = TVar("B")
    lhs, rhs = tc("ToPos@n", B), tc("FromNeg@v", B)
    fwd = Cut(Var("x"), lhs, V, Case(((Pattern("Wrap@n", (), (), ("u1",)),
          Cut(CoCase(((CoPattern("Force@v", (), (), ("k1",)), Cut(Var("u1"), B, N, CoVar("k1"))),)),
              rhs, V, CoVar("b"))),)))
    bwd = Cut(Con("Wrap@n", (), (), (Mu("k1", Cut(Var("y"), rhs, V, Des("Force@v", (), (), (CoVar("k1"),)))),)),
              lhs, V, CoVar("a"))
    return IsoWitness({"B": N}, lhs, rhs, V, fwd, bwd, "shift-pos-n")


def _shift_neg_v(S=V, T=V):
    A = TVar("A")
    lhs, rhs = tc("ToNeg@v", A), tc("FromPos@n", A)
    fwd = Cut(Var("x"), lhs, N, Des("Unwrap@v", (), (), (MuT("u1", Cut(Con("Delay@n", (), (), (Var("u1"),)),
                                                                        rhs, N, CoVar("b"))),)))
    bwd = Cut(CoCase(((CoPattern("Unwrap@v", (), (), ("k1",)),
                       Cut(Var("y"), rhs, N, Case(((Pattern("Delay@n", (), (), ("u1",)),
                                                    Cut(Var("u1"), A, V, CoVar("k1"))),)))),)),
              lhs, N, CoVar("a"))
    return IsoWitness({"A": V}, lhs, rhs, N, fwd, bwd, "shift-neg-v")


def _shift_id_v(S=V, T=V):
    w1 = _simple("topos-v", {"A": V}, tc("ToPos@v", _A), _A, [(_C("Wrap@v", u1), u1)])
    w2 = _simple("frompos-v", {"A": V}, _A, tc("FromPos@v", _A), [(u1, _C("Delay@v", u1))])
    w = iso_compose(w1, w2)
    w.name = "shift-id-v"
    return w


def _shift_id_n(S=V, T=V):
    w1 = _simple("toneg-n", {"B": N}, tc("ToNeg@n", _B), _B, [(_D("Unwrap@n", k1), k1)])
    w2 = _simple("fromneg-n", {"B": N}, _B, tc("FromNeg@n", _B), [(k1, _D("Force@n", k1))])
    w = iso_compose(w1, w2)
    w.name = "shift-id-n"
    return w


def _simple(name, theta, A, B, rows):
    return from_patterns(name, theta, A, B, rows)


def _fixed(name, theta, A, B, rows):
    def build(S=V, T=V):
        return from_patterns(name, theta, A, B, rows)
    return build


def _lam(x, k, body):
    return TLam(x, k, body)


_F = TVar("F")
_X, _Y = TVar("X"), TVar("Y")


def _forall(s, body_fn):
    return tc(f"Forall@{s.value}", _lam("X", s, body_fn(_X)))


def _exists(s, body_fn):
    return tc(f"Exists@{s.value}", _lam("X", s, body_fn(_X)))


def _q_swap(neg: bool):
    def build(S=V, T=V):
        q = "Forall" if neg else "Exists"
        r = N if neg else V
        theta = {"F": KArrow(S, KArrow(T, r))}
        A = tc(f"{q}@{S.value}", _lam("X", S, tc(f"{q}@{T.value}", _lam("Y", T, TApp(TApp(_F, _X), _Y)))))
        B = tc(f"{q}@{T.value}", _lam("Y", T, tc(f"{q}@{S.value}", _lam("X", S, TApp(TApp(_F, _X), _Y)))))
        if neg:
            rows = [(_D(f"Spec@{S.value}", _D(f"Spec@{T.value}", k1, ty=["Y1"]), ty=["X1"]),
                     _D(f"Spec@{T.value}", _D(f"Spec@{S.value}", k1, ty=["X1"]), ty=["Y1"]))]
        else:
            rows = [(_C(f"Pack@{S.value}", _C(f"Pack@{T.value}", u1, ty=["Y1"]), ty=["X1"]),
                     _C(f"Pack@{T.value}", _C(f"Pack@{S.value}", u1, ty=["X1"]), ty=["Y1"]))]
        return from_patterns("forall-swap" if neg else "exists-swap", theta, A, B, rows)
    return build


def _q_drop(neg: bool):
    def build(S=V, T=V):
        if neg:
            A = tc(f"Forall@{S.value}", _lam("X", S, _B))
            return from_patterns("forall-drop", {"B": N}, A, _B, [(_D(f"Spec@{S.value}", k1, ty=["X1"]), k1)])
        A = tc(f"Exists@{S.value}", _lam("X", S, _A))
        return from_patterns("exists-drop", {"A": V}, A, _A, [(_C(f"Pack@{S.value}", u1, ty=["X1"]), u1)])
    return build


def _q_mult(neg: bool):
    """(∀X.F X) ⅋ D ≅ ∀X.(F X ⅋ D) and its positive dual."""
    def build(S=V, T=V):
        if neg:
            theta = {"F": KArrow(S, N), "B": N}
            A = tc("Par", _forall(S, lambda X: TApp(_F, X)), _B)
            B = _forall(S, lambda X: tc("Par", TApp(_F, X), _B))
            rows = [(_D("CoPair", _D(f"Spec@{S.value}", k1, ty=["X1"]), k2),
                     _D(f"Spec@{S.value}", _D("CoPair", k1, k2), ty=["X1"]))]
            return from_patterns("forall-par", theta, A, B, rows)
        theta = {"F": KArrow(S, V), "A": V}
        A = tc("Tensor", _exists(S, lambda X: TApp(_F, X)), _A)
        B = _exists(S, lambda X: tc("Tensor", TApp(_F, X), _A))
        rows = [(_C("Pair", _C(f"Pack@{S.value}", u1, ty=["X1"]), u2),
                 _C(f"Pack@{S.value}", _C("Pair", u1, u2), ty=["X1"]))]
        return from_patterns("exists-tensor", theta, A, B, rows)
    return build


def _q_add(neg: bool):
    """(∀X.F X) & D ≅ ∀X.(F X & D) and (∃X.F X) ⊕ A ≅ ∃X.(F X ⊕ A); need type-irrelevant η."""
    def build(S=V, T=V):
        if neg:
            theta = {"F": KArrow(S, N), "B": N}
            A = tc("With", _forall(S, lambda X: TApp(_F, X)), _B)
            B = _forall(S, lambda X: tc("With", TApp(_F, X), _B))
            rows = [(_D("Fst", _D(f"Spec@{S.value}", k1, ty=["X1"])),
                     _D(f"Spec@{S.value}", _D("Fst", k1), ty=["X1"])),
                    (_D("Snd", k2), _D(f"Spec@{S.value}", _D("Snd", k2), ty=["X2"]))]
            return from_patterns("with-forall", theta, A, B, rows)
        theta = {"F": KArrow(S, V), "A": V}
        A = tc("Sum", _exists(S, lambda X: TApp(_F, X)), _A)
        B = _exists(S, lambda X: tc("Sum", TApp(_F, X), _A))
        rows = [(_C("Inl", _C(f"Pack@{S.value}", u1, ty=["X1"])),
                 _C(f"Pack@{S.value}", _C("Inl", u1), ty=["X1"])),
                (_C("Inr", u2), _C(f"Pack@{S.value}", _C("Inr", u2), ty=["X2"]))]
        return from_patterns("plus-exists", theta, A, B, rows)
    return build


def _q_not(neg: bool):
    """¬(∀X.F X) ≅ ∃X.¬(F X) and ∼(∃X.F X) ≅ ∀X.∼(F X)."""
    def build(S=V, T=V):
        if neg:
            theta = {"F": KArrow(S, V)}
            A = tc("NotN", _exists(S, lambda X: TApp(_F, X)))
            B = _forall(S, lambda X: tc("NotN", TApp(_F, X)))
            rows = [(_D("ThrowN", args=[_C(f"Pack@{S.value}", u1, ty=["X1"])]),
                     _D(f"Spec@{S.value}", _D("ThrowN", args=[u1]), ty=["X1"]))]
            return from_patterns("not-exists", theta, A, B, rows)
        theta = {"F": KArrow(S, N)}
        A = tc("NotP", _forall(S, lambda X: TApp(_F, X)))
        B = _exists(S, lambda X: tc("NotP", TApp(_F, X)))
        rows = [(_C("ContP", co=[_D(f"Spec@{S.value}", k1, ty=["X1"])]),
                 _C(f"Pack@{S.value}", _C("ContP", co=[k1]), ty=["X1"]))]
        return from_patterns("not-forall", theta, A, B, rows)
    return build


def _sum(a, b):
    return tc("Sum", a, b)


def _ten(a, b):
    return tc("Tensor", a, b)


def _with(a, b):
    return tc("With", a, b)


def _par(a, b):
    return tc("Par", a, b)


LAWS: dict[str, Law] = {}


def _reg(name, statement, build, arity, verifiable=True):
    LAWS[name] = Law(name, statement, verifiable, build, arity)


# positive algebra
_reg("plus-assoc", "(A ⊕ B) ⊕ C ≅ A ⊕ (B ⊕ C)", _pos3("plus-assoc", _sum(_sum(_A, _B), _C3), _sum(_A, _sum(_B, _C3)), [
    (_C("Inl", _C("Inl", u1)), _C("Inl", u1)),
    (_C("Inl", _C("Inr", u2)), _C("Inr", _C("Inl", u2))),
    (_C("Inr", u3), _C("Inr", _C("Inr", u3)))]), 3)
_reg("plus-unit", "0 ⊕ A ≅ A", _fixed("plus-unit", {"A": V}, _sum(tc("Zero"), _A), _A, [(_C("Inr", u1), u1)]), 1)
_reg("plus-comm", "A ⊕ B ≅ B ⊕ A", _fixed("plus-comm", {"A": V, "B": V}, _sum(_A, _B), _sum(_B, _A), [
    (_C("Inl", u1), _C("Inr", u1)), (_C("Inr", u2), _C("Inl", u2))]), 2)
_reg("tensor-assoc", "(A ⊗ B) ⊗ C ≅ A ⊗ (B ⊗ C)", _pos3("tensor-assoc", _ten(_ten(_A, _B), _C3), _ten(_A, _ten(_B, _C3)), [
    (_C("Pair", _C("Pair", u1, u2), u3), _C("Pair", u1, _C("Pair", u2, u3)))]), 3)
_reg("tensor-unit", "1 ⊗ A ≅ A", _fixed("tensor-unit", {"A": V}, _ten(tc("One"), _A), _A,
                                        [(_C("Pair", _C("Unit"), u1), u1)]), 1)
_reg("tensor-comm", "A ⊗ B ≅ B ⊗ A", _fixed("tensor-comm", {"A": V, "B": V}, _ten(_A, _B), _ten(_B, _A), [
    (_C("Pair", u1, u2), _C("Pair", u2, u1))]), 2)
_reg("tensor-dist", "A ⊗ (B ⊕ C) ≅ (A ⊗ B) ⊕ (A ⊗ C)", _pos3(
    "tensor-dist", _ten(_A, _sum(_B, _C3)), _sum(_ten(_A, _B), _ten(_A, _C3)), [
        (_C("Pair", u1, _C("Inl", u2)), _C("Inl", _C("Pair", u1, u2))),
        (_C("Pair", u1, _C("Inr", u3)), _C("Inr", _C("Pair", u1, u3)))]), 3)
_reg("tensor-zero", "A ⊗ 0 ≅ 0", _fixed("tensor-zero", {"A": V}, _ten(_A, tc("Zero")), tc("Zero"), []), 1)

# negative algebra
_reg("with-assoc", "(A & B) & C ≅ A & (B & C)", _neg3("with-assoc", _with(_with(_A, _B), _C3), _with(_A, _with(_B, _C3)), [
    (_D("Fst", _D("Fst", k1)), _D("Fst", k1)),
    (_D("Fst", _D("Snd", k2)), _D("Snd", _D("Fst", k2))),
    (_D("Snd", k3), _D("Snd", _D("Snd", k3)))]), 3)
_reg("with-unit", "⊤ & A ≅ A", _fixed("with-unit", {"A": N}, _with(tc("Top"), _A), _A, [(_D("Snd", k1), k1)]), 1)
_reg("with-comm", "A & B ≅ B & A", _fixed("with-comm", {"A": N, "B": N}, _with(_A, _B), _with(_B, _A), [
    (_D("Fst", k1), _D("Snd", k1)), (_D("Snd", k2), _D("Fst", k2))]), 2)
_reg("par-assoc", "(A ⅋ B) ⅋ C ≅ A ⅋ (B ⅋ C)", _neg3("par-assoc", _par(_par(_A, _B), _C3), _par(_A, _par(_B, _C3)), [
    (_D("CoPair", _D("CoPair", k1, k2), k3), _D("CoPair", k1, _D("CoPair", k2, k3)))]), 3)
_reg("par-unit", "⊥ ⅋ A ≅ A", _fixed("par-unit", {"A": N}, _par(tc("Bot"), _A), _A,
                                     [(_D("CoPair", _D("CoUnit"), k1), k1)]), 1)
_reg("par-comm", "A ⅋ B ≅ B ⅋ A", _fixed("par-comm", {"A": N, "B": N}, _par(_A, _B), _par(_B, _A), [
    (_D("CoPair", k1, k2), _D("CoPair", k2, k1))]), 2)
_reg("par-dist", "A ⅋ (B & C) ≅ (A ⅋ B) & (A ⅋ C)", _neg3(
    "par-dist", _par(_A, _with(_B, _C3)), _with(_par(_A, _B), _par(_A, _C3)), [
        (_D("CoPair", k1, _D("Fst", k2)), _D("Fst", _D("CoPair", k1, k2))),
        (_D("CoPair", k1, _D("Snd", k3)), _D("Snd", _D("CoPair", k1, k3)))]), 3)
_reg("par-top", "A ⅋ ⊤ ≅ ⊤", _fixed("par-top", {"A": N}, _par(_A, tc("Top")), tc("Top"), []), 1)

# De Morgan dualities; ∼ is NotN (v to n) and ¬ is NotP (n to v)
_reg("notn-plus", "∼(A ⊕ B) ≅ ∼A & ∼B", _fixed("notn-plus", {"A": V, "B": V}, tc("NotN", _sum(_A, _B)),
                                                _with(tc("NotN", _A), tc("NotN", _B)), [
    (_D("ThrowN", args=[_C("Inl", u1)]), _D("Fst", _D("ThrowN", args=[u1]))),
    (_D("ThrowN", args=[_C("Inr", u2)]), _D("Snd", _D("ThrowN", args=[u2])))]), 2)
_reg("notn-tensor", "∼(A ⊗ B) ≅ ∼A ⅋ ∼B", _fixed("notn-tensor", {"A": V, "B": V}, tc("NotN", _ten(_A, _B)),
                                                  _par(tc("NotN", _A), tc("NotN", _B)), [
    (_D("ThrowN", args=[_C("Pair", u1, u2)]), _D("CoPair", _D("ThrowN", args=[u1]), _D("ThrowN", args=[u2])))]), 2)
_reg("notn-zero", "∼0 ≅ ⊤", _fixed("notn-zero", {}, tc("NotN", tc("Zero")), tc("Top"), []), 0)
_reg("notn-one", "∼1 ≅ ⊥", _fixed("notn-one", {}, tc("NotN", tc("One")), tc("Bot"),
                                  [(_D("ThrowN", args=[_C("Unit")]), _D("CoUnit"))]), 0)
_reg("notn-notp", "∼(¬C) ≅ C", _fixed("notn-notp", {"C": N}, tc("NotN", tc("NotP", TVar("C"))), TVar("C"),
                                      [(_D("ThrowN", args=[_C("ContP", co=[k1])]), k1)]), 1)
_reg("notp-with", "¬(C & D) ≅ ¬C ⊕ ¬D", _fixed("notp-with", {"A": N, "B": N}, tc("NotP", _with(_A, _B)),
                                               _sum(tc("NotP", _A), tc("NotP", _B)), [
    (_C("ContP", co=[_D("Fst", k1)]), _C("Inl", _C("ContP", co=[k1]))),
    (_C("ContP", co=[_D("Snd", k2)]), _C("Inr", _C("ContP", co=[k2])))]), 2)
_reg("notp-par", "¬(C ⅋ D) ≅ ¬C ⊗ ¬D", _fixed("notp-par", {"A": N, "B": N}, tc("NotP", _par(_A, _B)),
                                              _ten(tc("NotP", _A), tc("NotP", _B)), [
    (_C("ContP", co=[_D("CoPair", k1, k2)]), _C("Pair", _C("ContP", co=[k1]), _C("ContP", co=[k2])))]), 2)
_reg("notp-top", "¬⊤ ≅ 0", _fixed("notp-top", {}, tc("NotP", tc("Top")), tc("Zero"), []), 0)
_reg("notp-bot", "¬⊥ ≅ 1", _fixed("notp-bot", {}, tc("NotP", tc("Bot")), tc("One"),
                                  [(_C("ContP", co=[_D("CoUnit")]), _C("Unit"))]), 0)
_reg("notp-notn", "¬(∼A) ≅ A", _fixed("notp-notn", {"A": V}, tc("NotP", tc("NotN", _A)), _A,
                                      [(_C("ContP", co=[_D("ThrowN", args=[u1])]), u1)]), 1)

# shifts
_reg("shift-pos-n", "ToPos_n B ≅ FromNeg_v B", _shift_pos_n, 1)
_reg("shift-neg-v", "ToNeg_v A ≅ FromPos_n A", _shift_neg_v, 1)
_reg("topos-v", "ToPos_v A ≅ A", _fixed("topos-v", {"A": V}, tc("ToPos@v", _A), _A, [(_C("Wrap@v", u1), u1)]), 1)
_reg("frompos-v", "A ≅ FromPos_v A", _fixed("frompos-v", {"A": V}, _A, tc("FromPos@v", _A),
                                            [(u1, _C("Delay@v", u1))]), 1)
_reg("toneg-n", "ToNeg_n B ≅ B", _fixed("toneg-n", {"B": N}, tc("ToNeg@n", _B), _B, [(_D("Unwrap@n", k1), k1)]), 1)
_reg("fromneg-n", "B ≅ FromNeg_n B", _fixed("fromneg-n", {"B": N}, _B, tc("FromNeg@n", _B),
                                            [(k1, _D("Force@n", k1))]), 1)
_reg("shift-id-v", "ToPos_v A ≅ FromPos_v A", _shift_id_v, 1)
_reg("shift-id-n", "ToNeg_n B ≅ FromNeg_n B", _shift_id_n, 1)

# quantifiers
_reg("forall-swap", "∀X:S.∀Y:T. C ≅ ∀Y:T.∀X:S. C", _q_swap(True), 1)
_reg("exists-swap", "∃X:S.∃Y:T. A ≅ ∃Y:T.∃X:S. A", _q_swap(False), 1)
_reg("forall-drop", "∀X:S. B ≅ B", _q_drop(True), 1)
_reg("exists-drop", "∃X:S. A ≅ A", _q_drop(False), 1)
_reg("forall-par", "(∀X:S. C) ⅋ D ≅ ∀X:S. (C ⅋ D)", _q_mult(True), 2)
_reg("exists-tensor", "(∃X:S. A) ⊗ B ≅ ∃X:S. (A ⊗ B)", _q_mult(False), 2)
_reg("not-forall", "¬(∀X:S. C) ≅ ∃X:S. ¬C", _q_not(False), 1)
_reg("not-exists", "∼(∃X:S. A) ≅ ∀X:S. ∼A", _q_not(True), 1)
_reg("with-forall", "(∀X:S. C) & D ≅ ∀X:S. (C & D)", _q_add(True), 2, verifiable=False)
_reg("plus-exists", "(∃X:S. A) ⊕ B ≅ ∃X:S. (A ⊕ B)", _q_add(False), 2, verifiable=False)

QUANTIFIER_LAWS = ("forall-swap", "exists-swap", "forall-drop", "exists-drop", "forall-par",
                   "exists-tensor", "not-forall", "not-exists", "with-forall", "plus-exists")


def _arrow_domains(k) -> list:
    out = []
    while isinstance(k, KArrow):
        out.append(k.dom)
        k = k.cod
    return out


def law(name: str, args: Optional[Sequence[TypeExpr]] = None, disc: Optional[Discipline] = None,
        sig: Optional[Signature] = None) -> IsoWitness:
    """The catalog witness for a law, parametric when args is None.

    Quantifier disciplines are read off higher-kinded arguments; `disc` picks S
    for the drop laws (default v) and for the parametric form.
    """
    if name not in LAWS:
        raise IsoError(f"unknown law {name}", rule="law")
    sig = sig or core_signature()
    entry = LAWS[name]
    S, T = disc or V, V
    if args is not None and name in QUANTIFIER_LAWS and name not in ("forall-drop", "exists-drop"):
        doms = _arrow_domains(kind_of({}, sig, args[0]))
        if not doms:
            raise IsoError(f"{name}: first argument must have an arrow kind", rule="law")
        S = doms[0]
        T = doms[1] if len(doms) > 1 else V
    w = entry.build(S=S, T=T)
    if args is None:
        return w
    params = list(w.theta)
    if len(args) != len(params):
        raise IsoError(f"{name} takes {len(params)} type arguments, got {len(args)}", rule="law")
    for p, a in zip(params, args):
        got = kind_of({}, sig, a)
        if got != w.theta[p]:
            from .syntax import kind_str
            raise IsoError(f"{name}: argument for {p} has kind {kind_str(got)}, expected {kind_str(w.theta[p])}",
                           rule="law")
    return w.instantiate(dict(zip(params, args)))


# --- declared types and their encodings ------------------------------------

def encoding_iso(sig: Signature, name: str) -> IsoWitness:
    """F X̄ ≅ ⟦F⟧ X̄ for a declared connective F."""
    d = sig.decl(name)
    if d is None:
        raise IsoError(f"{name} is not declared", rule="encoding")
    theta = dict(d.params)
    A = tc(name, *[TVar(p) for p, _ in d.params])
    if sig.is_core(name):
        return iso_refl(A, sig, theta)
    B = normalize_type(encode_type(sig, A))
    s = d.result
    core = core_signature()
    flats = []
    used = {"x", "y", "a", "b"} | set(theta)
    for k, x in enumerate(d.xtors):
        tvs = tuple(f"Q{k}_{j}" for j in range(len(x.quantified)))
        vs = tuple(f"u{k}_{j}" for j in range(len(x.term_inputs)))
        cs = tuple(f"k{k}_{j}" for j in range(len(x.coterm_inputs)))
        flats.append(Pattern(x.name, tvs, cs, vs) if d.is_data else CoPattern(x.name, tvs, vs, cs))
    del used
    if d.is_data:
        fwd = Cut(Var("x"), A, s, Case(tuple(
            (p, Cut(emit(encode_pattern(sig, p), set(p.tyvars), core), B, s, CoVar("b"))) for p in flats)))
        bwd = Cut(Var("y"), B, s, flatten_case(
            [(encode_pattern(sig, p), Cut(emit(from_flat(p), set(p.tyvars), sig), A, s, CoVar("a")))
             for p in flats], B, core))
    else:
        fwd = Cut(flatten_cocase(
            [(encode_pattern(sig, q), Cut(Var("x"), A, s, emit(from_flat(q), set(q.tyvars), sig)))
             for q in flats], B, core), B, s, CoVar("b"))
        bwd = Cut(CoCase(tuple(
            (q, Cut(Var("y"), B, s, emit(encode_pattern(sig, q), set(q.tyvars), core))) for q in flats)),
            A, s, CoVar("a"))
    return IsoWitness(theta, A, B, s, fwd, bwd, f"encoding({name})", sig)


# --- sample enumeration -----------------------------------------------------

class Samples:
    """Exhaustive small sets of closed values and covalues of closed types.

    Data types get their constructions and codata types get a free observer
    variable; dually for covalues.  Observers are named o<n> and k<n>.
    """

    def __init__(self, sig: Optional[Signature] = None, cap: int = 8, depth: int = 5):
        self.sig = sig or core_signature()
        self.cap = cap
        self.depth = depth

    def _decl(self, t):
        hc = head_connective(t)
        if hc is None:
            raise IsoError("samples need closed types with a connective at the head", rule="samples")
        d = self.sig.decl(hc[0])
        return d, hc[1]

    def values(self, t: TypeExpr, depth: Optional[int] = None) -> list:
        depth = self.depth if depth is None else depth
        d, args = self._decl(t)
        if not d.is_data:
            return [Var("o1")]
        return self._xtor_samples(d, args, depth, True)

    def covalues(self, t: TypeExpr, depth: Optional[int] = None) -> list:
        depth = self.depth if depth is None else depth
        d, args = self._decl(t)
        if d.is_data:
            return [CoVar("k1")]
        return self._xtor_samples(d, args, depth, False)

    def _xtor_samples(self, d, args, depth, data) -> list:
        if depth == 0:
            return []
        out = []
        for x in d.xtors:
            for tys in itertools.product(*[quantifier_instances(s) for _, s in x.quantified]):
                terms, coterms = xtor_components(self.sig, x.name, args, list(tys))
                tsets = [self.values(ty, depth - 1) for ty, _ in terms]
                csets = [self.covalues(ty, depth - 1) for ty, _ in coterms]
                for combo in itertools.product(*tsets, *csets):
                    ts, cs = combo[:len(terms)], combo[len(terms):]
                    ts, cs = _number_observers(ts, cs)
                    if data:
                        out.append(Con(x.name, tuple(tys), tuple(cs), tuple(ts)))
                    else:
                        out.append(Des(x.name, tuple(tys), tuple(ts), tuple(cs)))
                    if len(out) >= self.cap:
                        return out
        return out


def _number_observers(ts, cs):
    """Give each observer in a tuple of sample components a distinct number."""
    counter = {"o": 0, "k": 0}

    def ren(node):
        from .syntax import free
        fv = free(node)
        mv = {}
        mc = {}
        for x in sorted(fv.vars):
            counter["o"] += 1
            mv[x] = Var(f"o{counter['o']}")
        for a in sorted(fv.covars):
            counter["k"] += 1
            mc[a] = CoVar(f"k{counter['k']}")
        # rename through temporaries so o1 -> o2 and o2 -> o3 do not collide
        tmp_v = {x: Var(f"_t{x}") for x in mv}
        tmp_c = {a: CoVar(f"_t{a}") for a in mc}
        node = substitute(node, Subst(terms=tmp_v, coterms=tmp_c))
        return substitute(node, Subst(terms={f"_t{x}": v for x, v in mv.items()},
                                      coterms={f"_t{a}": e for a, e in mc.items()}))

    return tuple(ren(t) for t in ts), tuple(ren(c) for c in cs)


# --- observational comparison ----------------------------------------------

class Observer:
    """Behavioural descriptions of closed (co)terms, comparable across witnesses.

    A data value is described by running it against a fresh covariable and
    reading the construction that arrives; a codata value by probing it with
    every enumerated covalue.  Type arguments are erased.
    """

    def __init__(self, sig: Optional[Signature] = None, fuel: int = 2000, depth: int = 8):
        self.sig = sig or core_signature()
        self.machine = Machine(self.sig)
        self.samples = Samples(self.sig)
        self.fuel = fuel
        self.depth = depth
        self.steps = 0

    def _disc(self, t) -> Discipline:
        return base_kind({}, self.sig, t)

    def _data(self, t) -> Optional[bool]:
        hc = head_connective(t)
        if hc is None:
            return None
        d = self.sig.decl(hc[0])
        return None if d is None else d.is_data

    def _run(self, c: Cut):
        obs = self.machine.run(c, self.fuel)
        self.steps += obs.steps
        return obs

    def term(self, v, t, depth=None):
        depth = self.depth if depth is None else depth
        if depth == 0:
            return ("deep",)
        data = self._data(t)
        if isinstance(v, Var) and data is not False:
            return ("var", v.name)
        if data and isinstance(v, Con) and self.machine.is_weak(v):
            terms, coterms = xtor_components(self.sig, v.name, head_connective(t)[1], list(v.tyargs))
            return ("con", v.name,
                    tuple(self.term(a, ty, depth - 1) for a, (ty, _) in zip(v.args, terms)),
                    tuple(self.coterm(e, ty, depth - 1) for e, (ty, _) in zip(v.coargs, coterms)))
        if data:
            obs = self._run(Cut(v, t, self._disc(t), CoVar("_out")))
            f = obs.final
            if obs.status is Status.FINISHED and isinstance(f.coterm, CoVar) and f.coterm.name == "_out" \
                    and self.machine.is_value(f.term, f.disc) and not isinstance(f.term, Mu):
                return self.term(f.term, t, depth)
            return ("outcome", self.outcome(obs, depth))
        if data is None:
            return ("opaque", _erased(v))
        probes = self.samples.covalues(t)
        return ("probe", tuple(self.outcome(self._run(Cut(v, t, self._disc(t), e)), depth - 1) for e in probes))

    def coterm(self, e, t, depth=None):
        depth = self.depth if depth is None else depth
        if depth == 0:
            return ("deep",)
        data = self._data(t)
        if isinstance(e, CoVar) and data is not True:
            return ("covar", e.name)
        if data is False and isinstance(e, Des) and self.machine.is_coweak(e):
            terms, coterms = xtor_components(self.sig, e.name, head_connective(t)[1], list(e.tyargs))
            return ("des", e.name,
                    tuple(self.term(a, ty, depth - 1) for a, (ty, _) in zip(e.args, terms)),
                    tuple(self.coterm(c, ty, depth - 1) for c, (ty, _) in zip(e.coargs, coterms)))
        if data is False:
            obs = self._run(Cut(Var("_in"), t, self._disc(t), e))
            f = obs.final
            if obs.status is Status.FINISHED and isinstance(f.term, Var) and f.term.name == "_in" \
                    and self.machine.is_covalue(f.coterm, f.disc) and not isinstance(f.coterm, MuT):
                return self.coterm(f.coterm, t, depth)
            return ("outcome", self.outcome(obs, depth))
        if data is None:
            return ("opaque", _erased(e))
        probes = self.samples.values(t)
        return ("probe", tuple(self.outcome(self._run(Cut(v, t, self._disc(t), e)), depth - 1) for v in probes))

    def outcome(self, obs, depth):
        if obs.status is Status.TIMEOUT:
            return ("timeout",)
        c = obs.final
        if obs.status is Status.STUCK:
            return ("stuck", _erased(c))
        if c.type is not None and head_connective(c.type) is not None:
            if isinstance(c.coterm, CoVar) and self.machine.is_value(c.term, c.disc):
                return ("give", c.coterm.name, self.term(c.term, c.type, depth))
            if isinstance(c.term, Var) and self.machine.is_covalue(c.coterm, c.disc):
                return ("use", c.term.name, self.coterm(c.coterm, c.type, depth))
        return ("final", tuple(sorted(obs.needed)), _erased(c))


def _erased(node):
    return canonical(map_types(node, lambda t: TCon("_")))


@dataclass
class IsoLine:
    law: str
    instance: str
    direction: str
    sample: str
    ok: bool
    steps: int
    detail: str = ""

    def __str__(self) -> str:
        flag = "PASS" if self.ok else "FAIL"
        tail = f"  {self.detail}" if self.detail and not self.ok else ""
        return f"{flag} {self.law} [{self.instance}] {self.direction} {self.sample} steps={self.steps}{tail}"


@dataclass
class IsoReport:
    lines: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)

    @property
    def failures(self) -> list:
        return [line for line in self.lines if not line.ok]

    def extend(self, other: "IsoReport") -> None:
        self.lines.extend(other.lines)

    def __str__(self) -> str:
        return "\n".join(str(line) for line in self.lines)


def round_trip(w: IsoWitness, v, forward: bool = True):
    """μa.⟨v ‖ A ‖ μ̃x.⟨μb.fwd ‖ B ‖ μ̃y.bwd⟩⟩, or the B-side trip when forward is False."""
    s = w.disc
    if forward:
        return Mu("a", Cut(v, w.A, s, MuT("x", Cut(Mu("b", w.fwd), w.B, s, MuT("y", w.bwd)))))
    return Mu("b", Cut(v, w.B, s, MuT("y", Cut(Mu("a", w.bwd), w.A, s, MuT("x", w.fwd)))))


def check_iso_observational(w: IsoWitness, samples: Optional[list] = None, fuel: int = 2000,
                            samples_b: Optional[list] = None, instance: str = "",
                            both: bool = True) -> IsoReport:
    """Round-trip every sample through the witness and compare behaviours with the sample itself."""
    from .surface import print_term
    if w.theta:
        raise IsoError(f"{w.name}: instantiate the parameters {sorted(w.theta)} first", rule="iso-check")
    ob = Observer(w.sig, fuel)
    gen = Samples(w.sig)
    report = IsoReport()
    dirs = [("A->B->A", True, w.A, samples if samples is not None else gen.values(w.A))]
    if both:
        dirs.append(("B->A->B", False, w.B, samples_b if samples_b is not None else gen.values(w.B)))
    for label, forward, ty, vals in dirs:
        for v in vals:
            ob.steps = 0
            try:
                want = ob.term(v, ty)
                got = ob.term(round_trip(w, v, forward), ty)
                ok, detail = want == got, ("" if want == got else f"want {want} got {got}")
            except Exception as err:   # a broken witness must show up as a failing line
                ok, detail = False, f"error: {err}"
            report.lines.append(IsoLine(w.name, instance, label, print_term(v), ok, ob.steps, detail))
    return report


# --- the suite --------------------------------------------------------------

POS_ARGS = [tc("One"), _sum(tc("One"), tc("One"))]
NEG_ARGS = [tc("Bot"), _with(tc("Bot"), tc("Bot"))]


def _instances_for(theta: dict) -> list[dict]:
    """(1, 1⊕1, 1)-style argument tuples for first-order parameters."""
    names = list(theta)
    if not names:
        return [{}]
    out = []
    for shift in (0, 1):
        inst = {}
        for j, n in enumerate(names):
            pool = POS_ARGS if theta[n] == V else NEG_ARGS
            inst[n] = pool[(j + shift) % 2]
        out.append(inst)
    return out


def _family(k) -> list[TypeExpr]:
    """Closed type functions used for higher-kinded law parameters."""
    doms = _arrow_domains(k)
    cod = k
    while isinstance(cod, KArrow):
        cod = cod.cod
    shift = "ToPos" if cod == V else "ToNeg"
    comb = "Tensor" if cod == V else "Par"
    unit = tc("One") if cod == V else tc("Bot")
    names = [f"Z{i}" for i in range(len(doms))]
    bodies = [tc(f"{shift}@{doms[0].value}", TVar(names[0])), unit]
    if len(doms) == 2:
        bodies = [tc(comb, tc(f"{shift}@{doms[0].value}", TVar(names[0])),
                     tc(f"{shift}@{doms[1].value}", TVar(names[1])))]
    out = []
    for b in bodies:
        for n, s in reversed(list(zip(names, doms))):
            b = TLam(n, s, b)
        out.append(b)
    return out


def law_instances(name: str) -> list[tuple[str, IsoWitness]]:
    """The instantiated witnesses the suite checks for one law."""
    from .surface import print_type
    out = []
    if name in QUANTIFIER_LAWS:
        pairs = [(s, t) for s in DISCIPLINES for t in (V, NEED)]
        if name not in ("forall-swap", "exists-swap"):
            pairs = [(s, V) for s in DISCIPLINES]
        for S, T in pairs:
            w = LAWS[name].build(S=S, T=T)
            first = [n for n, k in w.theta.items() if isinstance(k, KArrow)]
            fams = {n: _family(w.theta[n]) for n in first}
            rest = {n: k for n, k in w.theta.items() if not isinstance(k, KArrow)}
            for choice in itertools.product(*fams.values()):
                for inst in _instances_for(rest):
                    args = {**dict(zip(fams, choice)), **inst}
                    label = f"S={S.value},T={T.value}," + ",".join(f"{n}={print_type(a)}" for n, a in args.items())
                    out.append((label, w.instantiate(args)))
        return out
    w = LAWS[name].build()
    for inst in _instances_for(w.theta):
        label = ",".join(f"{n}={print_type(a)}" for n, a in inst.items()) or "-"
        out.append((label, w.instantiate(inst)))
    return out


def run_suite(names: Optional[Sequence[str]] = None, fuel: int = 2000,
              include_unverifiable: bool = False) -> IsoReport:
    report = IsoReport()
    for name in names or list(LAWS):
        if not LAWS[name].verifiable and not include_unverifiable and names is None:
            continue
        for label, w in law_instances(name):
            report.extend(check_iso_observational(w, fuel=fuel, instance=label))
    return report


def check_encoding(sig: Signature, name: str, fuel: int = 2000) -> IsoReport:
    """Observational check of the encoding isomorphism of one declared connective."""
    from .surface import print_type
    w = encoding_iso(sig, name)
    report = IsoReport()
    first = {n: k for n, k in w.theta.items() if not isinstance(k, KArrow)}
    higher = {n: _family(k)[0] for n, k in w.theta.items() if isinstance(k, KArrow)}
    for inst in _instances_for(first):
        args = {**inst, **higher}
        label = ",".join(f"{n}={print_type(t)}" for n, t in args.items())
        report.extend(check_iso_observational(w.instantiate(args) if args else w, fuel=fuel, instance=label))
    return report
