"""Kinds, declarations and type-level normalization."""
from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Optional

from .errors import KindError
from .syntax import (
    CONEED, N, NEED, V, Declaration, Discipline, KArrow, Kind, TApp, TCon, TLam, TMeta,
    TVar, TypeExpr, Xtor, free_tyvars, fresh, kind_str, spine, subst_type,
)

DISCIPLINES = (V, N, NEED, CONEED)


def arrow(*kinds: Kind) -> Kind:
    k = kinds[-1]
    for d in reversed(kinds[:-1]):
        k = KArrow(d, k)
    return k


def is_base(k: Kind) -> bool:
    return isinstance(k, Discipline)


class Signature:
    """Connective table: name -> checked Declaration, plus an xtor index."""

    def __init__(self, decls=(), core_names=frozenset()):
        self._decls: dict[str, Declaration] = {}
        self._xtors: dict[str, tuple[Declaration, int]] = {}
        self.core_names = frozenset(core_names)
        for d in decls:
            self._add(d)

    def _add(self, d: Declaration) -> None:
        self._decls[d.name] = d
        for i, x in enumerate(d.xtors):
            self._xtors[x.name] = (d, i)

    def extend(self, d: Declaration) -> "Signature":
        s = Signature(core_names=self.core_names)
        s._decls = dict(self._decls)
        s._xtors = dict(self._xtors)
        s._add(d)
        return s

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def decl(self, name: str) -> Optional[Declaration]:
        return self._decls.get(name)

    def xtor(self, name: str) -> Optional[tuple[Declaration, int]]:
        return self._xtors.get(name)

    def has_xtor(self, name: str) -> bool:
        return name in self._xtors

    def is_core(self, name: str) -> bool:
        return name in self.core_names

    def declared(self) -> list[Declaration]:
        return [d for n, d in self._decls.items() if n not in self.core_names]

    def decls(self) -> list[Declaration]:
        return list(self._decls.values())

    def connective_kind(self, name: str) -> Kind:
        d = self._decls[name]
        return arrow(*[k for _, k in d.params], d.result)


def _data(name, params, result, xtors):
    return Declaration("data", name, tuple(params), result, tuple(xtors))


def _codata(name, params, result, xtors):
    return Declaration("codata", name, tuple(params), result, tuple(xtors))


def _x(name, quant=(), terms=(), coterms=()):
    return Xtor(name, tuple(quant), tuple(terms), tuple(coterms))


def core_declarations() -> list[Declaration]:
    X, Y = TVar("X"), TVar("Y")
    decls = [
        _data("Sum", [("X", V), ("Y", V)], V, [_x("Inl", terms=[(X, V)]), _x("Inr", terms=[(Y, V)])]),
        _data("Tensor", [("X", V), ("Y", V)], V, [_x("Pair", terms=[(X, V), (Y, V)])]),
        _data("Zero", [], V, []),
        _data("One", [], V, [_x("Unit")]),
        _data("NotP", [("X", N)], V, [_x("ContP", coterms=[(X, N)])]),
        _codata("With", [("X", N), ("Y", N)], N, [_x("Fst", coterms=[(X, N)]), _x("Snd", coterms=[(Y, N)])]),
        _codata("Par", [("X", N), ("Y", N)], N, [_x("CoPair", coterms=[(X, N), (Y, N)])]),
        _codata("Top", [], N, []),
        _codata("Bot", [], N, [_x("CoUnit")]),
        _codata("NotN", [("X", V)], N, [_x("ThrowN", terms=[(X, V)])]),
    ]
    for s in DISCIPLINES:
        XY = TApp(X, Y)
        decls += [
            _data(f"Exists@{s}", [("X", KArrow(s, V))], V,
                  [_x(f"Pack@{s}", quant=[("Y", s)], terms=[(XY, V)])]),
            _codata(f"Forall@{s}", [("X", KArrow(s, N))], N,
                    [_x(f"Spec@{s}", quant=[("Y", s)], coterms=[(XY, N)])]),
            _data(f"ToPos@{s}", [("X", s)], V, [_x(f"Wrap@{s}", terms=[(X, s)])]),
            _codata(f"ToNeg@{s}", [("X", s)], N, [_x(f"Unwrap@{s}", coterms=[(X, s)])]),
            _data(f"FromPos@{s}", [("X", V)], s, [_x(f"Delay@{s}", terms=[(X, V)])]),
            _codata(f"FromNeg@{s}", [("X", N)], s, [_x(f"Force@{s}", coterms=[(X, N)])]),
        ]
    return decls


@lru_cache(maxsize=1)
def core_signature() -> Signature:
    ds = core_declarations()
    return Signature(ds, core_names={d.name for d in ds})


# --- kinding ---------------------------------------------------------------

def kind_of(theta: Mapping[str, Kind], sig: Signature, t: TypeExpr) -> Kind:
    if isinstance(t, TVar):
        if t.name not in theta:
            raise KindError(f"unbound type variable {t.name}", rule="TyVar")
        return theta[t.name]
    if isinstance(t, TCon):
        if t.name not in sig:
            raise KindError(f"unknown connective {t.name}", rule="TyCon")
        return sig.connective_kind(t.name)
    if isinstance(t, TMeta):
        return t.kind
    if isinstance(t, TLam):
        body = kind_of({**theta, t.var: t.kind}, sig, t.body)
        return KArrow(t.kind, body)
    if isinstance(t, TApp):
        fk = kind_of(theta, sig, t.fun)
        if not isinstance(fk, KArrow):
            raise KindError(f"type of kind {kind_str(fk)} applied to an argument", rule="TyApp")
        ak = kind_of(theta, sig, t.arg)
        if ak != fk.dom:
            raise KindError(f"argument has kind {kind_str(ak)}, expected {kind_str(fk.dom)}",
                            rule="TyApp")
        return fk.cod
    raise KindError(f"not a type: {t!r}", rule="TyVar")


def base_kind(theta, sig, t: TypeExpr) -> Discipline:
    k = kind_of(theta, sig, t)
    if not isinstance(k, Discipline):
        raise KindError(f"type has arrow kind {kind_str(k)}; a discipline was expected",
                        rule="Sequent")
    return k


# --- normalization ---------------------------------------------------------

def _beta(t: TypeExpr) -> TypeExpr:
    if isinstance(t, TApp):
        f = _beta(t.fun)
        a = _beta(t.arg)
        if isinstance(f, TLam):
            return _beta(subst_type(f.body, {f.var: a}))
        return TApp(f, a)
    if isinstance(t, TLam):
        return TLam(t.var, t.kind, _beta(t.body))
    return t


def _eta(t: TypeExpr) -> TypeExpr:
    if isinstance(t, TApp):
        return TApp(_eta(t.fun), _eta(t.arg))
    if isinstance(t, TLam):
        body = _eta(t.body)
        if (isinstance(body, TApp) and body.arg == TVar(t.var)
                and t.var not in free_tyvars(body.fun)):
            return body.fun
        return TLam(t.var, t.kind, body)
    return t


def normalize_type(t: TypeExpr) -> TypeExpr:
    return _eta(_beta(t))


def types_equal(a: TypeExpr, b: TypeExpr, untyped: bool = False) -> bool:
    if untyped:
        return True
    from .syntax import alpha_eq
    return alpha_eq(normalize_type(a), normalize_type(b))


def instantiate(t: TypeExpr, mapping: Mapping[str, TypeExpr]) -> TypeExpr:
    return normalize_type(subst_type(t, mapping))


def head_connective(t: TypeExpr):
    """(name, args) for an applied connective in normal form, else None."""
    h, args = spine(normalize_type(t))
    if isinstance(h, TCon):
        return h.name, args
    return None


# --- declarations and sequents ---------------------------------------------

def _mentions(t: TypeExpr, name: str) -> bool:
    if isinstance(t, TCon):
        return t.name == name
    if isinstance(t, TApp):
        return _mentions(t.fun, name) or _mentions(t.arg, name)
    if isinstance(t, TLam):
        return _mentions(t.body, name)
    return False


def check_decl(sig: Signature, d: Declaration) -> Signature:
    """Kind-check a declaration, fill in component disciplines and extend the table."""
    if d.name in sig:
        raise KindError(f"connective {d.name} already declared", rule="Decl")
    names = [p for p, _ in d.params]
    if len(set(names)) != len(names):
        raise KindError(f"{d.name}: duplicate parameter names", rule="Decl")
    seen = set()
    xtors = []
    for x in d.xtors:
        if x.name in seen or sig.has_xtor(x.name):
            raise KindError(f"duplicate xtor name {x.name}", rule="Decl")
        seen.add(x.name)
        theta = dict(d.params)
        for y, s in x.quantified:
            if y in theta:
                raise KindError(f"{x.name}: quantified {y} shadows a name", rule="Decl")
            theta[y] = s
        comps = []
        for group in (x.term_inputs, x.coterm_inputs):
            out = []
            for t, disc in group:
                if _mentions(t, d.name):
                    raise KindError(f"{d.name} is recursive (in {x.name}); declarations must be non-recursive",
                                    rule="Decl")
                k = kind_of(theta, sig, t)
                if not isinstance(k, Discipline):
                    raise KindError(f"{x.name}: component has arrow kind {kind_str(k)}", rule="Decl")
                if disc is not None and disc != k:
                    raise KindError(f"{x.name}: component declared {disc} but has kind {k}", rule="Decl")
                out.append((t, k))
            comps.append(tuple(out))
        xtors.append(Xtor(x.name, tuple(x.quantified), comps[0], comps[1]))
    return sig.extend(Declaration(d.polarity, d.name, tuple(d.params), d.result, tuple(xtors)))


def check_sequent(theta, sig, gamma: Mapping[str, TypeExpr], delta: Mapping[str, TypeExpr]) -> None:
    for name, t in list(gamma.items()) + list(delta.items()):
        try:
            base_kind(theta, sig, t)
        except KindError as err:
            raise KindError(f"{name}: {err.message}", rule="Sequent") from None


def xtor_components(sig: Signature, xname: str, params_args, quant_args):
    """Instantiate an xtor's components: (term inputs, coterm inputs) as (type, disc) lists."""
    d, i = sig.xtor(xname)
    x = d.xtors[i]
    rho = {p: a for (p, _), a in zip(d.params, params_args)}
    rho.update({y: a for (y, _), a in zip(x.quantified, quant_args)})
    terms = [(instantiate(t, rho), s) for t, s in x.term_inputs]
    coterms = [(instantiate(t, rho), s) for t, s in x.coterm_inputs]
    return terms, coterms


def fresh_tyvar(hint: str, avoid) -> str:
    return fresh(hint, avoid)
