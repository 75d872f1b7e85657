"""Abstract syntax for System CD, with binding, alpha-equivalence and substitution.

Terms produce, coterms consume, and a command cuts one against the other at a
type and a discipline.  Everything here is an immutable dataclass.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, NamedTuple, Optional, Union


class Discipline(str, Enum):
    V = "v"
    N = "n"
    NEED = "need"
    CONEED = "coneed"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, token: str) -> "Discipline":
        return cls(token)


V, N, NEED, CONEED = Discipline.V, Discipline.N, Discipline.NEED, Discipline.CONEED


@dataclass(frozen=True)
class KArrow:
    dom: "Kind"
    cod: "Kind"


Kind = Union[Discipline, KArrow]


def kind_str(k: Kind) -> str:
    if isinstance(k, Discipline):
        return k.value
    dom = kind_str(k.dom)
    if isinstance(k.dom, KArrow):
        dom = f"({dom})"
    return f"{dom} -> {kind_str(k.cod)}"


# --- types -----------------------------------------------------------------

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TCon:
    """A connective name, core or declared."""
    name: str


@dataclass(frozen=True)
class TLam:
    var: str
    kind: Kind
    body: "TypeExpr"


@dataclass(frozen=True)
class TApp:
    fun: "TypeExpr"
    arg: "TypeExpr"


@dataclass(frozen=True)
class TMeta:
    """Unification variable; only ever seen inside the elaborator."""
    ident: int
    kind: Kind


TypeExpr = Union[TVar, TCon, TLam, TApp, TMeta]


def tapp(head: TypeExpr, *args: TypeExpr) -> TypeExpr:
    for a in args:
        head = TApp(head, a)
    return head


def spine(t: TypeExpr) -> tuple[TypeExpr, list[TypeExpr]]:
    args = []
    while isinstance(t, TApp):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# --- programs --------------------------------------------------------------

Span = Optional[tuple[int, int]]


@dataclass(frozen=True)
class Cut:
    term: "Term"
    type: Optional[TypeExpr]  # None is the wildcard `_`
    disc: Discipline
    coterm: "CoTerm"
    span: Span = field(default=None, compare=False, repr=False)


Command = Cut


@dataclass(frozen=True)
class Var:
    name: str
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Mu:
    covar: str
    body: Cut
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Con:
    name: str
    tyargs: tuple = ()
    coargs: tuple = ()
    args: tuple = ()
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CoPattern:
    xtor: str
    tyvars: tuple = ()
    vars: tuple = ()
    covars: tuple = ()

    def binders(self):
        return self.tyvars, self.vars, self.covars


@dataclass(frozen=True)
class Pattern:
    xtor: str
    tyvars: tuple = ()
    covars: tuple = ()
    vars: tuple = ()

    def binders(self):
        return self.tyvars, self.vars, self.covars


@dataclass(frozen=True)
class CoCase:
    branches: tuple = ()  # of (CoPattern, Cut)
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CoVar:
    name: str
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MuT:
    var: str
    body: Cut
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Des:
    name: str
    tyargs: tuple = ()
    args: tuple = ()
    coargs: tuple = ()
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Case:
    branches: tuple = ()  # of (Pattern, Cut)
    span: Span = field(default=None, compare=False, repr=False)


Term = Union[Var, Mu, Con, CoCase]
CoTerm = Union[CoVar, MuT, Des, Case]
Node = Union[Cut, Var, Mu, Con, CoCase, CoVar, MuT, Des, Case, TVar, TCon, TLam, TApp, TMeta]

TERM_TYPES = (Var, Mu, Con, CoCase)
COTERM_TYPES = (CoVar, MuT, Des, Case)
TYPE_TYPES = (TVar, TCon, TLam, TApp, TMeta)


# --- declarations ----------------------------------------------------------

@dataclass(frozen=True)
class Xtor:
    name: str
    quantified: tuple = ()      # of (name, Discipline)
    term_inputs: tuple = ()     # of (TypeExpr, Discipline | None)
    coterm_inputs: tuple = ()   # of (TypeExpr, Discipline | None)


@dataclass(frozen=True)
class Declaration:
    polarity: str               # "data" or "codata"
    name: str
    params: tuple               # of (name, Kind)
    result: Discipline
    xtors: tuple                # of Xtor

    @property
    def is_data(self) -> bool:
        return self.polarity == "data"


# --- fresh names -----------------------------------------------------------

def _env_seed() -> int:
    try:
        return int(os.environ.get("SEQCORE_SEED", "0"))
    except ValueError:
        return 0


DEFAULT_SEED = _env_seed()


def fresh(hint: str, avoid: Iterable[str], seed: Optional[int] = None) -> str:
    """Return `hint` if unused, otherwise hint's stem with the first free index."""
    avoid = avoid if isinstance(avoid, (set, frozenset, dict)) else set(avoid)
    if hint not in avoid:
        return hint
    stem = hint.rstrip("0123456789") or hint
    i = DEFAULT_SEED if seed is None else seed
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


# --- free names ------------------------------------------------------------

class FreeNames(NamedTuple):
    vars: frozenset
    covars: frozenset
    tyvars: frozenset


class _Collector:
    def __init__(self):
        self.vs: set = set()
        self.cvs: set = set()
        self.tvs: set = set()

    def ty(self, t, bound):
        if isinstance(t, TVar):
            if t.name not in bound:
                self.tvs.add(t.name)
        elif isinstance(t, TLam):
            self.ty(t.body, bound | {t.var})
        elif isinstance(t, TApp):
            self.ty(t.fun, bound)
            self.ty(t.arg, bound)

    def cmd(self, c, bv, bc, bt):
        self.term(c.term, bv, bc, bt)
        if c.type is not None:
            self.ty(c.type, bt)
        self.coterm(c.coterm, bv, bc, bt)

    def term(self, v, bv, bc, bt):
        if isinstance(v, Var):
            if v.name not in bv:
                self.vs.add(v.name)
        elif isinstance(v, Mu):
            self.cmd(v.body, bv, bc | {v.covar}, bt)
        elif isinstance(v, Con):
            for t in v.tyargs:
                self.ty(t, bt)
            for e in v.coargs:
                self.coterm(e, bv, bc, bt)
            for a in v.args:
                self.term(a, bv, bc, bt)
        elif isinstance(v, CoCase):
            for q, c in v.branches:
                self.cmd(c, bv | set(q.vars), bc | set(q.covars), bt | set(q.tyvars))
        else:
            raise TypeError(f"not a term: {v!r}")

    def coterm(self, e, bv, bc, bt):
        if isinstance(e, CoVar):
            if e.name not in bc:
                self.cvs.add(e.name)
        elif isinstance(e, MuT):
            self.cmd(e.body, bv | {e.var}, bc, bt)
        elif isinstance(e, Des):
            for t in e.tyargs:
                self.ty(t, bt)
            for a in e.args:
                self.term(a, bv, bc, bt)
            for x in e.coargs:
                self.coterm(x, bv, bc, bt)
        elif isinstance(e, Case):
            for p, c in e.branches:
                self.cmd(c, bv | set(p.vars), bc | set(p.covars), bt | set(p.tyvars))
        else:
            raise TypeError(f"not a coterm: {e!r}")


def free(node) -> FreeNames:
    col = _Collector()
    empty: frozenset = frozenset()
    if isinstance(node, Cut):
        col.cmd(node, empty, empty, empty)
    elif isinstance(node, TERM_TYPES):
        col.term(node, empty, empty, empty)
    elif isinstance(node, COTERM_TYPES):
        col.coterm(node, empty, empty, empty)
    else:
        col.ty(node, empty)
    return FreeNames(frozenset(col.vs), frozenset(col.cvs), frozenset(col.tvs))


def free_tyvars(t: TypeExpr) -> frozenset:
    return free(t).tyvars


def all_names(node) -> set:
    """Every identifier occurring anywhere, bound or free (for freshening)."""
    out: set = set()

    def ty(t):
        if isinstance(t, TVar):
            out.add(t.name)
        elif isinstance(t, TLam):
            out.add(t.var)
            ty(t.body)
        elif isinstance(t, TApp):
            ty(t.fun)
            ty(t.arg)

    def go(n):
        if isinstance(n, Cut):
            go(n.term)
            if n.type is not None:
                ty(n.type)
            go(n.coterm)
        elif isinstance(n, (Var, CoVar)):
            out.add(n.name)
        elif isinstance(n, Mu):
            out.add(n.covar)
            go(n.body)
        elif isinstance(n, MuT):
            out.add(n.var)
            go(n.body)
        elif isinstance(n, (Con, Des)):
            for t in n.tyargs:
                ty(t)
            for a in n.args:
                go(a)
            for a in n.coargs:
                go(a)
        elif isinstance(n, (Case, CoCase)):
            for p, c in n.branches:
                out.update(p.tyvars, p.vars, p.covars)
                go(c)
        else:
            ty(n)

    go(node)
    return out


# --- substitution ----------------------------------------------------------

@dataclass(frozen=True)
class Subst:
    """Simultaneous substitution of types, terms and coterms."""
    types: Mapping[str, TypeExpr] = field(default_factory=dict)
    terms: Mapping[str, Term] = field(default_factory=dict)
    coterms: Mapping[str, CoTerm] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not (self.types or self.terms or self.coterms)

    def compose(self, other: "Subst") -> "Subst":
        """The substitution `other ∘ self`: apply self first, then other."""
        types = {k: subst_type(t, other.types) for k, t in self.types.items()}
        terms = {k: substitute(v, other) for k, v in self.terms.items()}
        coterms = {k: substitute(e, other) for k, e in self.coterms.items()}
        for k, t in other.types.items():
            types.setdefault(k, t)
        for k, v in other.terms.items():
            terms.setdefault(k, v)
        for k, e in other.coterms.items():
            coterms.setdefault(k, e)
        return Subst(types, terms, coterms)


class _Subster:
    def __init__(self, rho: Subst, seed: Optional[int]):
        self.seed = seed
        fv_v, fv_c, fv_t = set(), set(), set()
        for t in rho.types.values():
            fv_t |= free(t).tyvars
        for x in list(rho.terms.values()) + list(rho.coterms.values()):
            f = free(x)
            fv_v |= f.vars
            fv_c |= f.covars
            fv_t |= f.tyvars
        self.fv_v, self.fv_c, self.fv_t = fv_v, fv_c, fv_t

    # each binder: drop from the map, rename if it would capture
    def _bind(self, names, mapping, range_fv, node_names, make):
        mapping = dict(mapping)
        out = []
        for n in names:
            mapping.pop(n, None)
        for n in names:
            if n in range_fv:
                avoid = range_fv | node_names() | set(mapping) | set(out)
                n2 = fresh(n, avoid, self.seed)
                mapping[n] = make(n2)
                out.append(n2)
            else:
                out.append(n)
        return tuple(out), mapping

    def ty(self, t, ts):
        if not ts:
            return t
        if isinstance(t, TVar):
            return ts.get(t.name, t)
        if isinstance(t, TApp):
            return TApp(self.ty(t.fun, ts), self.ty(t.arg, ts))
        if isinstance(t, TLam):
            (v,), ts2 = self._bind((t.var,), ts, self.fv_t, lambda: all_names(t), TVar)
            return TLam(v, t.kind, self.ty(t.body, ts2))
        return t

    def cmd(self, c, vs, cs, ts):
        if not (vs or cs or ts):
            return c
        return Cut(self.term(c.term, vs, cs, ts),
                   None if c.type is None else self.ty(c.type, ts),
                   c.disc, self.coterm(c.coterm, vs, cs, ts), c.span)

    def term(self, v, vs, cs, ts):
        if not (vs or cs or ts):
            return v
        if isinstance(v, Var):
            return vs.get(v.name, v)
        if isinstance(v, Mu):
            (a,), cs2 = self._bind((v.covar,), cs, self.fv_c, lambda: all_names(v), CoVar)
            return Mu(a, self.cmd(v.body, vs, cs2, ts), v.span)
        if isinstance(v, Con):
            return Con(v.name, tuple(self.ty(t, ts) for t in v.tyargs),
                       tuple(self.coterm(e, vs, cs, ts) for e in v.coargs),
                       tuple(self.term(a, vs, cs, ts) for a in v.args), v.span)
        if isinstance(v, CoCase):
            return CoCase(tuple(self.branch(q, c, vs, cs, ts) for q, c in v.branches), v.span)
        raise TypeError(f"not a term: {v!r}")

    def coterm(self, e, vs, cs, ts):
        if not (vs or cs or ts):
            return e
        if isinstance(e, CoVar):
            return cs.get(e.name, e)
        if isinstance(e, MuT):
            (x,), vs2 = self._bind((e.var,), vs, self.fv_v, lambda: all_names(e), Var)
            return MuT(x, self.cmd(e.body, vs2, cs, ts), e.span)
        if isinstance(e, Des):
            return Des(e.name, tuple(self.ty(t, ts) for t in e.tyargs),
                       tuple(self.term(a, vs, cs, ts) for a in e.args),
                       tuple(self.coterm(x, vs, cs, ts) for x in e.coargs), e.span)
        if isinstance(e, Case):
            return Case(tuple(self.branch(p, c, vs, cs, ts) for p, c in e.branches), e.span)
        raise TypeError(f"not a coterm: {e!r}")

    def branch(self, pat, c, vs, cs, ts):
        names = lambda: all_names(c) | set(pat.tyvars) | set(pat.vars) | set(pat.covars)
        tvs, ts2 = self._bind(pat.tyvars, ts, self.fv_t, names, TVar)
        xs, vs2 = self._bind(pat.vars, vs, self.fv_v, names, Var)
        als, cs2 = self._bind(pat.covars, cs, self.fv_c, names, CoVar)
        if isinstance(pat, Pattern):
            pat2 = Pattern(pat.xtor, tvs, als, xs)
        else:
            pat2 = CoPattern(pat.xtor, tvs, xs, als)
        return pat2, self.cmd(c, vs2, cs2, ts2)


def substitute(node, rho: Subst, seed: Optional[int] = None):
    """Capture-avoiding simultaneous substitution on any syntax node."""
    if rho.is_empty():
        return node
    s = _Subster(rho, seed)
    ts, vs, cs = dict(rho.types), dict(rho.terms), dict(rho.coterms)
    if isinstance(node, Cut):
        return s.cmd(node, vs, cs, ts)
    if isinstance(node, TERM_TYPES):
        return s.term(node, vs, cs, ts)
    if isinstance(node, COTERM_TYPES):
        return s.coterm(node, vs, cs, ts)
    return s.ty(node, ts)


def subst_type(t: TypeExpr, mapping: Mapping[str, TypeExpr]) -> TypeExpr:
    if not mapping:
        return t
    return substitute(t, Subst(types=dict(mapping)))


def rename_var(c, old: str, new: str):
    return substitute(c, Subst(terms={old: Var(new)}))


def rename_covar(c, old: str, new: str):
    return substitute(c, Subst(coterms={old: CoVar(new)}))


# --- alpha-equivalence -----------------------------------------------------

class _Canon:
    def __init__(self):
        self.n = 0

    def name(self):
        self.n += 1
        return f"%{self.n}"

    def ty(self, t, env):
        if isinstance(t, TVar):
            return TVar(env.get(t.name, t.name))
        if isinstance(t, TLam):
            k = self.name()
            return TLam(k, t.kind, self.ty(t.body, {**env, t.var: k}))
        if isinstance(t, TApp):
            return TApp(self.ty(t.fun, env), self.ty(t.arg, env))
        return t

    def cmd(self, c, vs, cs, ts):
        return (self.term(c.term, vs, cs, ts),
                None if c.type is None else self.ty(c.type, ts),
                c.disc, self.coterm(c.coterm, vs, cs, ts))

    def term(self, v, vs, cs, ts):
        if isinstance(v, Var):
            return ("var", vs.get(v.name, v.name))
        if isinstance(v, Mu):
            k = self.name()
            return ("mu", self.cmd(v.body, vs, {**cs, v.covar: k}, ts))
        if isinstance(v, Con):
            return ("con", v.name, tuple(self.ty(t, ts) for t in v.tyargs),
                    tuple(self.coterm(e, vs, cs, ts) for e in v.coargs),
                    tuple(self.term(a, vs, cs, ts) for a in v.args))
        return ("cocase", tuple(self.branch(q, c, vs, cs, ts) for q, c in v.branches))

    def coterm(self, e, vs, cs, ts):
        if isinstance(e, CoVar):
            return ("covar", cs.get(e.name, e.name))
        if isinstance(e, MuT):
            k = self.name()
            return ("mut", self.cmd(e.body, {**vs, e.var: k}, cs, ts))
        if isinstance(e, Des):
            return ("des", e.name, tuple(self.ty(t, ts) for t in e.tyargs),
                    tuple(self.term(a, vs, cs, ts) for a in e.args),
                    tuple(self.coterm(x, vs, cs, ts) for x in e.coargs))
        return ("case", tuple(self.branch(p, c, vs, cs, ts) for p, c in e.branches))

    def branch(self, pat, c, vs, cs, ts):
        ts = {**ts, **{t: self.name() for t in pat.tyvars}}
        vs = {**vs, **{x: self.name() for x in pat.vars}}
        cs = {**cs, **{a: self.name() for a in pat.covars}}
        return (pat.xtor, len(pat.tyvars), len(pat.vars), len(pat.covars),
                self.cmd(c, vs, cs, ts))


def canonical(node):
    """A hashable key that is equal exactly for alpha-equivalent nodes."""
    k = _Canon()
    if isinstance(node, Cut):
        return ("cmd", k.cmd(node, {}, {}, {}))
    if isinstance(node, TERM_TYPES):
        return k.term(node, {}, {}, {})
    if isinstance(node, COTERM_TYPES):
        return k.coterm(node, {}, {}, {})
    return ("type", k.ty(node, {}))


def alpha_eq(a, b) -> bool:
    return canonical(a) == canonical(b)


# --- small helpers ---------------------------------------------------------

def is_term(x) -> bool:
    return isinstance(x, TERM_TYPES)


def is_coterm(x) -> bool:
    return isinstance(x, COTERM_TYPES)


def has_wildcards(node) -> bool:
    found = False

    def go(n):
        nonlocal found
        if found:
            return
        if isinstance(n, Cut):
            if n.type is None:
                found = True
                return
            go(n.term)
            go(n.coterm)
        elif isinstance(n, (Mu, MuT)):
            go(n.body)
        elif isinstance(n, (Con, Des)):
            for a in n.args:
                go(a)
            for a in n.coargs:
                go(a)
        elif isinstance(n, (Case, CoCase)):
            for _, c in n.branches:
                go(c)

    go(node)
    return found


def map_types(node, f):
    """Apply `f` to every type annotation and type argument (not under binders)."""
    def cmd(c):
        return Cut(term(c.term), None if c.type is None else f(c.type), c.disc, coterm(c.coterm), c.span)

    def term(v):
        if isinstance(v, Mu):
            return Mu(v.covar, cmd(v.body), v.span)
        if isinstance(v, Con):
            return Con(v.name, tuple(f(t) for t in v.tyargs), tuple(coterm(e) for e in v.coargs),
                       tuple(term(a) for a in v.args), v.span)
        if isinstance(v, CoCase):
            return CoCase(tuple((q, cmd(c)) for q, c in v.branches), v.span)
        return v

    def coterm(e):
        if isinstance(e, MuT):
            return MuT(e.var, cmd(e.body), e.span)
        if isinstance(e, Des):
            return Des(e.name, tuple(f(t) for t in e.tyargs), tuple(term(a) for a in e.args),
                       tuple(coterm(x) for x in e.coargs), e.span)
        if isinstance(e, Case):
            return Case(tuple((p, cmd(c)) for p, c in e.branches), e.span)
        return e

    if isinstance(node, Cut):
        return cmd(node)
    if isinstance(node, TERM_TYPES):
        return term(node)
    return coterm(node)


def size(node) -> int:
    if isinstance(node, Cut):
        return 1 + size(node.term) + size(node.coterm)
    if isinstance(node, (Mu, MuT)):
        return 1 + size(node.body)
    if isinstance(node, (Con, Des)):
        return 1 + sum(size(a) for a in node.args) + sum(size(a) for a in node.coargs)
    if isinstance(node, (Case, CoCase)):
        return 1 + sum(size(c) for _, c in node.branches)
    return 1
