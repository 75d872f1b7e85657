"""From System CD to core System D: focusing lift, connective encoding, match flattening."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import CompileError
from .kinds import Signature, core_signature, head_connective, instantiate, normalize_type, xtor_components
from .machine import Machine
from .syntax import (
    Case, CoCase, Con, CoPattern, CoVar, Cut, Declaration, Des, Discipline, Mu, MuT, Pattern,
    Subst, TApp, TCon, TLam, TVar, TypeExpr, Var, all_names, fresh, substitute,
)


# --- focusing ---------------------------------------------------------------

def _components(sig: Signature, xtor: str, ty: Optional[TypeExpr], tyargs):
    """(terms, coterms) component lists of (type-or-None, disc), instantiated when ty is known."""
    d, i = sig.xtor(xtor)
    x = d.xtors[i]
    hc = head_connective(ty) if ty is not None else None
    if hc is not None and hc[0] == d.name and len(hc[1]) == len(d.params) \
            and len(tyargs) == len(x.quantified):
        return xtor_components(sig, xtor, hc[1], tyargs)
    return [(None, s) for _, s in x.term_inputs], [(None, s) for _, s in x.coterm_inputs]


class _Lifter:
    def __init__(self, sig: Signature):
        self.sig = sig

    def cmd(self, c: Cut) -> Cut:
        return Cut(self.term(c.term, c.type), c.type, c.disc, self.coterm(c.coterm, c.type), c.span)

    def _avoid(self, node) -> set:
        return all_names(node)

    def term(self, v, ty):
        if isinstance(v, Mu):
            return Mu(v.covar, self.cmd(v.body), v.span)
        if isinstance(v, CoCase):
            return CoCase(tuple((q, self.cmd(b)) for q, b in v.branches), v.span)
        if isinstance(v, Con):
            info = self.sig.xtor(v.name)
            if info is None:
                raise CompileError(f"unknown constructor {v.name}", rule="lift")
            d, _ = info
            terms, coterms = _components(self.sig, v.name, ty, v.tyargs)
            avoid = self._avoid(v)
            a = fresh("a", avoid)
            avoid.add(a)
            bs = []
            for _ in coterms:
                b = fresh("b", avoid)
                avoid.add(b)
                bs.append(b)
            ys = []
            for _ in terms:
                y = fresh("y", avoid)
                avoid.add(y)
                ys.append(y)
            core = Cut(Con(v.name, v.tyargs, tuple(CoVar(b) for b in bs), tuple(Var(y) for y in ys)),
                       ty, d.result, CoVar(a))
            for arg, y, (t, s) in reversed(list(zip(v.args, ys, terms))):
                core = Cut(self.term(arg, t), t, s, MuT(y, core))
            for arg, b, (t, s) in reversed(list(zip(v.coargs, bs, coterms))):
                core = Cut(Mu(b, core), t, s, self.coterm(arg, t))
            return Mu(a, core, v.span)
        return v

    def coterm(self, e, ty):
        if isinstance(e, MuT):
            return MuT(e.var, self.cmd(e.body), e.span)
        if isinstance(e, Case):
            return Case(tuple((p, self.cmd(b)) for p, b in e.branches), e.span)
        if isinstance(e, Des):
            info = self.sig.xtor(e.name)
            if info is None:
                raise CompileError(f"unknown destructor {e.name}", rule="lift")
            d, _ = info
            terms, coterms = _components(self.sig, e.name, ty, e.tyargs)
            avoid = self._avoid(e)
            z = fresh("z", avoid)
            avoid.add(z)
            ys, bs = [], []
            for _ in terms:
                y = fresh("y", avoid)
                avoid.add(y)
                ys.append(y)
            for _ in coterms:
                b = fresh("b", avoid)
                avoid.add(b)
                bs.append(b)
            core = Cut(Var(z), ty, d.result,
                       Des(e.name, e.tyargs, tuple(Var(y) for y in ys), tuple(CoVar(b) for b in bs)))
            for arg, b, (t, s) in reversed(list(zip(e.coargs, bs, coterms))):
                core = Cut(Mu(b, core), t, s, self.coterm(arg, t))
            for arg, y, (t, s) in reversed(list(zip(e.args, ys, terms))):
                core = Cut(self.term(arg, t), t, s, MuT(y, core))
            return MuT(z, core, e.span)
        return e


def lift(c: Cut, sig: Optional[Signature] = None) -> Cut:
    """Name every xtor argument so constructions and destructions become focused."""
    return _Lifter(sig or core_signature()).cmd(c)


def lift_term(v, ty=None, sig: Optional[Signature] = None):
    return _Lifter(sig or core_signature()).term(v, ty)


def lift_coterm(e, ty=None, sig: Optional[Signature] = None):
    return _Lifter(sig or core_signature()).coterm(e, ty)


def is_focused(node, sig: Optional[Signature] = None) -> bool:
    """Every xtor argument is a (co)value of its declared discipline, recursively."""
    m = Machine(sig or core_signature())

    def go(n) -> bool:
        if isinstance(n, Cut):
            return go(n.term) and go(n.coterm)
        if isinstance(n, (Mu, MuT)):
            return go(n.body)
        if isinstance(n, (CoCase, Case)):
            return all(go(b) for _, b in n.branches)
        if isinstance(n, (Con, Des)):
            info = m.sig.xtor(n.name)
            if info is None:
                return False
            d, i = info
            x = d.xtors[i]
            if len(n.args) != len(x.term_inputs) or len(n.coargs) != len(x.coterm_inputs):
                return False
            return (all(m.is_value(a, s) and go(a) for a, (_, s) in zip(n.args, x.term_inputs))
                    and all(m.is_covalue(e, s) and go(e) for e, (_, s) in zip(n.coargs, x.coterm_inputs)))
        return True

    return go(node)


def focus(c: Cut, sig: Optional[Signature] = None) -> Cut:
    return c if is_focused(c, sig) else lift(c, sig)


# --- nested (co)patterns -----------------------------------------------------

@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PCon:
    xtor: str
    tyvars: tuple = ()
    coargs: tuple = ()   # of QVar | QDes
    args: tuple = ()     # of PVar | PCon


@dataclass(frozen=True)
class QVar:
    name: str


@dataclass(frozen=True)
class QDes:
    xtor: str
    tyvars: tuple = ()
    args: tuple = ()     # of PVar | PCon
    coargs: tuple = ()   # of QVar | QDes


NestedPattern = Union[PVar, PCon]
NestedCoPattern = Union[QVar, QDes]


def pattern_term(p):
    """The term (for PVar/PCon) or coterm (for QVar/QDes) a nested pattern describes."""
    if isinstance(p, PVar):
        return Var(p.name)
    if isinstance(p, QVar):
        return CoVar(p.name)
    if isinstance(p, PCon):
        return Con(p.xtor, tuple(TVar(y) for y in p.tyvars),
                   tuple(pattern_term(q) for q in p.coargs), tuple(pattern_term(a) for a in p.args))
    return Des(p.xtor, tuple(TVar(y) for y in p.tyvars),
               tuple(pattern_term(a) for a in p.args), tuple(pattern_term(q) for q in p.coargs))


def from_flat(p) -> Union[PCon, QDes]:
    if isinstance(p, Pattern):
        return PCon(p.xtor, tuple(p.tyvars), tuple(QVar(a) for a in p.covars), tuple(PVar(x) for x in p.vars))
    return QDes(p.xtor, tuple(p.tyvars), tuple(PVar(x) for x in p.vars), tuple(QVar(a) for a in p.covars))


def _pnames(p) -> set:
    if isinstance(p, (PVar, QVar)):
        return {p.name}
    out = set(p.tyvars)
    for q in p.coargs + p.args:
        out |= _pnames(q)
    return out


def _is_var(p) -> bool:
    return isinstance(p, (PVar, QVar))


class _Matcher:
    """Column-wise compilation of nested (co)pattern rows into flat cases and cocases."""

    def __init__(self, sig: Signature, avoid: set):
        self.sig = sig
        self.avoid = set(avoid)

    def fresh(self, hint: str) -> str:
        n = fresh(hint, self.avoid)
        self.avoid.add(n)
        return n

    def match(self, cols, rows) -> Optional[Cut]:
        j = next((k for k in range(len(cols)) if any(not _is_var(r[0][k]) for r in rows)), None)
        if j is None:
            if not rows:
                return self._empty(cols)
            pats, body = rows[0]
            for (sort, name, _), p in zip(cols, pats):
                if p.name != name:
                    if sort == "term":
                        body = substitute(body, Subst(terms={p.name: Var(name)}))
                    else:
                        body = substitute(body, Subst(coterms={p.name: CoVar(name)}))
            return body
        return self._split(cols, rows, j)

    def _empty(self, cols, depth: int = 4) -> Optional[Cut]:
        """A command refuting an uninhabited column, if the column types show one."""
        direct = self._empty_direct(cols)
        if direct is not None or depth == 0:
            return direct
        for j, (sort, name, ty) in enumerate(cols):
            hc = head_connective(ty) if ty is not None else None
            d = self.sig.decl(hc[0]) if hc is not None else None
            if d is None or d.is_data != (sort == "term") or len(hc[1]) != len(d.params):
                continue
            branches = []
            for xt in d.xtors:
                tyvars = [self.fresh(y) for y, _ in xt.quantified]
                tcomps, ccomps = xtor_components(self.sig, xt.name, hc[1], [TVar(y) for y in tyvars])
                covs = [self.fresh("b") for _ in ccomps]
                vs = [self.fresh("y") for _ in tcomps]
                sub = self._empty([("coterm", b, t) for b, (t, _) in zip(covs, ccomps)]
                                  + [("term", y, t) for y, (t, _) in zip(vs, tcomps)], depth - 1)
                if sub is None:
                    break
                if d.is_data:
                    branches.append((Pattern(xt.name, tuple(tyvars), tuple(covs), tuple(vs)), sub))
                else:
                    branches.append((CoPattern(xt.name, tuple(tyvars), tuple(vs), tuple(covs)), sub))
            else:
                if d.is_data:
                    return Cut(Var(name), ty, d.result, Case(tuple(branches)))
                return Cut(CoCase(tuple(branches)), ty, d.result, CoVar(name))
        return None

    def _empty_direct(self, cols) -> Optional[Cut]:
        for sort, name, ty in cols:
            hc = head_connective(ty) if ty is not None else None
            if hc is None:
                continue
            d = self.sig.decl(hc[0])
            if d is None or d.xtors:
                continue
            if sort == "term" and d.is_data:
                return Cut(Var(name), ty, d.result, Case(()))
            if sort == "coterm" and not d.is_data:
                return Cut(CoCase(()), ty, d.result, CoVar(name))
        return None

    def _split(self, cols, rows, j) -> Optional[Cut]:
        sort, name, ty = cols[j]
        heads = [r[0][j] for r in rows if not _is_var(r[0][j])]
        info = self.sig.xtor(heads[0].xtor)
        if info is None:
            raise CompileError(f"unknown xtor {heads[0].xtor} in pattern", rule="flatten")
        d, _ = info
        hc = head_connective(ty) if ty is not None else None
        known = hc is not None and hc[0] == d.name
        present = {h.xtor for h in heads}
        xtors = d.xtors if known else [x for x in d.xtors if x.name in present]
        data = sort == "term"
        if d.is_data != data:
            raise CompileError(f"{heads[0].xtor} cannot match a {sort} column", rule="flatten")
        branches = []
        for xt in xtors:
            krows = [r for r in rows if _is_var(r[0][j]) or r[0][j].xtor == xt.name]
            single = krows[0][0][j] if len(krows) == 1 and not _is_var(krows[0][0][j]) else None
            tyvars = [single.tyvars[k] if single else self.fresh(y) for k, (y, _) in enumerate(xt.quantified)]
            if single:
                self.avoid |= set(tyvars)
            if known:
                tcomps, ccomps = xtor_components(self.sig, xt.name, hc[1], [TVar(y) for y in tyvars])
            else:
                tcomps = [(None, s) for _, s in xt.term_inputs]
                ccomps = [(None, s) for _, s in xt.coterm_inputs]

            def pick(sub, hint):
                if single is not None and _is_var(sub):
                    self.avoid.add(sub.name)
                    return sub.name
                return self.fresh(hint)

            sub_c = single.coargs if single else [None] * len(ccomps)
            sub_t = single.args if single else [None] * len(tcomps)
            covs = [pick(s, "b") if s is not None else self.fresh("b") for s in sub_c]
            vs = [pick(s, "y") if s is not None else self.fresh("y") for s in sub_t]
            ccols = [("coterm", b, t) for b, (t, _) in zip(covs, ccomps)]
            tcols = [("term", y, t) for y, (t, _) in zip(vs, tcomps)]
            newcols = (ccols + tcols if data else tcols + ccols)
            rest = cols[:j] + cols[j + 1:]
            newrows = []
            for pats, body in krows:
                p = pats[j]
                others = list(pats[:j]) + list(pats[j + 1:])
                if _is_var(p):
                    subs_c = [QVar(self.fresh("w")) for _ in ccomps]
                    subs_t = [PVar(self.fresh("w")) for _ in tcomps]
                    rebuilt = PCon(xt.name, tuple(tyvars), tuple(QVar(b) for b in covs),
                                   tuple(PVar(y) for y in vs)) if data else \
                        QDes(xt.name, tuple(tyvars), tuple(PVar(y) for y in vs), tuple(QVar(b) for b in covs))
                    key = "terms" if data else "coterms"
                    body = substitute(body, Subst(**{key: {p.name: pattern_term(rebuilt)}}))
                else:
                    ren = {y0: TVar(y1) for y0, y1 in zip(p.tyvars, tyvars) if y0 != y1}
                    if ren:
                        body = substitute(body, Subst(types=ren))
                    subs_c, subs_t = list(p.coargs), list(p.args)
                subs = subs_c + subs_t if data else subs_t + subs_c
                newrows.append((subs + others, body))
            sub = self.match(newcols + rest, newrows)
            if sub is None:
                continue
            if data:
                branches.append((Pattern(xt.name, tuple(tyvars), tuple(covs), tuple(vs)), sub))
            else:
                branches.append((CoPattern(xt.name, tuple(tyvars), tuple(vs), tuple(covs)), sub))
        if data:
            return Cut(Var(name), ty, d.result, Case(tuple(branches)))
        return Cut(CoCase(tuple(branches)), ty, d.result, CoVar(name))


def _row_avoid(rows) -> set:
    out = set()
    for p, body in rows:
        out |= _pnames(p) | all_names(body)
    return out


def flatten_case(rows, ty: Optional[TypeExpr] = None, sig: Optional[Signature] = None):
    """case{p1 => c1 | ...} over nested patterns, as a flat coterm."""
    sig = sig or core_signature()
    rows = list(rows)
    if rows and all(isinstance(p, PVar) for p, _ in rows):
        return MuT(rows[0][0].name, rows[0][1])
    m = _Matcher(sig, _row_avoid(rows))
    z = m.fresh("z")
    out = m.match([("term", z, ty)], [([p], b) for p, b in rows])
    if out is None:
        raise CompileError("non-exhaustive nested match", rule="flatten")
    if isinstance(out.term, Var) and out.term.name == z and isinstance(out.coterm, Case):
        return out.coterm
    return MuT(z, out)


def flatten_cocase(rows, ty: Optional[TypeExpr] = None, sig: Optional[Signature] = None):
    """cocase{q1 => c1 | ...} over nested copatterns, as a flat term."""
    sig = sig or core_signature()
    rows = list(rows)
    if rows and all(isinstance(q, QVar) for q, _ in rows):
        return Mu(rows[0][0].name, rows[0][1])
    m = _Matcher(sig, _row_avoid(rows))
    z = m.fresh("g")
    out = m.match([("coterm", z, ty)], [([q], b) for q, b in rows])
    if out is None:
        raise CompileError("non-exhaustive nested comatch", rule="flatten")
    if isinstance(out.coterm, CoVar) and out.coterm.name == z and isinstance(out.term, CoCase):
        return out.term
    return Mu(z, out)


def flatten_match(rows, ty: Optional[TypeExpr] = None, sig: Optional[Signature] = None):
    """Dispatch on the row shape: patterns give a coterm, copatterns a term."""
    rows = list(rows)
    if rows and isinstance(rows[0][0], (QVar, QDes)):
        return flatten_cocase(rows, ty, sig)
    return flatten_case(rows, ty, sig)


# --- encoding ---------------------------------------------------------------

def _tc(name: str, *args) -> TypeExpr:
    t = TCon(name)
    for a in args:
        t = TApp(t, a)
    return t


def _fold(op: str, items, unit: str) -> TypeExpr:
    t = TCon(unit)
    for a in reversed(items):
        t = _tc(op, a, t)
    return t


def connective_encoding(d: Declaration) -> TypeExpr:
    """The core type a declared connective stands for, as a type-level lambda."""
    alts = []
    for x in d.xtors:
        if d.is_data:
            parts = [_tc("NotP", _tc(f"ToNeg@{r.value}", b)) for b, r in x.coterm_inputs]
            parts += [_tc(f"ToPos@{t.value}", a) for a, t in x.term_inputs]
            body = _fold("Tensor", parts, "One")
            for y, s in reversed(x.quantified):
                body = _tc(f"Exists@{s.value}", TLam(y, s, body))
        else:
            parts = [_tc("NotN", _tc(f"ToPos@{t.value}", a)) for a, t in x.term_inputs]
            parts += [_tc(f"ToNeg@{r.value}", b) for b, r in x.coterm_inputs]
            body = _fold("Par", parts, "Bot")
            for y, s in reversed(x.quantified):
                body = _tc(f"Forall@{s.value}", TLam(y, s, body))
        alts.append(body)
    if d.is_data:
        t = _tc(f"FromPos@{d.result.value}", _fold("Sum", alts, "Zero"))
    else:
        t = _tc(f"FromNeg@{d.result.value}", _fold("With", alts, "Top"))
    for p, k in reversed(d.params):
        t = TLam(p, k, t)
    return t


def _declared_in(sig: Signature, t: TypeExpr) -> set:
    if isinstance(t, TCon):
        return set() if sig.is_core(t.name) or t.name not in sig else {t.name}
    if isinstance(t, TApp):
        return _declared_in(sig, t.fun) | _declared_in(sig, t.arg)
    if isinstance(t, TLam):
        return _declared_in(sig, t.body)
    return set()


def _replace(sig: Signature, t: TypeExpr) -> TypeExpr:
    if isinstance(t, TCon):
        if t.name in sig and not sig.is_core(t.name):
            return connective_encoding(sig.decl(t.name))
        return t
    if isinstance(t, TApp):
        return TApp(_replace(sig, t.fun), _replace(sig, t.arg))
    if isinstance(t, TLam):
        return TLam(t.var, t.kind, _replace(sig, t.body))
    return t


def encode_type(sig: Signature, t: Optional[TypeExpr]) -> Optional[TypeExpr]:
    if t is None:
        return None
    limit = len(sig.declared()) + 1
    for _ in range(limit + 1):
        if not _declared_in(sig, t):
            return normalize_type(t)
        t = normalize_type(_replace(sig, t))
    raise CompileError("cyclic declarations: encoding does not reach core connectives", rule="encode")


def _inj(i: int, p, term: bool):
    """i-th alternative (1-based): i-1 Inr layers around Inl."""
    if term:
        out = Con("Inl", args=(p,))
        for _ in range(i - 1):
            out = Con("Inr", args=(out,))
    else:
        out = PCon("Inl", args=(p,))
        for _ in range(i - 1):
            out = PCon("Inr", args=(out,))
    return out


def _proj(i: int, q, coterm: bool):
    if coterm:
        out = Des("Fst", coargs=(q,))
        for _ in range(i - 1):
            out = Des("Snd", coargs=(out,))
    else:
        out = QDes("Fst", coargs=(q,))
        for _ in range(i - 1):
            out = QDes("Snd", coargs=(out,))
    return out


class Encoder:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.core = core_signature()

    def type(self, t):
        return encode_type(self.sig, t)

    def _declared(self, xtor: str) -> bool:
        info = self.sig.xtor(xtor)
        return info is not None and not self.sig.is_core(info[0].name)

    def cmd(self, c: Cut) -> Cut:
        return Cut(self.term(c.term, c.type), self.type(c.type), c.disc,
                   self.coterm(c.coterm, c.type), c.span)

    def subst(self, rho: Subst) -> Subst:
        return Subst({x: self.type(t) for x, t in rho.types.items()},
                     {x: self.term(v, None) for x, v in rho.terms.items()},
                     {a: self.coterm(e, None) for a, e in rho.coterms.items()})

    def term(self, v, ty):
        if isinstance(v, Mu):
            return Mu(v.covar, self.cmd(v.body), v.span)
        if isinstance(v, Con):
            terms, coterms = _components(self.sig, v.name, ty, v.tyargs)
            args = tuple(self.term(a, t) for a, (t, _) in zip(v.args, terms))
            coargs = tuple(self.coterm(e, t) for e, (t, _) in zip(v.coargs, coterms))
            tyargs = tuple(self.type(t) for t in v.tyargs)
            if not self._declared(v.name):
                return Con(v.name, tyargs, coargs, args, v.span)
            d, i = self.sig.xtor(v.name)
            x = d.xtors[i]
            parts = [Con("ContP", coargs=(Des(f"Unwrap@{r.value}", coargs=(e,)),))
                     for e, (_, r) in zip(coargs, x.coterm_inputs)]
            parts += [Con(f"Wrap@{t.value}", args=(a,)) for a, (_, t) in zip(args, x.term_inputs)]
            body = Con("Unit")
            for p in reversed(parts):
                body = Con("Pair", args=(p, body))
            for (_, s), c in reversed(list(zip(x.quantified, tyargs))):
                body = Con(f"Pack@{s.value}", (c,), (), (body,))
            return Con(f"Delay@{d.result.value}", args=(_inj(i + 1, body, True),), span=v.span)
        if isinstance(v, CoCase):
            branches = [(q, self.cmd(b)) for q, b in v.branches]
            if not branches or not self._declared(branches[0][0].xtor):
                return CoCase(tuple(branches), v.span)
            rows = [(self._copattern(q), b) for q, b in branches]
            return flatten_cocase(rows, self.type(ty), self.core)
        return v

    def coterm(self, e, ty):
        if isinstance(e, MuT):
            return MuT(e.var, self.cmd(e.body), e.span)
        if isinstance(e, Des):
            terms, coterms = _components(self.sig, e.name, ty, e.tyargs)
            args = tuple(self.term(a, t) for a, (t, _) in zip(e.args, terms))
            coargs = tuple(self.coterm(c, t) for c, (t, _) in zip(e.coargs, coterms))
            tyargs = tuple(self.type(t) for t in e.tyargs)
            if not self._declared(e.name):
                return Des(e.name, tyargs, args, coargs, e.span)
            d, i = self.sig.xtor(e.name)
            x = d.xtors[i]
            parts = [Des("ThrowN", args=(Con(f"Wrap@{t.value}", args=(a,)),))
                     for a, (_, t) in zip(args, x.term_inputs)]
            parts += [Des(f"Unwrap@{r.value}", coargs=(c,)) for c, (_, r) in zip(coargs, x.coterm_inputs)]
            body = Des("CoUnit")
            for p in reversed(parts):
                body = Des("CoPair", coargs=(p, body))
            for (_, s), c in reversed(list(zip(x.quantified, tyargs))):
                body = Des(f"Spec@{s.value}", (c,), (), (body,))
            return Des(f"Force@{d.result.value}", coargs=(_proj(i + 1, body, True),), span=e.span)
        if isinstance(e, Case):
            branches = [(p, self.cmd(b)) for p, b in e.branches]
            if not branches or not self._declared(branches[0][0].xtor):
                return Case(tuple(branches), e.span)
            rows = [(self._pattern(p), b) for p, b in branches]
            return flatten_case(rows, self.type(ty), self.core)
        return e

    def _pattern(self, p: Pattern) -> PCon:
        d, i = self.sig.xtor(p.xtor)
        x = d.xtors[i]
        parts = [PCon("ContP", coargs=(QDes(f"Unwrap@{r.value}", coargs=(QVar(a),)),))
                 for a, (_, r) in zip(p.covars, x.coterm_inputs)]
        parts += [PCon(f"Wrap@{t.value}", args=(PVar(y),)) for y, (_, t) in zip(p.vars, x.term_inputs)]
        body = PCon("Unit")
        for q in reversed(parts):
            body = PCon("Pair", args=(q, body))
        for y, (_, s) in reversed(list(zip(p.tyvars, x.quantified))):
            body = PCon(f"Pack@{s.value}", (y,), (), (body,))
        return PCon(f"Delay@{d.result.value}", args=(_inj(i + 1, body, False),))

    def _copattern(self, q: CoPattern) -> QDes:
        d, i = self.sig.xtor(q.xtor)
        x = d.xtors[i]
        parts = [QDes("ThrowN", args=(PCon(f"Wrap@{t.value}", args=(PVar(y),)),))
                 for y, (_, t) in zip(q.vars, x.term_inputs)]
        parts += [QDes(f"Unwrap@{r.value}", coargs=(QVar(a),)) for a, (_, r) in zip(q.covars, x.coterm_inputs)]
        body = QDes("CoUnit")
        for p in reversed(parts):
            body = QDes("CoPair", coargs=(p, body))
        for y, (_, s) in reversed(list(zip(q.tyvars, x.quantified))):
            body = QDes(f"Spec@{s.value}", (y,), (), (body,))
        return QDes(f"Force@{d.result.value}", coargs=(_proj(i + 1, body, False),))

    def pattern(self, p):
        return self._pattern(p) if isinstance(p, Pattern) else self._copattern(p)


def encode_command(sig: Signature, c: Cut) -> Cut:
    return Encoder(sig).cmd(c)


def encode_term(sig: Signature, v, ty=None):
    return Encoder(sig).term(v, ty)


def encode_coterm(sig: Signature, e, ty=None):
    return Encoder(sig).coterm(e, ty)


def encode_subst(sig: Signature, rho: Subst) -> Subst:
    return Encoder(sig).subst(rho)


def encode_pattern(sig: Signature, p):
    """The nested core (co)pattern standing for a declared flat (co)pattern."""
    return Encoder(sig).pattern(p)


def compile_command(sig: Signature, c: Cut) -> Cut:
    """lift, then encode: the full pipeline into core System D."""
    return encode_command(sig, lift(c, sig))


def uses_only_core(node) -> bool:
    core = core_signature()
    names: set = set()

    def ty(t):
        if isinstance(t, TCon):
            names.add(t.name)
        elif isinstance(t, TApp):
            ty(t.fun)
            ty(t.arg)
        elif isinstance(t, TLam):
            ty(t.body)

    def go(n):
        if isinstance(n, Cut):
            if n.type is not None:
                ty(n.type)
            go(n.term)
            go(n.coterm)
        elif isinstance(n, (Mu, MuT)):
            go(n.body)
        elif isinstance(n, (Case, CoCase)):
            for p, b in n.branches:
                names.add(core.xtor(p.xtor)[0].name if core.has_xtor(p.xtor) else "?" + p.xtor)
                go(b)
        elif isinstance(n, (Con, Des)):
            names.add(core.xtor(n.name)[0].name if core.has_xtor(n.name) else "?" + n.name)
            for t in n.tyargs:
                ty(t)
            for a in n.args + n.coargs:
                go(a)

    go(node)
    return all(n in core for n in names)
