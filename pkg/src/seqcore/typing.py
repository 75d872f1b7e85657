"""Type and discipline checking for System CD.

Commands carry their cut type, so checking proper needs no inference.  The
`_` wildcard is the one exception: `elaborate` fills wildcards by first-order
unification (with occurs check) and then re-checks the annotated result.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .errors import KindError, TypeCheckError
from .kinds import Signature, check_sequent, instantiate, kind_of, normalize_type
from .machine import Machine
from .syntax import (
    Case, CoCase, Con, CoPattern, CoVar, Cut, Declaration, Des, Discipline, KArrow, Kind, Mu,
    MuT, Pattern, Subst, TApp, TCon, TLam, TMeta, TVar, TypeExpr, Var, alpha_eq, all_names,
    fresh, free_tyvars, has_wildcards, kind_str, map_types, spine, subst_type, substitute,
)


class Mode(str, Enum):
    TYPED = "typed"
    DISCIPLINE = "discipline-only"


class FocusMode(str, Enum):
    UNFOCUSED = "unfocused"
    FOCUSED = "focused"


@dataclass(frozen=True)
class TypeContext:
    sig: Signature
    theta: Mapping[str, Kind] = field(default_factory=dict)
    gamma: Mapping[str, object] = field(default_factory=dict)   # TypeExpr, or Discipline when untyped
    delta: Mapping[str, object] = field(default_factory=dict)
    mode: Mode = Mode.TYPED

    def with_var(self, x, t) -> "TypeContext":
        return TypeContext(self.sig, self.theta, {**self.gamma, x: t}, self.delta, self.mode)

    def with_covar(self, a, t) -> "TypeContext":
        return TypeContext(self.sig, self.theta, self.gamma, {**self.delta, a: t}, self.mode)


def _show(t) -> str:
    from .surface import print_type
    return print_type(t)


# --- rule schemata ---------------------------------------------------------

@dataclass(frozen=True)
class Premise:
    judgment: str          # "type", "term", "coterm" or "command"
    subject: str           # metavariable name in the schema
    type: Optional[TypeExpr] = None
    kind: Optional[Kind] = None
    binds: tuple = ()      # for command premises: (("type", Y, S) | ("var", x, A, T) | ("covar", a, B, R))


@dataclass(frozen=True)
class RuleSchema:
    name: str
    connective: str
    side: str              # "right" (introduces a term) or "left" (a coterm)
    xtor: Optional[str]
    premises: tuple
    conclusion: TypeExpr   # F X̄
    discipline: Discipline


def generate_rules(sig: Signature, decl: Declaration) -> list[RuleSchema]:
    """Typing rules for a declared connective: one per xtor plus the matching rule."""
    conclusion = TCon(decl.name)
    for x, _ in decl.params:
        conclusion = TApp(conclusion, TVar(x))
    intro, elim = ("R", "L") if decl.is_data else ("L", "R")
    side_intro = "right" if decl.is_data else "left"
    rules = []
    for i, x in enumerate(decl.xtors, 1):
        prem = [Premise("type", y, kind=s) for y, s in x.quantified]
        if decl.is_data:
            prem += [Premise("coterm", f"e{j}", t, s) for j, (t, s) in enumerate(x.coterm_inputs, 1)]
            prem += [Premise("term", f"v{j}", t, s) for j, (t, s) in enumerate(x.term_inputs, 1)]
        else:
            prem += [Premise("term", f"v{j}", t, s) for j, (t, s) in enumerate(x.term_inputs, 1)]
            prem += [Premise("coterm", f"e{j}", t, s) for j, (t, s) in enumerate(x.coterm_inputs, 1)]
        rules.append(RuleSchema(f"{decl.name}{intro}{i}", decl.name, side_intro, x.name,
                                tuple(prem), conclusion, decl.result))
    branches = []
    for i, x in enumerate(decl.xtors, 1):
        binds = tuple([("type", y, s) for y, s in x.quantified]
                      + [("var", f"x{j}", t, s) for j, (t, s) in enumerate(x.term_inputs, 1)]
                      + [("covar", f"a{j}", t, s) for j, (t, s) in enumerate(x.coterm_inputs, 1)])
        branches.append(Premise("command", f"c{i}", binds=binds))
    rules.append(RuleSchema(f"{decl.name}{elim}", decl.name, "left" if decl.is_data else "right",
                            None, tuple(branches), conclusion, decl.result))
    return rules


# --- the checker -----------------------------------------------------------

class Checker:
    """Bidirectional-free checker; metavariables appear only while elaborating."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.machine = Machine(sig)
        self.solution: dict[int, TypeExpr] = {}
        self.deferred: list = []
        self.postponed: list = []
        self._next = 0
        self._rules: dict[str, RuleSchema] = {}

    # metavariables
    def meta(self, kind: Kind) -> TMeta:
        self._next += 1
        return TMeta(self._next, kind)

    def zonk(self, t: TypeExpr) -> TypeExpr:
        if isinstance(t, TMeta):
            if t.ident in self.solution:
                s = self.zonk(self.solution[t.ident])
                self.solution[t.ident] = s
                return s
            return t
        if isinstance(t, TApp):
            return TApp(self.zonk(t.fun), self.zonk(t.arg))
        if isinstance(t, TLam):
            return TLam(t.var, t.kind, self.zonk(t.body))
        return t

    def resolve(self, t: TypeExpr) -> TypeExpr:
        return normalize_type(self.zonk(t))

    def _occurs(self, ident: int, t: TypeExpr) -> bool:
        if isinstance(t, TMeta):
            return t.ident == ident
        if isinstance(t, TApp):
            return self._occurs(ident, t.fun) or self._occurs(ident, t.arg)
        if isinstance(t, TLam):
            return self._occurs(ident, t.body)
        return False

    def unify(self, theta, a: TypeExpr, b: TypeExpr, rule: str, span=None) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if alpha_eq(a, b):
            return
        if isinstance(a, TMeta):
            return self._solve(a, b, rule, span)
        if isinstance(b, TMeta):
            return self._solve(b, a, rule, span)
        if isinstance(a, TLam) or isinstance(b, TLam):
            avoid = free_tyvars(a) | free_tyvars(b) | set(theta)
            z = fresh("Z", avoid)
            ka = a.kind if isinstance(a, TLam) else b.kind
            inner = {**theta, z: ka}
            ab = subst_type(a.body, {a.var: TVar(z)}) if isinstance(a, TLam) else TApp(a, TVar(z))
            bb = subst_type(b.body, {b.var: TVar(z)}) if isinstance(b, TLam) else TApp(b, TVar(z))
            return self.unify(inner, ab, bb, rule, span)
        ha, xs = spine(a)
        hb, ys = spine(b)
        if isinstance(ha, TMeta) or isinstance(hb, TMeta):
            self.deferred.append((dict(theta), a, b, rule, span))
            return
        if ha != hb or len(xs) != len(ys):
            raise TypeCheckError(f"{rule}: type mismatch, {_show(a)} vs {_show(b)}", rule=rule, span=span)
        for x, y in zip(xs, ys):
            self.unify(theta, x, y, rule, span)

    def _solve(self, m: TMeta, t: TypeExpr, rule, span) -> None:
        if self._occurs(m.ident, t):
            raise TypeCheckError(f"{rule}: occurs check, no finite type solves ?{m.ident} = {_show(t)}",
                                 rule=rule, span=span)
        self.solution[m.ident] = t

    def _flex(self, t: TypeExpr) -> bool:
        h, args = spine(self.resolve(t))
        return isinstance(h, TMeta) and bool(args)

    def _postpone(self, ctx, node, t, is_term: bool) -> bool:
        if self._flex(t):
            self.postponed.append((ctx, node, t, is_term))
            return True
        return False

    def solve_deferred(self) -> None:
        while True:
            self._solve_constraints()
            ready = [p for p in self.postponed if not self._flex(p[2])]
            if not ready:
                break
            self.postponed = [p for p in self.postponed if self._flex(p[2])]
            for ctx, node, t, is_term in ready:
                if is_term:
                    self.check_term(ctx, node, t)
                else:
                    self.check_coterm(ctx, node, t)
        if self.postponed:
            ctx, node, t, _ = self.postponed[0]
            raise TypeCheckError(f"cannot determine the type {_show(self.resolve(t))}", rule="Infer",
                                 span=getattr(node, "span", None))

    def _solve_constraints(self) -> None:
        progress = True
        while self.deferred and progress:
            progress = False
            pending, self.deferred = self.deferred, []
            for theta, a, b, rule, span in pending:
                a, b = self.resolve(a), self.resolve(b)
                before = len(self.solution)
                flex = None
                for lhs, rhs in ((a, b), (b, a)):
                    h, args = spine(lhs)
                    if isinstance(h, TMeta) and args and all(isinstance(x, TVar) for x in args) \
                            and len({x.name for x in args}) == len(args):
                        flex = (h, args, rhs)
                        break
                if flex is not None:
                    h, args, rhs = flex
                    body = rhs
                    for x in reversed(args):
                        body = TLam(x.name, theta.get(x.name, self._arg_kind(h, args, x)), body)
                    self._solve(h, body, rule, span)
                    progress = True
                    continue
                self.unify(theta, a, b, rule, span)
                if len(self.solution) > before or not self.deferred or self.deferred[-1][1:3] != (a, b):
                    progress = True
        if self.deferred:
            _, a, b, rule, span = self.deferred[0]
            raise TypeCheckError(f"{rule}: cannot determine a type for {_show(a)} = {_show(b)}",
                                 rule=rule, span=span)

    @staticmethod
    def _arg_kind(h: TMeta, args, x) -> Kind:
        k = h.kind
        for a in args:
            if not isinstance(k, KArrow):
                break
            if a == x:
                return k.dom
            k = k.cod
        raise TypeCheckError("ill-kinded flexible type", rule="Unify")

    # kinds
    def kind(self, theta, t: TypeExpr, rule="Kind", span=None) -> Kind:
        try:
            return kind_of(theta, self.sig, self.zonk(t))
        except KindError as err:
            raise TypeCheckError(f"{rule}: {err.message}", rule=rule, span=span) from None

    def rule_for(self, xtor: str) -> RuleSchema:
        if xtor not in self._rules:
            d, _ = self.sig.xtor(xtor)
            for r in generate_rules(self.sig, d):
                if r.xtor:
                    self._rules[r.xtor] = r
        return self._rules[xtor]

    # commands
    def check_command(self, ctx: TypeContext, c: Cut) -> None:
        a = c.type
        if a is None:
            a = self.meta(c.disc)
        k = self.kind(ctx.theta, a, "Cut", c.span)
        if k != c.disc:
            raise TypeCheckError(f"Cut: kind of {_show(a)} is {kind_str(k)}, command is {c.disc.value}",
                                 rule="Cut", span=c.span)
        self.check_term(ctx, c.term, a, FocusMode.UNFOCUSED)
        self.check_coterm(ctx, c.coterm, a, FocusMode.UNFOCUSED)

    def _connective_at(self, ctx, t: TypeExpr, decl: Declaration, what: str, span):
        """Match t against decl's connective; returns its arguments."""
        r = self.resolve(t)
        h, args = spine(r)
        if isinstance(h, TMeta) and not args:
            params = [self.meta(k) for _, k in decl.params]
            tgt = TCon(decl.name)
            for p in params:
                tgt = TApp(tgt, p)
            self._solve(h, tgt, what, span)
            return params
        if isinstance(h, TCon) and h.name == decl.name and len(args) == len(decl.params):
            return args
        raise TypeCheckError(f"{what}: expected a {decl.name} type, got {_show(r)}", rule=what, span=span)

    def _focus(self, ctx, node, t, is_term: bool, span):
        k = self.kind(ctx.theta, t, "Focus", span)
        if not isinstance(k, Discipline):
            raise TypeCheckError("Focus: type has arrow kind", rule="Focus", span=span)
        ok = self.machine.is_value(node, k) if is_term else self.machine.is_covalue(node, k)
        if not ok:
            what = "value" if is_term else "covalue"
            rule = "BR" if is_term else "BL"
            raise TypeCheckError(f"{rule}: not a {k.value}-{what} in focus", rule=rule, span=span)

    def check_term(self, ctx: TypeContext, v, t: TypeExpr, focus: FocusMode = FocusMode.UNFOCUSED) -> None:
        span = getattr(v, "span", None)
        if focus is FocusMode.FOCUSED:
            self._focus(ctx, v, t, True, span)
        if isinstance(v, Var):
            if v.name not in ctx.gamma:
                raise TypeCheckError(f"VR: unbound variable {v.name}", rule="VR", span=span)
            self.unify(ctx.theta, ctx.gamma[v.name], t, "VR", span)
        elif isinstance(v, Mu):
            self.check_command(ctx.with_covar(v.covar, t), v.body)
        elif isinstance(v, (Con, CoCase)) and self._postpone(ctx, v, t, True):
            return
        elif isinstance(v, Con):
            info = self.sig.xtor(v.name)
            if info is None:
                raise TypeCheckError(f"unknown constructor {v.name}", rule="Xtor", span=span)
            d, _ = info
            if not d.is_data:
                raise TypeCheckError(f"{v.name} is a destructor, used as a constructor", rule="Xtor", span=span)
            rule = self.rule_for(v.name)
            args = self._connective_at(ctx, t, d, rule.name, span)
            self._check_xtor(ctx, rule, d, args, v, span)
        elif isinstance(v, CoCase):
            self._check_match(ctx, v.branches, t, False, span)
        else:
            raise TypeCheckError(f"not a term: {v!r}", rule="Term", span=span)

    def check_coterm(self, ctx: TypeContext, e, t: TypeExpr, focus: FocusMode = FocusMode.UNFOCUSED) -> None:
        span = getattr(e, "span", None)
        if focus is FocusMode.FOCUSED:
            self._focus(ctx, e, t, False, span)
        if isinstance(e, CoVar):
            if e.name not in ctx.delta:
                raise TypeCheckError(f"VL: unbound covariable {e.name}", rule="VL", span=span)
            self.unify(ctx.theta, ctx.delta[e.name], t, "VL", span)
        elif isinstance(e, MuT):
            self.check_command(ctx.with_var(e.var, t), e.body)
        elif isinstance(e, (Des, Case)) and self._postpone(ctx, e, t, False):
            return
        elif isinstance(e, Des):
            info = self.sig.xtor(e.name)
            if info is None:
                raise TypeCheckError(f"unknown destructor {e.name}", rule="Xtor", span=span)
            d, _ = info
            if d.is_data:
                raise TypeCheckError(f"{e.name} is a constructor, used as a destructor", rule="Xtor", span=span)
            rule = self.rule_for(e.name)
            args = self._connective_at(ctx, t, d, rule.name, span)
            self._check_xtor(ctx, rule, d, args, e, span)
        elif isinstance(e, Case):
            self._check_match(ctx, e.branches, t, True, span)
        else:
            raise TypeCheckError(f"not a coterm: {e!r}", rule="CoTerm", span=span)

    def _check_xtor(self, ctx, rule: RuleSchema, d: Declaration, params, node, span) -> None:
        x = d.xtors[self.sig.xtor(node.name)[1]]
        if len(node.tyargs) != len(x.quantified):
            raise TypeCheckError(f"{rule.name}: {node.name} takes {len(x.quantified)} type arguments, "
                                 f"got {len(node.tyargs)}", rule=rule.name, span=span)
        if len(node.args) != len(x.term_inputs) or len(node.coargs) != len(x.coterm_inputs):
            raise TypeCheckError(f"{rule.name}: {node.name} expects {len(x.term_inputs)} terms and "
                                 f"{len(x.coterm_inputs)} coterms", rule=rule.name, span=span)
        rho = {p: a for (p, _), a in zip(d.params, params)}
        for (y, s), b in zip(x.quantified, node.tyargs):
            k = self.kind(ctx.theta, b, rule.name, span)
            if k != s:
                raise TypeCheckError(f"{rule.name}: type argument {_show(b)} has kind {kind_str(k)}, "
                                     f"expected {s.value}", rule=rule.name, span=span)
            rho[y] = b
        terms = iter(node.args)
        coterms = iter(node.coargs)
        for p in rule.premises:
            if p.judgment == "term":
                self.check_term(ctx, next(terms), instantiate(p.type, rho))
            elif p.judgment == "coterm":
                self.check_coterm(ctx, next(coterms), instantiate(p.type, rho))

    def _check_match(self, ctx, branches, t, is_case: bool, span) -> None:
        what = "case" if is_case else "cocase"
        if not branches:
            r = self.resolve(t)
            h, args = spine(r)
            if isinstance(h, TMeta):
                raise TypeCheckError(f"cannot determine the type of an empty {what}", rule="Match", span=span)
            d = self.sig.decl(h.name) if isinstance(h, TCon) else None
            if d is None or d.is_data != is_case or d.xtors:
                raise TypeCheckError(f"empty {what} at type {_show(r)} is not exhaustive", rule="Match",
                                     span=span)
            return
        first = self.sig.xtor(branches[0][0].xtor)
        if first is None:
            raise TypeCheckError(f"unknown xtor {branches[0][0].xtor}", rule="Match", span=span)
        d, _ = first
        if d.is_data != is_case:
            raise TypeCheckError(f"{what} branch on {branches[0][0].xtor}, which belongs to {d.polarity} "
                                 f"{d.name}", rule="Match", span=span)
        elim = f"{d.name}{'L' if is_case else 'R'}"
        params = self._connective_at(ctx, t, d, elim, span)
        seen = set()
        for pat, _ in branches:
            info = self.sig.xtor(pat.xtor)
            if info is None or info[0].name != d.name:
                raise TypeCheckError(f"{elim}: {pat.xtor} is not an xtor of {d.name}", rule=elim, span=span)
            if pat.xtor in seen:
                raise TypeCheckError(f"{elim}: duplicate branch {pat.xtor}", rule=elim, span=span)
            seen.add(pat.xtor)
        missing = [x.name for x in d.xtors if x.name not in seen]
        if missing and ctx.mode is Mode.TYPED:
            raise TypeCheckError(f"{elim}: missing branches {', '.join(missing)}", rule=elim, span=span)
        for pat, body in branches:
            x = d.xtors[self.sig.xtor(pat.xtor)[1]]
            if (len(pat.tyvars), len(pat.vars), len(pat.covars)) != \
                    (len(x.quantified), len(x.term_inputs), len(x.coterm_inputs)):
                raise TypeCheckError(f"{elim}: pattern {pat.xtor} has the wrong arity", rule=elim, span=span)
            theta = dict(ctx.theta)
            rho = {p: a for (p, _), a in zip(d.params, params)}
            tyvars = []
            for y, (_, s) in zip(pat.tyvars, x.quantified):
                y2 = y
                if y in theta:
                    y2 = fresh(y, set(theta) | all_names(body))
                    body = substitute(body, Subst(types={y: TVar(y2)}))
                theta[y2] = s
                rho[x.quantified[len(tyvars)][0]] = TVar(y2)
                tyvars.append(y2)
            gamma = dict(ctx.gamma)
            delta = dict(ctx.delta)
            for name, (ty, _) in zip(pat.vars, x.term_inputs):
                gamma[name] = instantiate(ty, rho)
            for name, (ty, _) in zip(pat.covars, x.coterm_inputs):
                delta[name] = instantiate(ty, rho)
            self.check_command(TypeContext(ctx.sig, theta, gamma, delta, ctx.mode), body)


# --- discipline-only checking ----------------------------------------------

class DisciplineChecker:
    """The Untype system: only disciplines are tracked."""

    def __init__(self, sig: Signature):
        self.sig = sig

    def check_command(self, gamma, delta, c: Cut) -> None:
        self.check_term(gamma, delta, c.term, c.disc)
        self.check_coterm(gamma, delta, c.coterm, c.disc)

    def _err(self, msg, rule, node):
        raise TypeCheckError(msg, rule=rule, span=getattr(node, "span", None))

    def check_term(self, gamma, delta, v, s: Discipline) -> None:
        if isinstance(v, Var):
            if v.name not in gamma:
                self._err(f"VR: unbound variable {v.name}", "VR", v)
            if gamma[v.name] != s:
                self._err(f"VR: {v.name} has discipline {gamma[v.name].value}, used at {s.value}", "VR", v)
        elif isinstance(v, Mu):
            self.check_command(gamma, {**delta, v.covar: s}, v.body)
        elif isinstance(v, Con):
            d, x = self._xtor(v, True)
            self._result(d, s, v)
            self._arity(x, v)
            for a, (_, t) in zip(v.args, x.term_inputs):
                self.check_term(gamma, delta, a, t)
            for e, (_, r) in zip(v.coargs, x.coterm_inputs):
                self.check_coterm(gamma, delta, e, r)
        elif isinstance(v, CoCase):
            self._match(gamma, delta, v.branches, s, False, v)
        else:
            self._err(f"not a term: {v!r}", "Term", v)

    def check_coterm(self, gamma, delta, e, s: Discipline) -> None:
        if isinstance(e, CoVar):
            if e.name not in delta:
                self._err(f"VL: unbound covariable {e.name}", "VL", e)
            if delta[e.name] != s:
                self._err(f"VL: {e.name} has discipline {delta[e.name].value}, used at {s.value}", "VL", e)
        elif isinstance(e, MuT):
            self.check_command({**gamma, e.var: s}, delta, e.body)
        elif isinstance(e, Des):
            d, x = self._xtor(e, False)
            self._result(d, s, e)
            self._arity(x, e)
            for a, (_, t) in zip(e.args, x.term_inputs):
                self.check_term(gamma, delta, a, t)
            for c, (_, r) in zip(e.coargs, x.coterm_inputs):
                self.check_coterm(gamma, delta, c, r)
        elif isinstance(e, Case):
            self._match(gamma, delta, e.branches, s, True, e)
        else:
            self._err(f"not a coterm: {e!r}", "CoTerm", e)

    def _xtor(self, node, data: bool):
        info = self.sig.xtor(node.name)
        if info is None:
            self._err(f"unknown xtor {node.name}", "Xtor", node)
        d, i = info
        if d.is_data != data:
            self._err(f"{node.name} belongs to {d.polarity} {d.name}", "Xtor", node)
        return d, d.xtors[i]

    def _result(self, d, s, node):
        if d.result != s:
            self._err(f"{d.name} has discipline {d.result.value}, used at {s.value}", "Cut", node)

    def _arity(self, x, node):
        if (len(node.tyargs), len(node.args), len(node.coargs)) != \
                (len(x.quantified), len(x.term_inputs), len(x.coterm_inputs)):
            self._err(f"{node.name}: wrong number of arguments", "Xtor", node)

    def _match(self, gamma, delta, branches, s, is_case, node):
        seen = set()
        owner = None
        for pat, body in branches:
            info = self.sig.xtor(pat.xtor)
            if info is None:
                self._err(f"unknown xtor {pat.xtor}", "Match", node)
            d, i = info
            if d.is_data != is_case:
                self._err(f"{pat.xtor} belongs to {d.polarity} {d.name}", "Match", node)
            if owner is not None and d.name != owner:
                self._err(f"branches mix {owner} and {d.name}", "Match", node)
            owner = d.name
            self._result(d, s, node)
            if pat.xtor in seen:
                self._err(f"duplicate branch {pat.xtor}", "Match", node)
            seen.add(pat.xtor)
            x = d.xtors[i]
            if (len(pat.tyvars), len(pat.vars), len(pat.covars)) != \
                    (len(x.quantified), len(x.term_inputs), len(x.coterm_inputs)):
                self._err(f"pattern {pat.xtor} has the wrong arity", "Match", node)
            g = {**gamma, **{n: t for n, (_, t) in zip(pat.vars, x.term_inputs)}}
            dl = {**delta, **{n: r for n, (_, r) in zip(pat.covars, x.coterm_inputs)}}
            self.check_command(g, dl, body)


# --- public operations -----------------------------------------------------

def _disc_of(ctx: TypeContext, t) -> Discipline:
    if isinstance(t, Discipline):
        return t
    return kind_of(ctx.theta, ctx.sig, t)


def check_command(ctx: TypeContext, c: Cut) -> None:
    if ctx.mode is Mode.DISCIPLINE:
        g = {x: _disc_of(ctx, t) for x, t in ctx.gamma.items()}
        d = {a: _disc_of(ctx, t) for a, t in ctx.delta.items()}
        DisciplineChecker(ctx.sig).check_command(g, d, c)
        return
    if has_wildcards(c) or any(isinstance(t, TMeta) for t in list(ctx.gamma.values()) + list(ctx.delta.values())):
        elaborate(ctx, c)
        return
    check_sequent(ctx.theta, ctx.sig, ctx.gamma, ctx.delta)
    Checker(ctx.sig).check_command(ctx, c)


def check_term(ctx: TypeContext, v, t: TypeExpr, focus: FocusMode = FocusMode.UNFOCUSED) -> None:
    ch = Checker(ctx.sig)
    ch.check_term(ctx, v, t, focus)
    ch.solve_deferred()


def check_coterm(ctx: TypeContext, e, t: TypeExpr, focus: FocusMode = FocusMode.UNFOCUSED) -> None:
    ch = Checker(ctx.sig)
    ch.check_coterm(ctx, e, t, focus)
    ch.solve_deferred()


@dataclass
class Elaborated:
    command: Cut
    theta: dict
    gamma: dict
    delta: dict


def elaborate(ctx: TypeContext, c: Cut) -> Elaborated:
    """Fill `_` annotations (and untyped hypotheses) and re-check the result."""
    ch = Checker(ctx.sig)

    def wild(t):
        return t

    metas: list[TMeta] = []

    def fill(node):
        def cmd(x):
            ty = x.type
            if ty is None:
                ty = ch.meta(x.disc)
                metas.append(ty)
            return Cut(term(x.term), ty, x.disc, coterm(x.coterm), x.span)

        def term(v):
            if isinstance(v, Mu):
                return Mu(v.covar, cmd(v.body), v.span)
            if isinstance(v, Con):
                return Con(v.name, v.tyargs, tuple(coterm(e) for e in v.coargs),
                           tuple(term(a) for a in v.args), v.span)
            if isinstance(v, CoCase):
                return CoCase(tuple((q, cmd(b)) for q, b in v.branches), v.span)
            return v

        def coterm(e):
            if isinstance(e, MuT):
                return MuT(e.var, cmd(e.body), e.span)
            if isinstance(e, Des):
                return Des(e.name, e.tyargs, tuple(term(a) for a in e.args),
                           tuple(coterm(x) for x in e.coargs), e.span)
            if isinstance(e, Case):
                return Case(tuple((p, cmd(b)) for p, b in e.branches), e.span)
            return e

        return cmd(node)

    withmetas = fill(c)
    gamma = {x: ch.meta(t) if isinstance(t, Discipline) else t for x, t in ctx.gamma.items()}
    delta = {a: ch.meta(t) if isinstance(t, Discipline) else t for a, t in ctx.delta.items()}
    ctx2 = TypeContext(ctx.sig, dict(ctx.theta), gamma, delta, Mode.TYPED)
    ch.check_command(ctx2, withmetas)
    ch.solve_deferred()

    theta = dict(ctx.theta)
    naming: dict[int, TVar] = {}

    def close(t):
        t = ch.zonk(t)

        def go(u):
            if isinstance(u, TMeta):
                if u.ident not in naming:
                    base = f"T{u.kind.value}" if isinstance(u.kind, Discipline) else "F"
                    name = fresh(base, set(theta) | {v.name for v in naming.values()})
                    naming[u.ident] = TVar(name)
                    theta[name] = u.kind
                return naming[u.ident]
            if isinstance(u, TApp):
                return TApp(go(u.fun), go(u.arg))
            if isinstance(u, TLam):
                return TLam(u.var, u.kind, go(u.body))
            return u

        return normalize_type(go(t))

    out = map_types(withmetas, close)
    g2 = {x: close(t) for x, t in gamma.items()}
    d2 = {a: close(t) for a, t in delta.items()}
    final = TypeContext(ctx.sig, theta, g2, d2, Mode.TYPED)
    check_sequent(theta, ctx.sig, g2, d2)
    Checker(ctx.sig).check_command(final, out)
    return Elaborated(out, theta, g2, d2)


def check_subst(ctx: TypeContext, rho: Subst, target: TypeContext) -> None:
    """rho : target -> ctx, i.e. every hypothesis of target is replaced by a focused (co)value."""
    for x, k in target.theta.items():
        if x in rho.types:
            got = kind_of(ctx.theta, ctx.sig, rho.types[x])
            if got != k:
                raise TypeCheckError(f"Subst: {x} has kind {kind_str(k)}, replacement has {kind_str(got)}",
                                     rule="Subst")
    for x, t in target.gamma.items():
        if x in rho.terms:
            want = instantiate(t, rho.types)
            if ctx.mode is Mode.DISCIPLINE:
                s = _disc_of(target, t)
                if not Machine(ctx.sig).is_value(rho.terms[x], s):
                    raise TypeCheckError(f"Subst: replacement for {x} is not a {s.value}-value", rule="Subst")
            else:
                check_term(ctx, rho.terms[x], want, FocusMode.FOCUSED)
    for a, t in target.delta.items():
        if a in rho.coterms:
            want = instantiate(t, rho.types)
            if ctx.mode is Mode.DISCIPLINE:
                s = _disc_of(target, t)
                if not Machine(ctx.sig).is_covalue(rho.coterms[a], s):
                    raise TypeCheckError(f"Subst: replacement for {a} is not a {s.value}-covalue",
                                         rule="Subst")
            else:
                check_coterm(ctx, rho.coterms[a], want, FocusMode.FOCUSED)


def entry_context(sig: Signature, entry, mode: Mode = Mode.TYPED) -> TypeContext:
    """Build the checking context of a program entry (see surface.Entry)."""
    theta = dict(entry.theta)

    def hyp(h):
        if h.type is None:
            return h.disc
        if mode is Mode.DISCIPLINE:
            return h.disc if h.disc is not None else kind_of(theta, sig, h.type)
        if h.disc is not None:
            k = kind_of(theta, sig, h.type)
            if k != h.disc:
                raise TypeCheckError(f"{h.name}: type has kind {kind_str(k)}, declared {h.disc.value}",
                                     rule="Sequent")
        return h.type

    gamma = {h.name: hyp(h) for h in entry.gamma}
    delta = {h.name: hyp(h) for h in entry.delta}
    return TypeContext(sig, theta, gamma, delta, mode)


def check_entry(sig: Signature, entry, mode: Mode = Mode.TYPED):
    """Check an entry; in typed mode returns the elaborated command and context."""
    ctx = entry_context(sig, entry, mode)
    if mode is Mode.DISCIPLINE:
        check_command(ctx, entry.command)
        return None
    needs = has_wildcards(entry.command) or any(isinstance(t, Discipline)
                                                for t in list(ctx.gamma.values()) + list(ctx.delta.values()))
    if needs:
        return elaborate(ctx, entry.command)
    check_sequent(ctx.theta, sig, ctx.gamma, ctx.delta)
    Checker(sig).check_command(ctx, entry.command)
    return Elaborated(entry.command, dict(ctx.theta), dict(ctx.gamma), dict(ctx.delta))
