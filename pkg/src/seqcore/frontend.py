"""The lambda-mu-mu-tilde source calculi, their steppers, and polarization into System CD."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .compile import PCon, PVar, QDes, QVar, flatten_case, flatten_cocase
from .errors import CompileError, SeqcoreError, TypeCheckError
from .kinds import Signature, check_decl, core_signature
from .lmtm import LApp, LCase, LCmd, LCoVar, LInj, LLam, LLit, LMu, LMuT, LProgram, LVar
from .machine import Status
from .syntax import (
    CONEED, N, NEED, V, Case, CoCase, Con, CoPattern, CoVar, Cut, Declaration, Des, Discipline,
    Mu, MuT, Pattern, TCon, TVar, Var, Xtor, fresh,
)

__all__ = [
    "Strategy", "Scheme", "LVar", "LMu", "LLam", "LInj", "LLit", "LCoVar", "LMuT", "LApp", "LCase",
    "LCmd", "LProgram", "lfree", "lsubst", "is_lvalue", "is_lcovalue", "well_formed", "lmtm_step",
    "lmtm_run", "lneeded", "LObservation", "polarize", "Polarized", "prelude", "FrontendRule",
]


class Strategy(str, Enum):
    Q = "v"          # call-by-value
    T = "n"          # call-by-name
    NEED = "need"
    CONEED = "coneed"

    @property
    def discipline(self) -> Discipline:
        return Discipline(self.value)

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        aliases = {"q": cls.Q, "v": cls.Q, "cbv": cls.Q, "t": cls.T, "n": cls.T, "cbn": cls.T,
                   "need": cls.NEED, "coneed": cls.CONEED}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ValueError(f"unknown strategy {text!r}") from None


class Scheme(str, Enum):
    CLASSIC = "classic"
    GENERIC = "generic"


class FrontendRule(str, Enum):
    BMU = "bmu"
    BMUT = "bmut"
    BFUN = "bfun"
    BSUM = "bsum"

    def __str__(self):
        return self.value


# --- names and substitution -------------------------------------------------

def lfree(node) -> tuple[set, set]:
    """(free variables, free covariables)."""
    if isinstance(node, LCmd):
        a, b = lfree(node.term)
        c, d = lfree(node.coterm)
        return a | c, b | d
    if isinstance(node, LVar):
        return {node.name}, set()
    if isinstance(node, LCoVar):
        return set(), {node.name}
    if isinstance(node, LLit):
        return set(), set()
    if isinstance(node, LMu):
        a, b = lfree(node.body)
        return a, b - {node.covar}
    if isinstance(node, LMuT):
        a, b = lfree(node.body)
        return a - {node.var}, b
    if isinstance(node, LLam):
        a, b = lfree(node.body)
        return a - {node.var}, b - {node.covar}
    if isinstance(node, LInj):
        return lfree(node.arg)
    if isinstance(node, LApp):
        a, b = lfree(node.arg)
        c, d = lfree(node.cont)
        return a | c, b | d
    if isinstance(node, LCase):
        a, b = lfree(node.left_body)
        c, d = lfree(node.right_body)
        return (a - {node.left}) | (c - {node.right}), b | d
    raise TypeError(f"not a lambda-mu-mu-tilde node: {node!r}")


def _lnames(node) -> set:
    a, b = lfree(node)
    out = a | b
    for attr in ("covar", "var", "left", "right"):
        if hasattr(node, attr):
            out.add(getattr(node, attr))
    for attr in ("body", "term", "coterm", "arg", "cont", "left_body", "right_body"):
        if hasattr(node, attr):
            out |= _lnames(getattr(node, attr))
    return out


def lsubst(node, var_map: dict, covar_map: dict):
    """Capture-avoiding simultaneous substitution."""
    if not var_map and not covar_map:
        return node
    rng_v, rng_c = set(), set()
    for x in list(var_map.values()) + list(covar_map.values()):
        a, b = lfree(x)
        rng_v |= a
        rng_c |= b

    def avoid(body):
        return _lnames(body) | rng_v | rng_c | set(var_map) | set(covar_map)

    def bind_var(x, body, vm, cm):
        vm = {k: v for k, v in vm.items() if k != x}
        if x in rng_v:
            y = fresh(x, avoid(body))
            vm[x] = LVar(y)
            return y, vm, cm
        return x, vm, cm

    def bind_covar(a, body, vm, cm):
        cm = {k: v for k, v in cm.items() if k != a}
        if a in rng_c:
            b = fresh(a, avoid(body))
            cm[a] = LCoVar(b)
            return b, vm, cm
        return a, vm, cm

    def go(n, vm, cm):
        if isinstance(n, LCmd):
            return LCmd(go(n.term, vm, cm), go(n.coterm, vm, cm))
        if isinstance(n, LVar):
            return vm.get(n.name, n)
        if isinstance(n, LCoVar):
            return cm.get(n.name, n)
        if isinstance(n, LLit):
            return n
        if isinstance(n, LMu):
            a, vm2, cm2 = bind_covar(n.covar, n.body, vm, cm)
            return LMu(a, go(n.body, vm2, cm2))
        if isinstance(n, LMuT):
            x, vm2, cm2 = bind_var(n.var, n.body, vm, cm)
            return LMuT(x, go(n.body, vm2, cm2))
        if isinstance(n, LLam):
            x, vm2, cm2 = bind_var(n.var, n.body, vm, cm)
            a, vm2, cm2 = bind_covar(n.covar, n.body, vm2, cm2)
            return LLam(x, a, go(n.body, vm2, cm2))
        if isinstance(n, LInj):
            return LInj(n.index, go(n.arg, vm, cm))
        if isinstance(n, LApp):
            return LApp(go(n.arg, vm, cm), go(n.cont, vm, cm))
        if isinstance(n, LCase):
            x, vm1, cm1 = bind_var(n.left, n.left_body, vm, cm)
            y, vm2, cm2 = bind_var(n.right, n.right_body, vm, cm)
            return LCase(x, go(n.left_body, vm1, cm1), y, go(n.right_body, vm2, cm2))
        raise TypeError(f"not a lambda-mu-mu-tilde node: {n!r}")

    return go(node, dict(var_map), dict(covar_map))


# --- values, covalues and well-formedness ----------------------------------

def _weak(v) -> bool:
    if isinstance(v, (LVar, LLam, LLit)):
        return True
    if isinstance(v, LInj):
        return _weak(v.arg)
    return False


def _forces(c: LCmd, x: str, s: Strategy) -> bool:
    """c = H[<x | E>] with H a need heap not binding x."""
    while True:
        if isinstance(c.term, LVar) and c.term.name == x and is_lcovalue(c.coterm, s):
            return True
        if not isinstance(c.coterm, LMuT) or c.coterm.var == x:
            return False
        c = c.coterm.body


def _delivers(c: LCmd, a: str, s: Strategy) -> bool:
    """c = H[<V | a>] with H a co-need heap not binding a."""
    while True:
        if isinstance(c.coterm, LCoVar) and c.coterm.name == a and is_lvalue(c.term, s):
            return True
        if not isinstance(c.term, LMu) or c.term.covar == a:
            return False
        c = c.term.body


def is_lvalue(v, s: Strategy) -> bool:
    if s is Strategy.T:
        return True
    if isinstance(v, LInj):
        return is_lvalue(v.arg, s) if s is Strategy.CONEED else _weak(v.arg)
    if isinstance(v, (LVar, LLam, LLit)):
        return True
    return s is Strategy.CONEED and isinstance(v, LMu) and _delivers(v.body, v.covar, s)


def is_lcovalue(e, s: Strategy) -> bool:
    if s is Strategy.Q:
        return True
    if isinstance(e, (LCoVar, LCase)):
        return True
    if isinstance(e, LApp):
        if s is Strategy.T:
            return is_lcovalue(e.cont, s)
        return is_lvalue(e.arg, s) and is_lcovalue(e.cont, s)
    return s is Strategy.NEED and isinstance(e, LMuT) and _forces(e.body, e.var, s)


def well_formed(node, s: Strategy) -> bool:
    """Membership in the sub-syntax of the chosen strategy."""
    if isinstance(node, LCmd):
        return well_formed(node.term, s) and well_formed(node.coterm, s)
    if isinstance(node, (LVar, LCoVar, LLit)):
        return True
    if isinstance(node, (LMu, LMuT, LLam)):
        return well_formed(node.body, s)
    if isinstance(node, LInj):
        ok = s is Strategy.T or is_lvalue(node.arg, s)
        return ok and well_formed(node.arg, s)
    if isinstance(node, LApp):
        if s is Strategy.Q:
            ok = is_lvalue(node.arg, s)
        elif s is Strategy.T:
            ok = is_lcovalue(node.cont, s)
        else:
            ok = is_lvalue(node.arg, s) and is_lcovalue(node.cont, s)
        return ok and well_formed(node.arg, s) and well_formed(node.cont, s)
    if isinstance(node, LCase):
        return well_formed(node.left_body, s) and well_formed(node.right_body, s)
    return False


# --- stepping ---------------------------------------------------------------

def _top(c: LCmd, s: Strategy):
    v, e = c.term, c.coterm
    if isinstance(v, LMu) and is_lcovalue(e, s):
        return FrontendRule.BMU, lsubst(v.body, {}, {v.covar: e})
    if isinstance(e, LMuT) and is_lvalue(v, s):
        return FrontendRule.BMUT, lsubst(e.body, {e.var: v}, {})
    if isinstance(v, LLam) and isinstance(e, LApp) and is_lvalue(e.arg, s) and is_lcovalue(e.cont, s):
        return FrontendRule.BFUN, lsubst(v.body, {v.var: e.arg}, {v.covar: e.cont})
    if isinstance(v, LInj) and isinstance(e, LCase) and is_lvalue(v.arg, s):
        if v.index == 1:
            return FrontendRule.BSUM, lsubst(e.left_body, {e.left: v.arg}, {})
        return FrontendRule.BSUM, lsubst(e.right_body, {e.right: v.arg}, {})
    return None


def lmtm_step(c: LCmd, s: Strategy):
    """(rule, next command, heap depth) or None."""
    frames = []
    cur = c
    while True:
        hit = _top(cur, s)
        if hit is not None:
            rule, nxt = hit
            for kind, outer in reversed(frames):
                nxt = LCmd(outer, LMuT(kind, nxt)) if s is Strategy.NEED else LCmd(LMu(kind, nxt), outer)
            return rule, nxt, len(frames)
        if s is Strategy.NEED and isinstance(cur.coterm, LMuT):
            frames.append((cur.coterm.var, cur.term))
            cur = cur.coterm.body
        elif s is Strategy.CONEED and isinstance(cur.term, LMu):
            frames.append((cur.term.covar, cur.coterm))
            cur = cur.term.body
        else:
            return None


def lneeded(c: LCmd, s: Strategy) -> frozenset:
    if lmtm_step(c, s) is not None:
        return frozenset()
    out = set()
    bound_v, bound_c = set(), set()
    cur = c
    while True:
        if isinstance(cur.term, LVar) and cur.term.name not in bound_v and is_lcovalue(cur.coterm, s):
            out.add(cur.term.name)
        if isinstance(cur.coterm, LCoVar) and cur.coterm.name not in bound_c and is_lvalue(cur.term, s):
            out.add(cur.coterm.name)
        if s is Strategy.NEED and isinstance(cur.coterm, LMuT):
            bound_v.add(cur.coterm.var)
            cur = cur.coterm.body
        elif s is Strategy.CONEED and isinstance(cur.term, LMu):
            bound_c.add(cur.term.covar)
            cur = cur.term.body
        else:
            return frozenset(out)


@dataclass
class LObservation:
    status: Status
    needed: frozenset
    steps: int
    final: LCmd
    trace: list = field(default_factory=list)   # of (rule, depth)

    def covariables(self) -> frozenset:
        _, cov = lfree(self.final)
        return frozenset(self.needed & cov)


def lmtm_run(c: LCmd, s: Strategy, fuel: int = 10_000) -> LObservation:
    steps = 0
    trace = []
    cur = c
    while True:
        r = lmtm_step(cur, s)
        if r is None:
            nd = lneeded(cur, s)
            return LObservation(Status.FINISHED if nd else Status.STUCK, nd, steps, cur, trace)
        if steps >= fuel:
            return LObservation(Status.TIMEOUT, frozenset(), steps, cur, trace)
        rule, cur, depth = r
        steps += 1
        trace.append((rule, depth))


# --- polarization -------------------------------------------------------------

FUN = Declaration("codata", "Fun", (("X", V), ("Y", N)), N,
                  (Xtor("App", (), ((TVar("X"), V),), ((TVar("Y"), N),)),))


def _literals(node) -> set:
    if isinstance(node, LLit):
        return {node.value}
    out = set()
    for attr in ("body", "term", "coterm", "arg", "cont", "left_body", "right_body"):
        if hasattr(node, attr):
            out |= _literals(getattr(node, attr))
    return out


def prelude(s: Discipline, literals=()) -> Signature:
    """Core connectives plus the function type and a numeral type at discipline s."""
    sig = check_decl(core_signature(), FUN)
    nums = tuple(Xtor(str(n)) for n in sorted(set(literals)))
    return check_decl(sig, Declaration("data", "Num", (), s, nums))


@dataclass
class Polarized:
    command: Cut
    signature: Signature
    discipline: Discipline
    typed: bool
    gamma: dict
    delta: dict
    theta: dict = field(default_factory=dict)
    note: str = ""

    def program(self):
        from .surface import Entry, Hyp, Program
        g = tuple(Hyp(x, t if not isinstance(t, Discipline) else None,
                      t if isinstance(t, Discipline) else None) for x, t in self.gamma.items())
        d = tuple(Hyp(a, t if not isinstance(t, Discipline) else None,
                      t if isinstance(t, Discipline) else None) for a, t in self.delta.items())
        decls = self.signature.declared()
        return Program(decls, {}, {"main": Entry("main", self.command, tuple(self.theta.items()), g, d)})


class _Polarizer:
    def __init__(self, s: Strategy, scheme: Scheme, avoid: set):
        self.s = s
        self.S = s.discipline
        self.scheme = scheme
        self.avoid = set(avoid)
        self.sig = prelude(self.S, ())

    def fresh(self, hint):
        n = fresh(hint, self.avoid)
        self.avoid.add(n)
        return n

    def cmd(self, c: LCmd) -> Cut:
        return Cut(self.term(c.term), None, self.S, self.coterm(c.coterm))

    def term(self, v):
        S = self.S
        if isinstance(v, LVar):
            return Var(v.name)
        if isinstance(v, LLit):
            return Con(str(v.value))
        if isinstance(v, LMu):
            return Mu(v.covar, self.cmd(v.body))
        if self.scheme is Scheme.GENERIC:
            if isinstance(v, LLam):
                q = QDes(f"Force@{S.value}", coargs=(
                    QDes("App", args=(PCon(f"Wrap@{S.value}", args=(PVar(v.var),)),),
                         coargs=(QDes(f"Unwrap@{S.value}", coargs=(QVar(v.covar),)),)),))
                return flatten_cocase([(q, self.cmd(v.body))], None, self.sig)
            if isinstance(v, LInj):
                inj = "Inl" if v.index == 1 else "Inr"
                return Con(f"Delay@{S.value}", args=(Con(inj, args=(Con(f"Wrap@{S.value}", args=(self.term(v.arg),)),)),))
        elif self.s is Strategy.Q:
            if isinstance(v, LLam):
                b = self.fresh("b")
                inner = Cut(CoCase(((CoPattern("Unwrap@v", (), (), (v.covar,)), self.cmd(v.body)),)), None, N,
                            CoVar(b))
                return Con("Wrap@n", args=(CoCase(((CoPattern("App", (), (v.var,), (b,)), inner),)),))
            if isinstance(v, LInj):
                return Con("Inl" if v.index == 1 else "Inr", args=(self.term(v.arg),))
        else:
            if isinstance(v, LLam):
                y = self.fresh("y")
                body = Cut(Var(y), None, V, Case(((Pattern("Wrap@n", (), (), (v.var,)), self.cmd(v.body)),)))
                return CoCase(((CoPattern("App", (), (y,), (v.covar,)), body),))
            if isinstance(v, LInj):
                b = self.fresh("b")
                inj = Con("Inl" if v.index == 1 else "Inr", args=(Con("Wrap@n", args=(self.term(v.arg),)),))
                return CoCase(((CoPattern("Unwrap@v", (), (), (b,)), Cut(inj, None, V, CoVar(b))),))
        raise CompileError(f"cannot polarize {v!r}", rule="polarize")

    def coterm(self, e):
        S = self.S
        if isinstance(e, LCoVar):
            return CoVar(e.name)
        if isinstance(e, LMuT):
            return MuT(e.var, self.cmd(e.body))
        if self.scheme is Scheme.GENERIC:
            if isinstance(e, LApp):
                return Des(f"Force@{S.value}", coargs=(
                    Des("App", args=(Con(f"Wrap@{S.value}", args=(self.term(e.arg),)),),
                        coargs=(Des(f"Unwrap@{S.value}", coargs=(self.coterm(e.cont),)),)),))
            if isinstance(e, LCase):
                rows = []
                for inj, x, body in (("Inl", e.left, e.left_body), ("Inr", e.right, e.right_body)):
                    p = PCon(f"Delay@{S.value}", args=(PCon(inj, args=(PCon(f"Wrap@{S.value}", args=(PVar(x),)),)),))
                    rows.append((p, self.cmd(body)))
                return flatten_case(rows, None, self.sig)
        elif self.s is Strategy.Q:
            if isinstance(e, LApp):
                x = self.fresh("x")
                body = Cut(Var(x), None, N, Des("App", args=(self.term(e.arg),),
                                                coargs=(Des("Unwrap@v", coargs=(self.coterm(e.cont),)),)))
                return Case(((Pattern("Wrap@n", (), (), (x,)), body),))
            if isinstance(e, LCase):
                return Case(((Pattern("Inl", (), (), (e.left,)), self.cmd(e.left_body)),
                             (Pattern("Inr", (), (), (e.right,)), self.cmd(e.right_body))))
        else:
            if isinstance(e, LApp):
                return Des("App", args=(Con("Wrap@n", args=(self.term(e.arg),)),), coargs=(self.coterm(e.cont),))
            if isinstance(e, LCase):
                branches = []
                for inj, x, body in (("Inl", e.left, e.left_body), ("Inr", e.right, e.right_body)):
                    y = self.fresh("y")
                    inner = Cut(Var(y), None, V, Case(((Pattern("Wrap@n", (), (), (x,)), self.cmd(body)),)))
                    branches.append((Pattern(inj, (), (), (y,)), inner))
                return Des("Unwrap@v", coargs=(Case(tuple(branches)),))
        raise CompileError(f"cannot polarize {e!r}", rule="polarize")


def polarize(c: LCmd, s: Strategy, scheme: Scheme = Scheme.GENERIC, typed: bool = True) -> Polarized:
    """Translate a source command into System CD; elaborates types when it can."""
    from .typing import Mode, TypeContext, elaborate

    s = Strategy(s)
    scheme = Scheme(scheme)
    if scheme is Scheme.CLASSIC and s not in (Strategy.Q, Strategy.T):
        raise CompileError("the classic scheme covers only call-by-value and call-by-name", rule="polarize")
    p = _Polarizer(s, scheme, _lnames(c))
    p.sig = prelude(s.discipline, _literals(c))
    out = p.cmd(c)
    fv, fc = lfree(c)
    gamma = {x: s.discipline for x in sorted(fv)}
    delta = {a: s.discipline for a in sorted(fc)}
    if typed:
        try:
            el = elaborate(TypeContext(p.sig, {}, gamma, delta, Mode.TYPED), out)
            return Polarized(el.command, p.sig, s.discipline, True, el.gamma, el.delta, el.theta)
        except (TypeCheckError, SeqcoreError) as err:
            note = f"not simply typable ({err.message}); checked by discipline only"
    else:
        note = "discipline only"
    from .typing import DisciplineChecker
    DisciplineChecker(p.sig).check_command(gamma, delta, out)
    return Polarized(out, p.sig, s.discipline, False, gamma, delta, {}, note)

