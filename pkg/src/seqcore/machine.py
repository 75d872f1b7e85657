"""Values, heaps and the standard reduction of System CD."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .kinds import Signature, core_signature
from .syntax import (
    CONEED, N, NEED, V, Case, CoCase, Con, CoPattern, CoTerm, CoVar, Cut, Des, Discipline,
    Mu, MuT, Pattern, Subst, Term, Var, substitute,
)


class Rule(str, Enum):
    BMU = "bmu"
    BMUT = "bmut"
    BMU_CONEED = "bmu_coneed"
    BMUT_NEED = "bmut_need"
    BP = "bp"
    BQ = "bq"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NeedFrame:
    """<term | A : need | mut bound. []>"""
    term: Term
    annotation: object
    bound: str


@dataclass(frozen=True)
class CoNeedFrame:
    """<mu bound. [] | A : coneed | coterm>"""
    bound: str
    annotation: object
    coterm: CoTerm


Frame = object


def plug(path, c: Cut) -> Cut:
    for f in reversed(path):
        if isinstance(f, NeedFrame):
            c = Cut(f.term, f.annotation, NEED, MuT(f.bound, c))
        else:
            c = Cut(Mu(f.bound, c), f.annotation, CONEED, f.coterm)
    return c


def frame_of(c: Cut):
    """Split a frame-shaped command into (frame, hole contents), or None."""
    if c.disc is NEED and isinstance(c.coterm, MuT):
        return NeedFrame(c.term, c.type, c.coterm.var), c.coterm.body
    if c.disc is CONEED and isinstance(c.term, Mu):
        return CoNeedFrame(c.term.covar, c.type, c.coterm), c.term.body
    return None


@dataclass(frozen=True)
class StepResult:
    next: Cut
    rule: Rule
    path: tuple = ()

    @property
    def depth(self) -> int:
        return len(self.path)


class Status(str, Enum):
    FINISHED = "finished"
    STUCK = "stuck"
    TIMEOUT = "timeout"

    def __str__(self):
        return self.value


@dataclass
class Observation:
    status: Status
    needed: frozenset
    steps: int
    eyes: dict = field(default_factory=dict)
    final: Optional[Cut] = None
    trace: list = field(default_factory=list)

    def summary(self) -> tuple:
        return (self.status, self.needed)


class Machine:
    def __init__(self, sig: Optional[Signature] = None):
        self.sig = sig if sig is not None else core_signature()

    # -- classification ------------------------------------------------------

    def is_weak(self, v: Term) -> bool:
        """W: variables, cocases, and constructions over focused arguments."""
        if isinstance(v, (Var, CoCase)):
            return True
        if isinstance(v, Con):
            info = self.sig.xtor(v.name)
            if info is None:
                return False
            d, i = info
            x = d.xtors[i]
            if not d.is_data or len(x.term_inputs) != len(v.args) or len(x.coterm_inputs) != len(v.coargs):
                return False
            return (all(self.is_value(a, s) for a, (_, s) in zip(v.args, x.term_inputs))
                    and all(self.is_covalue(e, s) for e, (_, s) in zip(v.coargs, x.coterm_inputs)))
        return False

    def is_coweak(self, e: CoTerm) -> bool:
        """F: covariables, cases, and destructions over focused arguments."""
        if isinstance(e, (CoVar, Case)):
            return True
        if isinstance(e, Des):
            info = self.sig.xtor(e.name)
            if info is None:
                return False
            d, i = info
            x = d.xtors[i]
            if d.is_data or len(x.term_inputs) != len(e.args) or len(x.coterm_inputs) != len(e.coargs):
                return False
            return (all(self.is_value(a, s) for a, (_, s) in zip(e.args, x.term_inputs))
                    and all(self.is_covalue(c, s) for c, (_, s) in zip(e.coargs, x.coterm_inputs)))
        return False

    def is_value(self, v: Term, s: Discipline) -> bool:
        if s is N:
            return True
        if self.is_weak(v):
            return True
        return s is CONEED and isinstance(v, Mu) and self._delivers(v.body, v.covar)

    def is_covalue(self, e: CoTerm, s: Discipline) -> bool:
        if s is V:
            return True
        if self.is_coweak(e):
            return True
        return s is NEED and isinstance(e, MuT) and self._forces(e.body, e.var)

    def _delivers(self, c: Cut, a: str) -> bool:
        """c = H[<V | coneed | a>] with a not bound by H."""
        while True:
            if (c.disc is CONEED and isinstance(c.coterm, CoVar) and c.coterm.name == a
                    and self.is_value(c.term, CONEED)):
                return True
            split = frame_of(c)
            if split is None:
                return False
            fr, c = split
            if isinstance(fr, CoNeedFrame) and fr.bound == a:
                return False

    def _forces(self, c: Cut, x: str) -> bool:
        """c = H[<x | need | E>] with x not bound by H."""
        while True:
            if (c.disc is NEED and isinstance(c.term, Var) and c.term.name == x
                    and self.is_covalue(c.coterm, NEED)):
                return True
            split = frame_of(c)
            if split is None:
                return False
            fr, c = split
            if isinstance(fr, NeedFrame) and fr.bound == x:
                return False

    # -- rules ---------------------------------------------------------------

    def _try(self, rule: Rule, c: Cut) -> Optional[Cut]:
        v, e, s = c.term, c.coterm, c.disc
        if rule is Rule.BMU:
            if isinstance(v, Mu) and s in (V, N, NEED) and self.is_covalue(e, s):
                return substitute(v.body, Subst(coterms={v.covar: e}))
        elif rule is Rule.BMUT:
            if isinstance(e, MuT) and s in (V, N, CONEED) and self.is_value(v, s):
                return substitute(e.body, Subst(terms={e.var: v}))
        elif rule is Rule.BMUT_NEED:
            if (s is NEED and isinstance(e, MuT) and not isinstance(v, Var)
                    and self.is_weak(v) and self.is_covalue(e, NEED)):
                return substitute(e.body, Subst(terms={e.var: v}))
        elif rule is Rule.BMU_CONEED:
            if (s is CONEED and isinstance(v, Mu) and not isinstance(e, CoVar)
                    and self.is_coweak(e) and self.is_value(v, CONEED)):
                return substitute(v.body, Subst(coterms={v.covar: e}))
        elif rule is Rule.BP:
            if isinstance(v, Con) and isinstance(e, Case) and self.is_weak(v):
                for p, body in e.branches:
                    if p.xtor == v.name and len(p.vars) == len(v.args) \
                            and len(p.covars) == len(v.coargs) and len(p.tyvars) == len(v.tyargs):
                        return substitute(body, Subst(dict(zip(p.tyvars, v.tyargs)),
                                                      dict(zip(p.vars, v.args)),
                                                      dict(zip(p.covars, v.coargs))))
        elif rule is Rule.BQ:
            if isinstance(e, Des) and isinstance(v, CoCase) and self.is_coweak(e):
                for q, body in v.branches:
                    if q.xtor == e.name and len(q.vars) == len(e.args) \
                            and len(q.covars) == len(e.coargs) and len(q.tyvars) == len(e.tyargs):
                        return substitute(body, Subst(dict(zip(q.tyvars, e.tyargs)),
                                                      dict(zip(q.vars, e.args)),
                                                      dict(zip(q.covars, e.coargs))))
        return None

    _ORDER = (Rule.BMU, Rule.BMUT, Rule.BMUT_NEED, Rule.BMU_CONEED, Rule.BP, Rule.BQ)

    def _top(self, c: Cut):
        for r in self._ORDER:
            nxt = self._try(r, c)
            if nxt is not None:
                return r, nxt
        return None

    def step(self, c: Cut) -> Optional[StepResult]:
        path = []
        cur = c
        while True:
            hit = self._top(cur)
            if hit is not None:
                rule, nxt = hit
                return StepResult(plug(path, nxt), rule, tuple(path))
            split = frame_of(cur)
            if split is None:
                return None
            fr, cur = split
            path.append(fr)

    def applicable(self, c: Cut) -> list[tuple[Rule, int]]:
        """Every (rule, heap depth) whose side conditions hold; used to probe determinism."""
        out = []
        cur, depth = c, 0
        while True:
            for r in Rule:
                if self._try(r, cur) is not None:
                    out.append((r, depth))
            split = frame_of(cur)
            if split is None:
                return out
            cur = split[1]
            depth += 1

    # -- observation ---------------------------------------------------------

    def needed_with_eyes(self, c: Cut) -> dict:
        """Map each needed name to its eye; empty when c can step."""
        if self.step(c) is not None:
            return {}
        eyes: dict = {}
        bound_v: set = set()
        bound_c: set = set()
        cur = c
        while True:
            v, e, s = cur.term, cur.coterm, cur.disc
            if isinstance(v, Var) and v.name not in bound_v and self.is_covalue(e, s):
                eyes.setdefault(v.name, e)
            if isinstance(e, CoVar) and e.name not in bound_c and self.is_value(v, s):
                eyes.setdefault(e.name, v)
            split = frame_of(cur)
            if split is None:
                return eyes
            fr, cur = split
            if isinstance(fr, NeedFrame):
                bound_v.add(fr.bound)
            else:
                bound_c.add(fr.bound)

    def needed(self, c: Cut) -> frozenset:
        return frozenset(self.needed_with_eyes(c))

    def status(self, c: Cut) -> Optional[Status]:
        """None when c steps, otherwise finished or stuck."""
        if self.step(c) is not None:
            return None
        return Status.FINISHED if self.needed(c) else Status.STUCK

    def run(self, c: Cut, fuel: int = 10_000, trace: bool = False,
            check: Optional[Callable[[Cut], None]] = None) -> Observation:
        steps = 0
        log = []
        cur = c
        if check:
            check(cur)
        while True:
            r = self.step(cur)
            if r is None:
                eyes = self.needed_with_eyes(cur)
                st = Status.FINISHED if eyes else Status.STUCK
                return Observation(st, frozenset(eyes), steps, eyes, cur, log)
            if steps >= fuel:
                return Observation(Status.TIMEOUT, frozenset(), steps, {}, cur, log)
            steps += 1
            cur = r.next
            if trace:
                log.append(r)
            if check:
                check(cur)


_default = None


def default_machine() -> Machine:
    global _default
    if _default is None:
        _default = Machine()
    return _default


def is_value(v: Term, s: Discipline, sig: Optional[Signature] = None) -> bool:
    return (Machine(sig) if sig else default_machine()).is_value(v, s)


def is_covalue(e: CoTerm, s: Discipline, sig: Optional[Signature] = None) -> bool:
    return (Machine(sig) if sig else default_machine()).is_covalue(e, s)


def step(c: Cut, sig: Optional[Signature] = None) -> Optional[StepResult]:
    return (Machine(sig) if sig else default_machine()).step(c)


def needed(c: Cut, sig: Optional[Signature] = None) -> frozenset:
    return (Machine(sig) if sig else default_machine()).needed(c)


def run(c: Cut, fuel: int = 10_000, trace: bool = False, sig: Optional[Signature] = None,
        check=None) -> Observation:
    return (Machine(sig) if sig else default_machine()).run(c, fuel, trace, check)
