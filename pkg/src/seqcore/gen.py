"""Seeded random generation of well-disciplined core commands.

Used by the determinism and substitution-closure checks and by the property
tests.  Commands carry `_` annotations; the discipline checker accepts them.
"""
from __future__ import annotations

import random
from typing import Optional

from .kinds import Signature, core_signature
from .machine import Machine
from .syntax import (
    Case, CoCase, Con, CoPattern, CoVar, Cut, Des, Discipline, Mu, MuT, Pattern, Subst, TApp, TCon, Var,
    free, substitute,
)

DISCS = tuple(Discipline)


def _closed_type(s: Discipline):
    return TApp(TCon(f"FromPos@{s.value}"), TCon("One"))


class Generator:
    """Random commands over the core signature with a pool of free (co)variables."""

    def __init__(self, seed: int = 0, sig: Optional[Signature] = None, free_names: int = 1):
        self.rng = random.Random(seed)
        self.sig = sig or core_signature()
        self.counter = 0
        self.data = {s: [d for d in self.sig.decls() if d.is_data and d.result == s] for s in DISCS}
        self.codata = {s: [d for d in self.sig.decls() if not d.is_data and d.result == s] for s in DISCS}
        self.free_vars = {f"x{s.value}{i}": s for s in DISCS for i in range(free_names)}
        self.free_covars = {f"a{s.value}{i}": s for s in DISCS for i in range(free_names)}
        self.machine = Machine(self.sig)

    def _name(self, hint: str) -> str:
        self.counter += 1
        return f"{hint}{self.counter}"

    # environments are (vars, covars) dicts name -> discipline

    def command(self, depth: int = 4, env=None) -> Cut:
        env = env or (dict(self.free_vars), dict(self.free_covars))
        s = self.rng.choice(DISCS)
        return Cut(self.term(s, depth - 1, env), None, s, self.coterm(s, depth - 1, env))

    def term(self, s: Discipline, depth: int, env):
        vs, cs = env
        opts = ["var"] if any(d == s for d in vs.values()) else []
        if self.data[s]:
            opts.append("con")
        if depth > 0:
            opts += ["mu", "con", "cocase"] if self.codata[s] else ["mu", "con"]
        kind = self.rng.choice(opts or ["con"])
        if kind == "var":
            return Var(self.rng.choice([x for x, d in vs.items() if d == s]))
        if kind == "mu":
            a = self._name("al")
            return Mu(a, self.command_at(depth - 1, (vs, {**cs, a: s})))
        if kind == "cocase":
            d = self.rng.choice(self.codata[s])
            branches = []
            for x in d.xtors:
                tvs = tuple(self._name("Y") for _ in x.quantified)
                xs = tuple(self._name("y") for _ in x.term_inputs)
                bs = tuple(self._name("be") for _ in x.coterm_inputs)
                env2 = ({**vs, **{y: t for y, (_, t) in zip(xs, x.term_inputs)}},
                        {**cs, **{b: t for b, (_, t) in zip(bs, x.coterm_inputs)}})
                branches.append((CoPattern(x.name, tvs, xs, bs), self.command_at(depth - 1, env2)))
            return CoCase(tuple(branches))
        return self._construction(s, depth, env)

    def _construction(self, s, depth, env):
        ds = self.data[s]
        if depth <= 0:
            small = [(d, x) for d in ds for x in d.xtors if self._cheap(x)]
            d, x = self.rng.choice(small) if small else (self.rng.choice(ds), None)
            if x is None:
                x = self.rng.choice(d.xtors)
        else:
            d = self.rng.choice([d for d in ds if d.xtors])
            x = self.rng.choice(d.xtors)
        tys = tuple(_closed_type(q) for _, q in x.quantified)
        args = tuple(self.value(t, max(depth - 1, 0), env) for _, t in x.term_inputs)
        coargs = tuple(self.covalue(t, max(depth - 1, 0), env) for _, t in x.coterm_inputs)
        return Con(x.name, tys, coargs, args)

    def _cheap(self, x) -> bool:
        return not x.coterm_inputs and all(t == Discipline.V for _, t in x.term_inputs) and len(x.term_inputs) <= 1

    def coterm(self, s: Discipline, depth: int, env):
        vs, cs = env
        opts = ["covar"] if any(d == s for d in cs.values()) else []
        if self.codata[s]:
            opts.append("des")
        if depth > 0:
            opts += ["mut", "des", "case"] if self.data[s] else ["mut", "des"]
        kind = self.rng.choice(opts or ["des"])
        if kind == "covar":
            return CoVar(self.rng.choice([a for a, d in cs.items() if d == s]))
        if kind == "mut":
            x = self._name("z")
            return MuT(x, self.command_at(depth - 1, ({**vs, x: s}, cs)))
        if kind == "case":
            d = self.rng.choice(self.data[s])
            branches = []
            for x in d.xtors:
                tvs = tuple(self._name("Y") for _ in x.quantified)
                xs = tuple(self._name("y") for _ in x.term_inputs)
                bs = tuple(self._name("be") for _ in x.coterm_inputs)
                env2 = ({**vs, **{y: t for y, (_, t) in zip(xs, x.term_inputs)}},
                        {**cs, **{b: t for b, (_, t) in zip(bs, x.coterm_inputs)}})
                branches.append((Pattern(x.name, tvs, bs, xs), self.command_at(depth - 1, env2)))
            return Case(tuple(branches))
        ds = self.codata[s]
        if depth <= 0:
            small = [(d, x) for d in ds for x in d.xtors if not x.term_inputs and len(x.coterm_inputs) <= 1
                     and all(t == Discipline.N for _, t in x.coterm_inputs)]
            d, x = self.rng.choice(small) if small else (self.rng.choice(ds), None)
            if x is None:
                x = self.rng.choice(d.xtors)
        else:
            d = self.rng.choice([d for d in ds if d.xtors])
            x = self.rng.choice(d.xtors)
        tys = tuple(_closed_type(q) for _, q in x.quantified)
        args = tuple(self.value(t, max(depth - 1, 0), env) for _, t in x.term_inputs)
        coargs = tuple(self.covalue(t, max(depth - 1, 0), env) for _, t in x.coterm_inputs)
        return Des(x.name, tys, args, coargs)

    def command_at(self, depth, env) -> Cut:
        s = self.rng.choice(DISCS)
        return Cut(self.term(s, depth, env), None, s, self.coterm(s, depth, env))

    def value(self, s: Discipline, depth: int, env):
        """A term that is an s-value (mostly weak), so constructions stay focused."""
        for _ in range(20):
            v = self.term(s, depth, env)
            if self.machine.is_value(v, s):
                return v
        vs, _ = env
        names = [x for x, d in vs.items() if d == s]
        if names:
            return Var(self.rng.choice(names))
        return self._construction(s, 0, env) if self.data[s] else CoCase(())

    def covalue(self, s: Discipline, depth: int, env):
        for _ in range(20):
            e = self.coterm(s, depth, env)
            if self.machine.is_covalue(e, s):
                return e
        _, cs = env
        names = [a for a, d in cs.items() if d == s]
        if names:
            return CoVar(self.rng.choice(names))
        return Case(())

    def substitution(self, c: Cut, depth: int = 2) -> Subst:
        """A well-disciplined substitution for (some of) the free names of c."""
        fv = free(c)
        env = (dict(self.free_vars), dict(self.free_covars))
        terms, coterms = {}, {}
        for x in sorted(fv.vars):
            if x in self.free_vars and self.rng.random() < 0.8:
                terms[x] = self.value(self.free_vars[x], depth, env)
        for a in sorted(fv.covars):
            if a in self.free_covars and self.rng.random() < 0.8:
                coterms[a] = self.covalue(self.free_covars[a], depth, env)
        return Subst(terms=terms, coterms=coterms)


def random_command(seed: int, depth: int = 4, sig: Optional[Signature] = None) -> Cut:
    return Generator(seed, sig).command(depth)


def random_commands(n: int, seed: int = 0, depth: int = 4) -> list:
    g = Generator(seed)
    return [g.command(depth) for _ in range(n)]


def random_substitution(seed: int, c: Cut) -> Subst:
    return Generator(seed).substitution(c)


def apply(c: Cut, rho: Subst) -> Cut:
    return substitute(c, rho)
