"""Concrete syntax: parsing and printing of `.cd` programs and `.lmtm` sources.

The `.cd` grammar, informally::

    program  ::= item*
    item     ::= ('data' | 'codata') F (X:k)* : S 'where' xtor*
               | 'def' x ':' TYPE ':' S '=' term
               | 'codef' a ':' TYPE ':' S '=' coterm
               | 'cmd' NAME ('{' X:k, ... '}')? ('(' x : TYPE (: S)?, ... ')')?
                            ('[' a : TYPE (: S)?, ... ']')? '=' command
    xtor     ::= K ':' ('[' Y:S ']')* ('(' A, ... ')')? ('|-' | '-|') ('(' B, ... ')')? ';'
    command  ::= '<' term '|' TYPE ':' S '|' coterm '>'      (TYPE may be `_`)

Comments run from `--` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError
from .kinds import Signature, check_decl, core_signature
from .lmtm import LApp, LCase, LCmd, LCoVar, LInj, LLam, LLit, LMu, LMuT, LProgram, LVar
from .syntax import (
    Case, CoCase, Con, CoPattern, CoVar, Cut, Declaration, Des, Discipline, KArrow, Kind, Mu,
    MuT, Pattern, Subst, TApp, TCon, TLam, TMeta, TVar, TypeExpr, Var, Xtor, kind_str,
    substitute,
)

INFIX = {"(+)": "Sum", "(*)": "Tensor", "(&)": "With", "(|)": "Par"}
KEYWORDS = {"data", "codata", "where", "def", "codef", "cmd", "mu", "mut", "case", "cocase"}
DISC_WORDS = {"v", "n", "need", "coneed"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<infix>\(\+\)|\(\*\)|\(&\)|\(\|\))
  | (?P<sym>\|-|-\||=>|->|[<>|{}\[\]().,:;=\\_])
  | (?P<num>[0-9]+)
  | (?P<id>[A-Za-z][A-Za-z0-9_']*(?:@(?:coneed|need|v|n)(?![A-Za-z0-9_]))?)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str   # id, num, sym, infix, eof
    text: str
    pos: int
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, lstart = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1,
                             span=(pos, pos + 1))
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append(Token(kind, tok, pos, line, pos - lstart + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            lstart = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", pos, line, pos - lstart + 1))
    return out


def is_xtor_name(name: str) -> bool:
    return name[:1].isupper() or name[:1].isdigit()


# --- program structure -----------------------------------------------------

@dataclass(frozen=True)
class Hyp:
    name: str
    type: Optional[TypeExpr]
    disc: Optional[Discipline] = None


@dataclass(frozen=True)
class Entry:
    name: str
    command: Cut
    theta: tuple = ()   # of (name, Kind)
    gamma: tuple = ()   # of Hyp
    delta: tuple = ()   # of Hyp


@dataclass(frozen=True)
class Definition:
    name: str
    body: object
    type: Optional[TypeExpr]
    disc: Discipline
    is_coterm: bool = False


@dataclass
class Program:
    declarations: list = field(default_factory=list)
    definitions: dict = field(default_factory=dict)
    entries: dict = field(default_factory=dict)

    def signature(self, base: Optional[Signature] = None) -> Signature:
        sig = base if base is not None else core_signature()
        for d in self.declarations:
            sig = check_decl(sig, d)
        return sig

    def inlined(self, node):
        """Expand definition references (macro semantics)."""
        for d in self.expanded_definitions():
            key = "coterms" if d.is_coterm else "terms"
            node = substitute(node, Subst(**{key: {d.name: d.body}}))
        return node

    def expanded_definitions(self) -> list:
        done = []
        for d in self.definitions.values():
            body = d.body
            for prev in done:
                key = "coterms" if prev.is_coterm else "terms"
                body = substitute(body, Subst(**{key: {prev.name: prev.body}}))
            done.append(Definition(d.name, body, d.type, d.disc, d.is_coterm))
        return done

    def entry(self, name: str = "main") -> Entry:
        if name not in self.entries:
            raise KeyError(f"no entry named {name!r}")
        e = self.entries[name]
        return Entry(e.name, self.inlined(e.command), e.theta, e.gamma, e.delta)


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, connectives=()):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.connectives = {d.name for d in core_signature().decls()}
        self.connectives |= set(connectives)
        for j, t in enumerate(self.toks[:-1]):
            if t.text in ("data", "codata") and self.toks[j + 1].kind == "id":
                self.connectives.add(self.toks[j + 1].text)
        self.scope: list[set] = [set()]

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, expected):
        t = self.tok
        what = t.text or "end of input"
        raise ParseError(f"unexpected {what!r}, expected {' or '.join(sorted(expected))}",
                         t.line, t.col, expected, span=(t.pos, t.pos + len(t.text)))

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "id", "infix")

    def eat(self, text) -> Token:
        if not self.at(text):
            self.error([repr(text)])
        t = self.tok
        self.i += 1
        return t

    def maybe(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def lower(self, what="name") -> str:
        t = self.tok
        if t.kind == "id" and not is_xtor_name(t.text) and t.text not in KEYWORDS:
            self.i += 1
            return t.text
        self.error([what])

    def upper(self, what="name") -> str:
        t = self.tok
        if (t.kind == "id" and is_xtor_name(t.text)) or t.kind == "num":
            self.i += 1
            return t.text
        self.error([what])

    def end_pos(self) -> int:
        prev = self.toks[self.i - 1]
        return prev.pos + len(prev.text)

    # kinds and disciplines
    def disc(self) -> Discipline:
        t = self.tok
        if t.kind == "id" and t.text in DISC_WORDS:
            self.i += 1
            return Discipline(t.text)
        self.error(["v", "n", "need", "coneed"])

    def kind(self) -> Kind:
        if self.maybe("("):
            k = self.kind()
            self.eat(")")
        else:
            k = self.disc()
        if self.maybe("->"):
            return KArrow(k, self.kind())
        return k

    # types
    def bound_types(self) -> set:
        return set().union(*self.scope)

    def type_(self) -> TypeExpr:
        left = self.type_app()
        if self.tok.kind == "infix":
            op = INFIX[self.tok.text]
            self.i += 1
            right = self.type_()
            return TApp(TApp(TCon(op), left), right)
        return left

    def _type_atom_start(self) -> bool:
        t = self.tok
        return (t.kind == "id" and is_xtor_name(t.text)) or t.text in ("(", "\\")

    def type_app(self) -> TypeExpr:
        if not self._type_atom_start():
            self.error(["type"])
        bare_lambda = self.tok.text == "\\"
        head = self.type_atom()
        while self._type_atom_start() and not bare_lambda:
            head = TApp(head, self.type_atom())
        return head

    def type_atom(self) -> TypeExpr:
        t = self.tok
        if t.text == "(":
            self.i += 1
            ty = self.type_()
            self.eat(")")
            return ty
        if t.text == "\\":
            self.i += 1
            x = self.upper("type variable")
            self.eat(":")
            k = self.kind()
            self.eat(".")
            self.scope.append({x})
            body = self.type_()
            self.scope.pop()
            return TLam(x, k, body)
        name = self.upper("type")
        if name in self.connectives and name not in self.bound_types():
            return TCon(name)
        return TVar(name)

    def annotation(self) -> Optional[TypeExpr]:
        if self.maybe("_"):
            return None
        return self.type_()

    # commands, terms, coterms
    def command(self) -> Cut:
        start = self.eat("<").pos
        v = self.term()
        self.eat("|")
        ty = self.annotation()
        self.eat(":")
        s = self.disc()
        self.eat("|")
        e = self.coterm()
        self.eat(">")
        return Cut(v, ty, s, e, (start, self.end_pos()))

    def _types_group(self) -> tuple:
        out = []
        if self.maybe("{"):
            if not self.at("}"):
                out.append(self.type_())
                while self.maybe(","):
                    out.append(self.type_())
            self.eat("}")
        return tuple(out)

    def _group(self, open_, close, item) -> tuple:
        out = []
        if self.maybe(open_):
            if not self.at(close):
                out.append(item())
                while self.maybe(","):
                    out.append(item())
            self.eat(close)
        return tuple(out)

    def term(self):
        t = self.tok
        start = t.pos
        if t.text == "mu" and t.kind == "id":
            self.i += 1
            a = self.lower("covariable")
            self.eat(".")
            c = self.command()
            return Mu(a, c, (start, self.end_pos()))
        if t.text == "cocase" and t.kind == "id":
            self.i += 1
            branches = self._branches(self.copattern)
            return CoCase(branches, (start, self.end_pos()))
        if t.text == "(":
            self.i += 1
            v = self.term()
            self.eat(")")
            return v
        if t.kind == "num" or (t.kind == "id" and is_xtor_name(t.text)):
            self.i += 1
            tys = self._types_group()
            coargs = self._group("[", "]", self.coterm)
            args = self._group("(", ")", self.term)
            return Con(t.text, tys, coargs, args, (start, self.end_pos()))
        if t.kind == "id" and t.text not in KEYWORDS:
            self.i += 1
            return Var(self.lower_check(t), (start, self.end_pos()))
        self.error(["term"])

    def lower_check(self, t: Token) -> str:
        return t.text

    def coterm(self):
        t = self.tok
        start = t.pos
        if t.text == "mut" and t.kind == "id":
            self.i += 1
            x = self.lower("variable")
            self.eat(".")
            c = self.command()
            return MuT(x, c, (start, self.end_pos()))
        if t.text == "case" and t.kind == "id":
            self.i += 1
            branches = self._branches(self.pattern)
            return Case(branches, (start, self.end_pos()))
        if t.text == "(":
            self.i += 1
            e = self.coterm()
            self.eat(")")
            return e
        if t.kind == "num" or (t.kind == "id" and is_xtor_name(t.text)):
            self.i += 1
            tys = self._types_group()
            args = self._group("(", ")", self.term)
            coargs = self._group("[", "]", self.coterm)
            return Des(t.text, tys, args, coargs, (start, self.end_pos()))
        if t.kind == "id" and t.text not in KEYWORDS:
            self.i += 1
            return CoVar(t.text, (start, self.end_pos()))
        self.error(["coterm"])

    def _names(self, open_, close, item) -> tuple:
        return self._group(open_, close, item)

    def pattern(self):
        k = self.upper("constructor")
        tvs = self._names("{", "}", lambda: self.upper("type variable"))
        cvs = self._names("[", "]", self.lower)
        vs = self._names("(", ")", self.lower)
        return Pattern(k, tvs, cvs, vs), tvs

    def copattern(self):
        k = self.upper("destructor")
        tvs = self._names("{", "}", lambda: self.upper("type variable"))
        vs = self._names("(", ")", self.lower)
        cvs = self._names("[", "]", self.lower)
        return CoPattern(k, tvs, vs, cvs), tvs

    def _branches(self, pat) -> tuple:
        self.eat("{")
        out = []
        if not self.at("}"):
            while True:
                p, tvs = pat()
                self.eat("=>")
                self.scope.append(set(tvs))
                c = self.command()
                self.scope.pop()
                out.append((p, c))
                if not self.maybe("|"):
                    break
        self.eat("}")
        return tuple(out)

    # items
    def program(self) -> Program:
        prog = Program()
        names = set()
        while self.tok.kind != "eof":
            t = self.tok
            if t.text in ("data", "codata"):
                d = self.declaration()
                if d.name in names:
                    raise ParseError(f"duplicate name {d.name}", t.line, t.col)
                names.add(d.name)
                prog.declarations.append(d)
            elif t.text in ("def", "codef"):
                d = self.definition()
                if d.name in prog.definitions:
                    raise ParseError(f"duplicate definition {d.name}", t.line, t.col)
                prog.definitions[d.name] = d
            elif t.text == "cmd":
                e = self.entry()
                if e.name in prog.entries:
                    raise ParseError(f"duplicate entry {e.name}", t.line, t.col)
                prog.entries[e.name] = e
            else:
                self.error(["data", "codata", "def", "codef", "cmd"])
        return prog

    def declaration(self) -> Declaration:
        pol = self.tok.text
        self.i += 1
        name = self.upper("connective name")
        params = []
        while self.maybe("("):
            x = self.upper("type parameter")
            self.eat(":")
            params.append((x, self.kind()))
            self.eat(")")
        self.eat(":")
        result = self.disc()
        self.eat("where")
        xtors = []
        pnames = {p for p, _ in params}
        while (self.tok.kind == "num" or (self.tok.kind == "id" and is_xtor_name(self.tok.text))) \
                and self.peek().text == ":":
            xtors.append(self.xtor(pol, pnames))
        return Declaration(pol, name, tuple(params), result, tuple(xtors))

    def _component(self):
        ty = self.type_()
        s = self.disc() if self.maybe(":") else None
        return (ty, s)

    def xtor(self, pol, pnames) -> Xtor:
        name = self.upper("xtor name")
        self.eat(":")
        quants = []
        while self.maybe("["):
            while True:
                y = self.upper("type variable")
                self.eat(":")
                quants.append((y, self.disc()))
                if not self.maybe(","):
                    break
            self.eat("]")
        self.scope.append(pnames | {y for y, _ in quants})
        left = self._group("(", ")", self._component)
        turn = "|-" if pol == "data" else "-|"
        if not self.at(turn):
            self.error([repr(turn)])
        self.i += 1
        right = self._group("(", ")", self._component)
        self.scope.pop()
        self.eat(";")
        return Xtor(name, tuple(quants), left, right)

    def definition(self) -> Definition:
        co = self.tok.text == "codef"
        self.i += 1
        name = self.lower("definition name")
        self.eat(":")
        ty = self.annotation()
        self.eat(":")
        s = self.disc()
        self.eat("=")
        body = self.coterm() if co else self.term()
        return Definition(name, body, ty, s, co)

    def _hyp(self) -> Hyp:
        x = self.lower()
        self.eat(":")
        ty = self.annotation()
        s = self.disc() if self.maybe(":") else None
        if ty is None and s is None:
            self.error(["':' discipline"])
        return Hyp(x, ty, s)

    def _tybind(self):
        x = self.upper("type variable")
        self.eat(":")
        return (x, self.kind())

    def entry(self) -> Entry:
        self.eat("cmd")
        t = self.tok
        if t.kind != "id":
            self.error(["entry name"])
        self.i += 1
        theta = self._group("{", "}", self._tybind)
        self.scope.append({x for x, _ in theta})
        gamma = self._group("(", ")", self._hyp)
        delta = self._group("[", "]", self._hyp)
        self.eat("=")
        c = self.command()
        self.scope.pop()
        return Entry(t.text, c, theta, gamma, delta)


def parse_program(text: str, connectives=()) -> Program:
    return _Parser(text, connectives).program()


def parse_command(text: str, connectives=()) -> Cut:
    p = _Parser(text, connectives)
    c = p.command()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return c


def parse_term(text: str, connectives=()):
    p = _Parser(text, connectives)
    v = p.term()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return v


def parse_coterm(text: str, connectives=()):
    p = _Parser(text, connectives)
    e = p.coterm()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return e


def parse_type(text: str, connectives=()) -> Optional[TypeExpr]:
    p = _Parser(text, connectives)
    t = p.annotation()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return t


def parse_kind(text: str) -> Kind:
    p = _Parser(text)
    k = p.kind()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return k


# --- printer ---------------------------------------------------------------

def print_type(t: Optional[TypeExpr]) -> str:
    if t is None:
        return "_"
    if isinstance(t, (TVar, TCon)):
        return t.name
    if isinstance(t, TMeta):
        return f"?{t.ident}"
    if isinstance(t, TLam):
        return f"\\{t.var}:{kind_str(t.kind)}. {print_type(t.body)}"
    parts = []
    head = t
    while isinstance(head, TApp):
        parts.append(head.arg)
        head = head.fun
    parts.reverse()
    h = print_type(head)
    if isinstance(head, TLam):
        h = f"({h})"
    return " ".join([h] + [_type_arg(a) for a in parts])


def _type_arg(t) -> str:
    s = print_type(t)
    return f"({s})" if isinstance(t, (TApp, TLam)) else s


def _csv(items) -> str:
    return ", ".join(items)


def print_term(v) -> str:
    if isinstance(v, Var):
        return v.name
    if isinstance(v, Mu):
        return f"mu {v.covar}. {print_command(v.body)}"
    if isinstance(v, Con):
        s = v.name
        if v.tyargs:
            s += "{" + _csv(print_type(t) for t in v.tyargs) + "}"
        if v.coargs:
            s += "[" + _csv(print_coterm(e) for e in v.coargs) + "]"
        if v.args:
            s += "(" + _csv(print_term(a) for a in v.args) + ")"
        return s
    if isinstance(v, CoCase):
        return "cocase {" + " |".join(f" {print_pattern(q)} => {print_command(c)}"
                                      for q, c in v.branches) + (" }" if v.branches else "}")
    raise TypeError(f"not a term: {v!r}")


def print_coterm(e) -> str:
    if isinstance(e, CoVar):
        return e.name
    if isinstance(e, MuT):
        return f"mut {e.var}. {print_command(e.body)}"
    if isinstance(e, Des):
        s = e.name
        if e.tyargs:
            s += "{" + _csv(print_type(t) for t in e.tyargs) + "}"
        if e.args:
            s += "(" + _csv(print_term(a) for a in e.args) + ")"
        if e.coargs:
            s += "[" + _csv(print_coterm(x) for x in e.coargs) + "]"
        return s
    if isinstance(e, Case):
        return "case {" + " |".join(f" {print_pattern(p)} => {print_command(c)}"
                                    for p, c in e.branches) + (" }" if e.branches else "}")
    raise TypeError(f"not a coterm: {e!r}")


def print_pattern(p) -> str:
    s = p.xtor
    if p.tyvars:
        s += "{" + _csv(p.tyvars) + "}"
    if isinstance(p, Pattern):
        if p.covars:
            s += "[" + _csv(p.covars) + "]"
        if p.vars:
            s += "(" + _csv(p.vars) + ")"
    else:
        if p.vars:
            s += "(" + _csv(p.vars) + ")"
        if p.covars:
            s += "[" + _csv(p.covars) + "]"
    return s


def print_command(c: Cut) -> str:
    return f"< {print_term(c.term)} | {print_type(c.type)} : {c.disc.value} | {print_coterm(c.coterm)} >"


def _component(t, s) -> str:
    return print_type(t) if s is None else f"{print_type(t)} : {s.value}"


def print_declaration(d: Declaration, show_disciplines: bool = False) -> str:
    head = f"{d.polarity} {d.name}"
    for x, k in d.params:
        head += f" ({x}:{kind_str(k)})"
    head += f" : {d.result.value} where"
    lines = [head]
    turn = "|-" if d.is_data else "-|"
    for x in d.xtors:
        s = f"  {x.name} :"
        for y, q in x.quantified:
            s += f" [{y}:{q.value}]"
        comp = (lambda t, q: _component(t, q if show_disciplines else None))
        if x.term_inputs:
            s += " (" + _csv(comp(t, q) for t, q in x.term_inputs) + ")"
        s += f" {turn}"
        if x.coterm_inputs:
            s += " (" + _csv(comp(t, q) for t, q in x.coterm_inputs) + ")"
        lines.append(s + " ;")
    return "\n".join(lines)


def _print_hyp(h: Hyp) -> str:
    s = f"{h.name} : {print_type(h.type)}"
    if h.disc is not None:
        s += f" : {h.disc.value}"
    return s


def print_entry(e: Entry) -> str:
    s = f"cmd {e.name}"
    if e.theta:
        s += " {" + _csv(f"{x}:{kind_str(k)}" for x, k in e.theta) + "}"
    if e.gamma:
        s += " (" + _csv(_print_hyp(h) for h in e.gamma) + ")"
    if e.delta:
        s += " [" + _csv(_print_hyp(h) for h in e.delta) + "]"
    return s + " =\n  " + print_command(e.command)


def print_definition(d: Definition) -> str:
    kw = "codef" if d.is_coterm else "def"
    body = print_coterm(d.body) if d.is_coterm else print_term(d.body)
    return f"{kw} {d.name} : {print_type(d.type)} : {d.disc.value} =\n  {body}"


def print_program(p: Program) -> str:
    parts = [print_declaration(d) for d in p.declarations]
    parts += [print_definition(d) for d in p.definitions.values()]
    parts += [print_entry(e) for e in p.entries.values()]
    return "\n\n".join(parts) + "\n"


def print_node(node) -> str:
    if isinstance(node, Cut):
        return print_command(node)
    if isinstance(node, (Var, Mu, Con, CoCase)):
        return print_term(node)
    if isinstance(node, (CoVar, MuT, Des, Case)):
        return print_coterm(node)
    if isinstance(node, Declaration):
        return print_declaration(node)
    if isinstance(node, Program):
        return print_program(node)
    if isinstance(node, (LCmd, LVar, LMu, LLam, LInj, LLit, LCoVar, LMuT, LApp, LCase)):
        return print_lmtm(node)
    return print_type(node)


print_ = print_node


# --- the lambda-mu-mu-tilde language ----------------------------------------

LMTM_KEYWORDS = {"mu", "mut", "case", "inl", "inr", "def", "cmd"}


class _LParser(_Parser):
    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.connectives = set()
        self.scope = [set()]

    def lname(self, what="name") -> str:
        t = self.tok
        if t.kind == "id" and not is_xtor_name(t.text) and t.text not in LMTM_KEYWORDS:
            self.i += 1
            return t.text
        self.error([what])

    def lcommand(self) -> LCmd:
        self.eat("<")
        v = self.lterm()
        self.eat("|")
        e = self.lcoterm()
        self.eat(">")
        return LCmd(v, e)

    def lterm(self):
        t = self.tok
        if t.text == "(":
            self.i += 1
            v = self.lterm()
            self.eat(")")
            return v
        if t.text == "mu":
            self.i += 1
            a = self.lname("covariable")
            self.eat(".")
            return LMu(a, self.lcommand())
        if t.text == "\\":
            self.i += 1
            self.eat("(")
            x = self.lname("variable")
            self.eat(",")
            a = self.lname("covariable")
            self.eat(")")
            self.eat(".")
            return LLam(x, a, self.lcommand())
        if t.text in ("inl", "inr"):
            self.i += 1
            return LInj(1 if t.text == "inl" else 2, self.lterm())
        if t.kind == "num":
            self.i += 1
            return LLit(int(t.text))
        return LVar(self.lname("term"))

    def lcoterm(self):
        t = self.tok
        if t.text == "mut":
            self.i += 1
            x = self.lname("variable")
            self.eat(".")
            return LMuT(x, self.lcommand())
        if t.text == "case":
            self.i += 1
            self.eat("{")
            self.eat("inl")
            x = self.lname()
            self.eat("=>")
            c1 = self.lcommand()
            self.eat("|")
            self.eat("inr")
            y = self.lname()
            self.eat("=>")
            c2 = self.lcommand()
            self.eat("}")
            return LCase(x, c1, y, c2)
        save = self.i
        try:
            v = self.lterm()
            if self.at("."):
                self.i += 1
                return LApp(v, self.lcoterm())
        except ParseError:
            pass
        self.i = save
        if self.maybe("("):
            e = self.lcoterm()
            self.eat(")")
            return e
        return LCoVar(self.lname("coterm"))

    def lprogram(self) -> LProgram:
        prog = LProgram({}, {})
        while self.tok.kind != "eof":
            if self.maybe("def"):
                name = self.lname("definition name")
                self.eat("=")
                prog.definitions[name] = self.lterm()
            elif self.maybe("cmd"):
                t = self.tok
                if t.kind != "id":
                    self.error(["entry name"])
                self.i += 1
                self.eat("=")
                prog.entries[t.text] = self.lcommand()
            else:
                self.error(["def", "cmd"])
        return prog


def parse_lmtm_program(text: str) -> LProgram:
    return _LParser(text).lprogram()


def parse_lmtm(text: str) -> LCmd:
    p = _LParser(text)
    c = p.lcommand()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return c


def print_lmtm(node) -> str:
    if isinstance(node, LCmd):
        return f"< {print_lmtm(node.term)} | {print_lmtm(node.coterm)} >"
    if isinstance(node, LVar):
        return node.name
    if isinstance(node, LMu):
        return f"mu {node.covar}. {print_lmtm(node.body)}"
    if isinstance(node, LLam):
        return f"\\({node.var}, {node.covar}). {print_lmtm(node.body)}"
    if isinstance(node, LInj):
        arg = print_lmtm(node.arg)
        if not isinstance(node.arg, (LVar, LLit)):
            arg = f"({arg})"
        return f"{'inl' if node.index == 1 else 'inr'} {arg}"
    if isinstance(node, LLit):
        return str(node.value)
    if isinstance(node, LCoVar):
        return node.name
    if isinstance(node, LMuT):
        return f"mut {node.var}. {print_lmtm(node.body)}"
    if isinstance(node, LApp):
        arg = print_lmtm(node.arg)
        if not isinstance(node.arg, (LVar, LLit)):
            arg = f"({arg})"
        return f"{arg} . {print_lmtm(node.cont)}"
    if isinstance(node, LCase):
        return (f"case {{ inl {node.left} => {print_lmtm(node.left_body)} | "
                f"inr {node.right} => {print_lmtm(node.right_body)} }}")
    raise TypeError(f"not a lambda-mu-mu-tilde node: {node!r}")


def print_lmtm_program(p: LProgram) -> str:
    parts = [f"def {n} = {print_lmtm(t)}" for n, t in p.definitions.items()]
    parts += [f"cmd {n} = {print_lmtm(c)}" for n, c in p.entries.items()]
    return "\n".join(parts) + "\n"


def inline_lmtm(p: LProgram, c: LCmd) -> LCmd:
    """Replace references to definitions by their bodies."""
    from .frontend import lsubst
    for name, body in reversed(list(p.definitions.items())):
        c = lsubst(c, {name: body}, {})
    return c
