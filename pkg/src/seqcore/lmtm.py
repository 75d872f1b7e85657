"""Abstract syntax of the lambda-mu-mu-tilde source calculus with sums."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class LVar:
    name: str


@dataclass(frozen=True)
class LMu:
    covar: str
    body: "LCmd"


@dataclass(frozen=True)
class LLam:
    """mu(x . alpha).c, a function abstraction over a call stack."""
    var: str
    covar: str
    body: "LCmd"


@dataclass(frozen=True)
class LInj:
    index: int  # 1 or 2
    arg: "LTerm"


@dataclass(frozen=True)
class LLit:
    value: int


@dataclass(frozen=True)
class LCoVar:
    name: str


@dataclass(frozen=True)
class LMuT:
    var: str
    body: "LCmd"


@dataclass(frozen=True)
class LApp:
    """A call stack v . e."""
    arg: "LTerm"
    cont: "LCoTerm"


@dataclass(frozen=True)
class LCase:
    left: str
    left_body: "LCmd"
    right: str
    right_body: "LCmd"


@dataclass(frozen=True)
class LCmd:
    term: "LTerm"
    coterm: "LCoTerm"


LTerm = Union[LVar, LMu, LLam, LInj, LLit]
LCoTerm = Union[LCoVar, LMuT, LApp, LCase]


@dataclass
class LProgram:
    definitions: dict   # name -> LTerm
    entries: dict       # name -> LCmd
