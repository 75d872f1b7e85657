"""Exception hierarchy shared by every stage."""
from __future__ import annotations


class SeqcoreError(Exception):
    """Base error; `rule` names the failed rule, `span` is a (start, end) offset pair."""

    def __init__(self, message: str, rule: str | None = None, span=None):
        super().__init__(message)
        self.message = message
        self.rule = rule
        self.span = span

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message,
                "rule": self.rule, "span": list(self.span) if self.span else None}


class ParseError(SeqcoreError):
    def __init__(self, message, line=0, column=0, expected=(), span=None):
        super().__init__(f"{line}:{column}: {message}", rule="parse", span=span)
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(line=self.line, column=self.column, expected=list(self.expected))
        return d


class KindError(SeqcoreError):
    pass


class TypeCheckError(SeqcoreError):
    pass


class CompileError(SeqcoreError):
    pass


class IsoError(SeqcoreError):
    pass
