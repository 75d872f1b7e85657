"""Access to the bundled example programs and their header directives.

A `.cd` file may start with comment directives::

    -- mode: discipline      check with the discipline system only
    -- expect: type-error    the typed checker must reject it
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

_DIRECTIVE = re.compile(r"^--\s*(mode|expect):\s*(\S+)", re.MULTILINE)


@dataclass(frozen=True)
class CorpusFile:
    name: str
    path: Path
    text: str

    @property
    def kind(self) -> str:
        return self.path.suffix.lstrip(".")

    def directive(self, key: str) -> Optional[str]:
        for k, v in _DIRECTIVE.findall(self.text):
            if k == key:
                return v
        return None

    @property
    def discipline_only(self) -> bool:
        return self.directive("mode") == "discipline"

    @property
    def expects_type_error(self) -> bool:
        return self.directive("expect") == "type-error"

    @property
    def well_typed(self) -> bool:
        return not (self.discipline_only or self.expects_type_error)

    def program(self):
        from .surface import parse_lmtm_program, parse_program
        return parse_program(self.text) if self.kind == "cd" else parse_lmtm_program(self.text)


def corpus_dir() -> Path:
    return Path(str(resources.files("seqcore") / "corpus"))


def load(path) -> CorpusFile:
    p = Path(path)
    return CorpusFile(p.stem, p, p.read_text(encoding="utf-8"))


def load_corpus(kind: Optional[str] = "cd", root=None) -> list[CorpusFile]:
    """Every corpus file of the given suffix (or all when kind is None), sorted by name."""
    root = Path(root) if root is not None else corpus_dir()
    pattern = f"*.{kind}" if kind else "*.*"
    return [load(p) for p in sorted(root.glob(pattern))]


def get(name: str) -> CorpusFile:
    for f in load_corpus(None):
        if f.name == name or f.path.name == name:
            return f
    raise KeyError(f"no corpus file {name!r}")
