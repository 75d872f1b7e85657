"""seqcore: a sequent core calculus with user-defined disciplines.

Submodules: syntax, surface, kinds, typing, machine, compile, frontend, iso, cli.
"""
from .errors import CompileError, IsoError, KindError, ParseError, SeqcoreError, TypeCheckError
from .kinds import Signature, core_signature
from .machine import Machine, Observation, Status, run
from .surface import parse_command, parse_program, print_command, print_program
from .syntax import Discipline

__version__ = "0.1.0"

__all__ = [
    "CompileError", "IsoError", "KindError", "ParseError", "SeqcoreError", "TypeCheckError",
    "Signature", "core_signature", "Machine", "Observation", "Status", "run",
    "parse_command", "parse_program", "print_command", "print_program", "Discipline",
]
