"""Command-line driver: check, run, compile, diffrun, isotest and polarize.

Exit codes: 0 success, 1 static error, 2 stuck, 3 timeout, 4 differential mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .bundled import CorpusFile, corpus_dir, load, load_corpus
from .compile import compile_command, encode_type, lift
from .errors import SeqcoreError
from .kinds import core_signature
from .machine import Machine, Observation, Status
from .surface import Entry, Hyp, Program, inline_lmtm, print_command, print_lmtm, print_program
from .typing import Mode, check_entry

OK, STATIC, STUCK, TIMEOUT, MISMATCH = 0, 1, 2, 3, 4
_STATUS_CODE = {Status.FINISHED: OK, Status.STUCK: STUCK, Status.TIMEOUT: TIMEOUT}


@dataclass
class RunReport:
    program: str
    entry: str
    mode: str
    source: Observation
    compiled: Optional[Observation] = None
    wall: float = 0.0

    @property
    def equal(self) -> bool:
        if self.compiled is None:
            return True
        return self.source.status == self.compiled.status and self.source.needed == self.compiled.needed

    @property
    def steps(self) -> tuple:
        return (self.source.steps, self.compiled.steps if self.compiled else None)

    def to_dict(self) -> dict:
        d = {"program": self.program, "entry": self.entry, "mode": self.mode,
             "status": str(self.source.status), "needed": sorted(self.source.needed),
             "steps": self.source.steps, "wall_ms": round(self.wall * 1000, 3)}
        if self.source.final is not None:
            d["final"] = print_command(self.source.final)
        if self.compiled is not None:
            d.update(compiled_status=str(self.compiled.status), compiled_needed=sorted(self.compiled.needed),
                     compiled_steps=self.compiled.steps, equal=self.equal)
        return d


# --- pipeline helpers (also used by the tests) ------------------------------

def check_file(cf: CorpusFile, discipline_only: bool = False) -> list[dict]:
    """Diagnostics for every entry; an empty list means the file checks."""
    mode = Mode.DISCIPLINE if discipline_only else Mode.TYPED
    out = []
    try:
        prog = cf.program()
        if cf.kind != "cd":
            return []
        sig = prog.signature()
    except SeqcoreError as err:
        return [{"entry": None, **err.to_dict()}]
    for name in prog.entries:
        try:
            check_entry(sig, prog.entry(name), mode)
        except SeqcoreError as err:
            out.append({"entry": name, **err.to_dict()})
            break
    return out


def run_entry(prog: Program, name: str, fuel: int = 10_000, trace: bool = False, label: str = "") -> RunReport:
    sig = prog.signature()
    t0 = time.perf_counter()
    obs = Machine(sig).run(prog.entry(name).command, fuel, trace)
    return RunReport(label, name, "source", obs, None, time.perf_counter() - t0)


def compile_entry(prog: Program, name: str, stage: str = "core") -> Entry:
    """The entry after lifting (stage lift) or lifting and encoding (stage core)."""
    sig = prog.signature()
    e = prog.entry(name)
    if stage == "lift":
        return Entry(e.name, lift(e.command, sig), e.theta, e.gamma, e.delta)

    def hyp(h: Hyp) -> Hyp:
        return Hyp(h.name, encode_type(sig, h.type) if h.type is not None else None, h.disc)

    return Entry(e.name, compile_command(sig, e.command), e.theta,
                 tuple(hyp(h) for h in e.gamma), tuple(hyp(h) for h in e.delta))


def compile_program(prog: Program, stage: str = "core") -> Program:
    entries = {n: compile_entry(prog, n, stage) for n in prog.entries}
    decls = list(prog.declarations) if stage == "lift" else []
    return Program(decls, {}, entries)


def diffrun_entry(prog: Program, name: str, fuel: int = 10_000, label: str = "") -> RunReport:
    sig = prog.signature()
    t0 = time.perf_counter()
    src = Machine(sig).run(prog.entry(name).command, fuel)
    core = compile_entry(prog, name, "core").command
    out = Machine(core_signature()).run(core, fuel)
    return RunReport(label, name, "diff", src, out, time.perf_counter() - t0)


def _trace_lines(obs: Observation) -> list[dict]:
    return [{"step": k + 1, "rule": r.rule.value, "at": f"heap-depth {r.depth}", "command": print_command(r.next)}
            for k, r in enumerate(obs.trace)]


def _files(path: Optional[str], kind: str = "cd") -> list[CorpusFile]:
    if path is None:
        return load_corpus(kind)
    p = Path(path)
    if p.is_dir():
        return load_corpus(kind, p)
    return [load(p)]


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(text)


# --- subcommands ------------------------------------------------------------

def cmd_check(args) -> int:
    worst = OK
    batch = args.path is None or Path(args.path).is_dir()
    for cf in _files(args.path):
        diags = check_file(cf, args.discipline_only or cf.discipline_only)
        expected = batch and cf.expects_type_error
        ok = bool(diags) if expected else not diags
        if args.json:
            print(json.dumps({"file": str(cf.path), "ok": ok, "expected_error": expected,
                              "diagnostics": diags}))
        else:
            for d in diags:
                print(f"{cf.path}: {d['entry'] or '-'}: [{d['rule']}] {d['message']}")
            if not diags:
                print(f"{cf.path}: ok")
            elif expected:
                print(f"{cf.path}: rejected as expected")
        if not ok:
            worst = STATIC
    return worst


def cmd_run(args) -> int:
    cf = load(args.path)
    try:
        prog = cf.program()
    except SeqcoreError as err:
        print(f"{cf.path}: [{err.rule}] {err.message}", file=sys.stderr)
        return STATIC
    if cf.kind == "lmtm":
        return _run_lmtm(args, cf, prog)
    try:
        report = run_entry(prog, args.entry, args.fuel, args.trace, str(cf.path))
    except KeyError as err:
        print(str(err), file=sys.stderr)
        return STATIC
    if args.trace:
        for line in _trace_lines(report.source):
            if args.pretty:
                print(f"{line['step']:>5}  {line['rule']:<11} {line['at']:<13} {line['command']}")
            else:
                print(json.dumps(line))
    obs = report.source
    _emit(args, report.to_dict(),
          f"{obs.status} needed={{{', '.join(sorted(obs.needed))}}} steps={obs.steps}\n"
          f"final: {print_command(obs.final) if obs.final is not None else '-'}")
    return _STATUS_CODE[obs.status]


def _run_lmtm(args, cf, prog) -> int:
    from .frontend import Strategy, lmtm_run
    s = Strategy.parse(args.strategy)
    c = inline_lmtm(prog, prog.entries[args.entry])
    obs = lmtm_run(c, s, args.fuel)
    if args.trace:
        for k, (rule, depth) in enumerate(obs.trace):
            line = {"step": k + 1, "rule": getattr(rule, "value", str(rule)),
                    "at": f"heap-depth {depth}"}
            print(json.dumps(line))
    payload = {"program": str(cf.path), "entry": args.entry, "strategy": s.value, "status": str(obs.status),
               "needed": sorted(obs.needed), "steps": obs.steps, "final": print_lmtm(obs.final)}
    _emit(args, payload, f"{obs.status} needed={{{', '.join(sorted(obs.needed))}}} steps={obs.steps}\n"
                         f"final: {print_lmtm(obs.final)}")
    return _STATUS_CODE[obs.status]


def cmd_compile(args) -> int:
    cf = load(args.path)
    try:
        out = print_program(compile_program(cf.program(), args.stage))
    except SeqcoreError as err:
        print(f"{cf.path}: [{err.rule}] {err.message}", file=sys.stderr)
        return STATIC
    if args.output:
        Path(args.output).write_text(out + "\n", encoding="utf-8")
    else:
        print(out)
    return OK


def cmd_diffrun(args) -> int:
    worst = OK
    for cf in _files(args.path):
        try:
            prog = cf.program()
            reports = [diffrun_entry(prog, n, args.fuel, str(cf.path)) for n in prog.entries]
        except SeqcoreError as err:
            print(f"{cf.path}: [{err.rule}] {err.message}")
            worst = max(worst, STATIC)
            continue
        for r in reports:
            flag = "equal" if r.equal else "MISMATCH"
            _emit(args, r.to_dict(),
                  f"{flag} {cf.name}:{r.entry} source={r.source.status}{sorted(r.source.needed)}/{r.source.steps}"
                  f" core={r.compiled.status}{sorted(r.compiled.needed)}/{r.compiled.steps}")
            if not r.equal:
                worst = MISMATCH
    return worst


def cmd_isotest(args) -> int:
    from .iso import LAWS, run_suite
    if args.laws == "all":
        names = None
    else:
        names = [n.strip() for n in args.laws.split(",") if n.strip()]
        unknown = [n for n in names if n not in LAWS]
        if unknown:
            print(f"unknown law(s): {', '.join(unknown)}; known: {', '.join(LAWS)}", file=sys.stderr)
            return STATIC
    report = run_suite(names, fuel=args.fuel)
    for line in report.lines:
        print(str(line))
    skipped = [n for n, law in LAWS.items() if not law.verifiable and names is None]
    for n in skipped:
        print(f"SKIP {n} (needs type-irrelevant eta; not checked observationally)")
    print(f"{len(report.lines) - len(report.failures)}/{len(report.lines)} passed")
    return OK if report.ok else MISMATCH


def cmd_polarize(args) -> int:
    from .frontend import Scheme, Strategy, lmtm_run, polarize
    cf = load(args.path)
    try:
        prog = cf.program()
        if cf.kind != "lmtm":
            print(f"{cf.path}: polarize expects a .lmtm source", file=sys.stderr)
            return STATIC
        c = inline_lmtm(prog, prog.entries[args.entry])
        s = Strategy.parse(args.strategy)
        pz = polarize(c, s, Scheme(args.scheme))
    except (SeqcoreError, ValueError, KeyError) as err:
        print(f"{cf.path}: {err}", file=sys.stderr)
        return STATIC
    if not args.run:
        text = print_program(pz.program())
        if pz.note:
            text = f"-- {pz.note}\n" + text
        print(text)
        return OK
    direct = lmtm_run(c, s, args.fuel)
    obs = Machine(pz.signature).run(pz.command, args.fuel)
    same = obs.status == direct.status and _covars(obs) == direct.covariables()
    payload = {"program": str(cf.path), "strategy": s.value, "scheme": args.scheme, "typed": pz.typed,
               "direct": {"status": str(direct.status), "needed": sorted(direct.needed), "steps": direct.steps},
               "polarized": {"status": str(obs.status), "needed": sorted(obs.needed), "steps": obs.steps},
               "equal": same}
    _emit(args, payload,
          f"{'equal' if same else 'MISMATCH'} direct={direct.status}{sorted(direct.needed)}/{direct.steps}"
          f" polarized={obs.status}{sorted(obs.needed)}/{obs.steps}")
    if not same:
        return MISMATCH
    return _STATUS_CODE[obs.status]


def _covars(obs: Observation) -> frozenset:
    from .syntax import free
    if obs.final is None:
        return frozenset()
    return frozenset(obs.needed & free(obs.final).covars)


# --- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seqcore", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and type-check a program (or the bundled corpus)")
    c.add_argument("path", nargs="?")
    c.add_argument("--discipline-only", action="store_true", help="use the discipline system")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("run", help="execute an entry of a .cd or .lmtm program")
    r.add_argument("path")
    r.add_argument("--entry", default="main")
    r.add_argument("--fuel", type=int, default=10_000)
    r.add_argument("--trace", action="store_true", help="one JSON object per step")
    r.add_argument("--pretty", action="store_true", help="tabular trace instead of JSON lines")
    r.add_argument("--json", action="store_true")
    r.add_argument("--strategy", default="need", help="for .lmtm sources: v, n, need or coneed")
    r.set_defaults(func=cmd_run)

    k = sub.add_parser("compile", help="lift, or lift and encode into core connectives")
    k.add_argument("path")
    k.add_argument("-o", "--output")
    k.add_argument("--stage", choices=("lift", "core"), default="core")
    k.set_defaults(func=cmd_compile)

    d = sub.add_parser("diffrun", help="compare source and compiled runs")
    d.add_argument("path", nargs="?", help="a .cd file or directory (default: bundled corpus)")
    d.add_argument("--fuel", type=int, default=10_000)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_diffrun)

    i = sub.add_parser("isotest", help="observational check of the isomorphism laws")
    i.add_argument("--laws", default="all", help="all, or comma separated law names")
    i.add_argument("--fuel", type=int, default=2000)
    i.set_defaults(func=cmd_isotest)

    z = sub.add_parser("polarize", help="translate a .lmtm source into System CD")
    z.add_argument("path")
    z.add_argument("--entry", default="main")
    z.add_argument("--strategy", default="need")
    z.add_argument("--scheme", choices=("generic", "classic"), default="generic")
    z.add_argument("--run", action="store_true", help="run both and compare observations")
    z.add_argument("--fuel", type=int, default=10_000)
    z.add_argument("--json", action="store_true")
    z.set_defaults(func=cmd_polarize)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SeqcoreError as err:
        print(f"error: [{err.rule}] {err.message}", file=sys.stderr)
        return STATIC
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return STATIC


if __name__ == "__main__":
    sys.exit(main())
