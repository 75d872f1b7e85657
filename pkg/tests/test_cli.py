import json
import subprocess
import sys

import pytest

from seqcore.bundled import get
from seqcore.cli import MISMATCH, OK, STATIC, STUCK, TIMEOUT, main
from seqcore.surface import parse_command


def path(name):
    return str(get(name).path)


def test_check(capsys):
    assert main(["check", path("bool_not")]) == OK
    assert main(["check", path("misaligned"), "--json"]) == STATIC
    out = capsys.readouterr().out.strip().splitlines()[-1]
    assert json.loads(out)["diagnostics"][0]["rule"] == "Cut"
    assert main(["check"]) == OK


def test_check_discipline_only(tmp_path):
    assert main(["check", path("loop")]) == OK      # the file asks for discipline-only checking
    plain = tmp_path / "loop.cd"
    plain.write_text("\n".join(l for l in get("loop").text.splitlines() if "mode:" not in l))
    assert main(["check", str(plain)]) == STATIC
    assert main(["check", str(plain), "--discipline-only"]) == OK


def test_run_trace_lines_reparse(capsys):
    assert main(["run", path("need_share"), "--trace"]) == OK
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines() if l.startswith("{")]
    assert [l["rule"] for l in lines] == ["bmu", "bmut_need", "bp"]
    assert all(l["at"].startswith("heap-depth") for l in lines)
    for l in lines:
        parse_command(l["command"], ["Lazy"])


def test_exit_codes(tmp_path):
    assert main(["run", path("loop"), "--fuel", "100"]) == TIMEOUT
    stuck = tmp_path / "stuck.cd"
    stuck.write_text("cmd main = < Unit | One : v | case { } >\n")
    assert main(["run", str(stuck)]) == STUCK
    bad = tmp_path / "bad.cd"
    bad.write_text("cmd main = < Unit | \n")
    assert main(["run", str(bad)]) == STATIC


def test_run_json(capsys):
    assert main(["run", path("pair_swap"), "--json"]) == OK
    d = json.loads(capsys.readouterr().out)
    assert d["status"] == "finished" and d["needed"]


def test_lmtm_run(capsys):
    assert main(["run", path("i_example"), "--strategy", "need", "--json"]) == OK
    d = json.loads(capsys.readouterr().out)
    assert d["final"] == "< 5 | alpha >" and d["steps"] == 6


def test_compile_stages(tmp_path, capsys):
    out = tmp_path / "core.cd"
    assert main(["compile", path("either_swap"), "-o", str(out)]) == OK
    text = out.read_text()
    assert "data " not in text and "FromPos@v" in text
    assert main(["compile", path("either_swap"), "--stage", "lift"]) == OK
    assert "data Either" in capsys.readouterr().out


def test_diffrun(capsys):
    assert main(["diffrun"]) == OK
    assert "MISMATCH" not in capsys.readouterr().out


def test_isotest(capsys):
    assert main(["isotest", "--laws", "plus-comm,par-unit"]) == OK
    out = capsys.readouterr().out
    assert out.startswith("PASS") and "FAIL" not in out
    assert main(["isotest", "--laws", "nope"]) == STATIC


def test_polarize(capsys):
    assert main(["polarize", path("i_example"), "--run"]) == OK
    assert capsys.readouterr().out.startswith("equal")
    assert main(["polarize", path("sum_case"), "--strategy", "need", "--scheme", "classic"]) == STATIC
    assert main(["polarize", path("bool_not")]) == STATIC


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "seqcore", "run", path("bool_not")], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("finished")
