import pytest

from seqcore.bundled import corpus_dir, get, load, load_corpus


def test_corpus_is_packaged():
    assert corpus_dir().is_dir()
    assert len(load_corpus("cd")) >= 30
    assert {f.name for f in load_corpus("lmtm")} >= {"i_example", "critical_pair"}


def test_directives():
    assert get("loop").discipline_only and not get("loop").well_typed
    assert get("misaligned").expects_type_error
    assert get("bool_not").well_typed and get("bool_not").directive("mode") is None


def test_lookup_by_file_name(tmp_path):
    assert get("i_example.lmtm").kind == "lmtm"
    with pytest.raises(KeyError):
        get("missing")
    p = tmp_path / "one.cd"
    p.write_text("-- mode: discipline\ncmd main [a : One] = < Unit | One : v | a >\n")
    cf = load(p)
    assert cf.discipline_only and "main" in cf.program().entries
