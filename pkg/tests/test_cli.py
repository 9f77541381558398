from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from bifib.cli import main, run_command
from bifib.core.bicategory import locally_discrete
from bifib.core.category import poset_category
from bifib.document import DocumentBuilder, ParseError, parse_document, serialize
from bifib.fixture_docs import fixture_documents
from bifib.fixtures import fix_cod, fix_proj

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def run(*argv: str):
    return run_command(list(argv))


def emit_and_recheck(tmp_path, *argv: str, expect: int = 0) -> dict:
    """Run with --emit, then replay the emitted certificate against the emitted file."""
    out = tmp_path / "out.json"
    res = run(*argv, "--emit", str(out))
    assert res.code == expect, res.message
    doc = json.loads(out.read_text(encoding="utf-8"))
    if expect == 0:
        again = run("check", "certificate", "--in", str(out))
        assert again.code == 0, again.message
    return doc


# documents

def test_fixture_files_are_up_to_date():
    docs = fixture_documents()
    assert sorted(docs) == sorted(p.name for p in FIXTURES.glob("*.json"))
    for name, text in docs.items():
        assert (FIXTURES / name).read_text(encoding="utf-8") == text, name


@pytest.mark.parametrize("name", sorted(fixture_documents()))
def test_round_trip_is_byte_stable(name):
    text = (FIXTURES / name).read_text(encoding="utf-8")
    doc = parse_document(text)
    assert serialize(doc) == text
    again = parse_document(serialize(doc))
    for kind in ("bicategories", "functors", "diagrams", "cleavages"):
        assert sorted(getattr(again, kind)) == sorted(getattr(doc, kind))


def test_fix_1_file_holds_one_bicategory():
    doc = parse_document((FIXTURES / "fix_1.json").read_text(encoding="utf-8"))
    assert list(doc.bicategories) == ["FIX-1"]
    assert not doc.functors and not doc.cleavages


def test_cod_bundle_parses_to_the_fixture():
    doc = parse_document((FIXTURES / "fix_cod.json").read_text(encoding="utf-8"))
    p = doc.functors["FIX-COD"]
    assert p.same_tables(fix_cod())
    assert doc.cleavages["cleavage"].p is p
    assert set(doc.diagrams) == {"product", "pullback"}


def test_tuple_ids_survive_a_round_trip():
    b = DocumentBuilder()
    b.add(fix_proj(), name="P")
    doc = parse_document(b.dumps())
    assert doc.functors["P"].same_tables(fix_proj())


def _fix1() -> dict:
    return json.loads((FIXTURES / "fix_1.json").read_text(encoding="utf-8"))


def test_syntax_errors_carry_line_and_column():
    text = '{\n "bicategories": {\n  "X": [1, 2,]\n }\n}\n'
    with pytest.raises(ParseError) as err:
        parse_document(text)
    assert (err.value.line, err.value.column) == (3, 14)


def test_unknown_keys_are_located():
    d = _fix1()
    d["bicategories"]["FIX-1"]["colour"] = []
    text = json.dumps(d, indent=1)
    with pytest.raises(ParseError) as err:
        parse_document(text)
    assert err.value.key == "colour"
    assert text.splitlines()[err.value.line - 1].strip().startswith('"colour"')
    d = _fix1()
    d["extras"] = {}
    with pytest.raises(ParseError):
        parse_document(json.dumps(d))


def test_a_2cell_on_a_missing_1cell_is_a_dangling_reference():
    d = _fix1()
    d["bicategories"]["FIX-1"]["two_cells"].append(["t", "1*", "ghost"])
    text = json.dumps(d, indent=1)
    with pytest.raises(ParseError) as err:
        parse_document(text)
    assert err.value.key == "ghost" and err.value.line is not None
    assert "ghost" in text.splitlines()[err.value.line - 1]


def test_duplicate_ids_are_rejected():
    d = _fix1()
    d["bicategories"]["FIX-1"]["objects"].append("*")
    with pytest.raises(ParseError):
        parse_document(json.dumps(d))
    d = _fix1()
    d["bicategories"]["FIX-1"]["one_cells"].append(["1*", "*", "*"])
    with pytest.raises(ParseError):
        parse_document(json.dumps(d))


def test_invalid_input_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope", encoding="utf-8")
    assert run("validate", "--in", str(bad)).code == 2
    assert run("validate", "--in", str(tmp_path / "missing.json")).code == 2
    assert run("check", "fibration", "--in", fixture("fix_cod.json")).code == 2
    assert run("check", "fibration", "--in", fixture("fix_cod.json"), "--functor", "nobody").code == 2
    assert run("frobnicate", "--in", fixture("fix_1.json")).code == 2


def test_size_guardrail_exits_3(tmp_path):
    n = 12
    names = [f"x{i:02d}" for i in range(n)]
    C = poset_category(names, [(a, b) for i, a in enumerate(names) for b in names[i + 1:]])
    b = DocumentBuilder()
    b.add(locally_discrete(C, name="CHAIN12"), name="C12")
    path = tmp_path / "c12.json"
    path.write_text(b.dumps(), encoding="utf-8")
    assert run("validate", "--in", str(path)).code == 0
    assert run("arrow", "--in", str(path), "--bicategory", "C12").code == 3


# commands

@pytest.mark.parametrize("name", sorted(fixture_documents()))
def test_validate_every_fixture_file(tmp_path, name):
    emit_and_recheck(tmp_path, "validate", "--in", fixture(name))


def test_check_fibration_emits_a_witness_and_cleavage(tmp_path):
    doc = emit_and_recheck(tmp_path, "check", "fibration", "--in", fixture("fix_cod.json"), "--functor", "FIX-COD")
    cert = doc["certificate"]
    assert cert["kind"] == "fibration" and cert["holds"]
    assert cert["witness"] and "cleavage" in doc["cleavages"]


def test_non_fibration_exits_1_with_a_counterexample(tmp_path):
    out = tmp_path / "out.json"
    C = poset_category(["a", "b", "1"], [("a", "1"), ("b", "1")], name="V")
    from bifib.core.category import arrow_category
    from bifib.functor import strict_functor

    arr = arrow_category(C)
    E, B = locally_discrete(arr, name="LD(V^->)"), locally_discrete(C, name="LD(V)")
    p = strict_functor(
        E, B, {u: C.tgt(u) for u in arr.objects}, {m: m[3] for m in arr.morphisms},
        {E.id2[m]: B.id2[m[3]] for m in arr.morphisms}, name="cod(V)",
    )
    b = DocumentBuilder()
    b.add(p, name="cod(V)")
    path = tmp_path / "v.json"
    path.write_text(b.dumps(), encoding="utf-8")
    res = run("check", "fibration", "--in", str(path), "--functor", "cod(V)", "--emit", str(out))
    assert res.code == 1
    cert = json.loads(out.read_text())["certificate"]
    assert not cert["holds"] and cert["counterexample"]["clause"] == 2
    assert "recheck" not in cert


def test_check_cells_and_objects(tmp_path):
    cod = fixture("fix_cod.json")
    # the square (0 -> 1) => (1 -> 1) is not a pullback
    square = json.dumps(["0<=1", "1<=1", "0<=1", "1<=1"], separators=(",", ":"))
    pullback = json.dumps(["0<=a", "b<=1", "0<=b", "a<=1"], separators=(",", ":"))
    assert run("check", "cartesian-1cell", "--in", cod, "--functor", "FIX-COD", "--cell", pullback).code == 0
    assert run("check", "cartesian-1cell", "--in", cod, "--functor", "FIX-COD", "--cell", square).code == 1
    emit_and_recheck(tmp_path, "check", "cartesian-1cell", "--in", cod, "--functor", "FIX-COD", "--cell", pullback)
    proj2 = fixture("fix_proj2.json")
    t = json.dumps(["t", "1:1x"], separators=(",", ":"))
    assert run("check", "cartesian-2cell", "--in", proj2, "--functor", "FIX-PROJ2", "--cell", t).code == 1
    emit_and_recheck(tmp_path, "check", "locally-fibred", "--in", proj2, "--functor", "FIX-PROJ2")


def test_unknown_cell_exits_2():
    assert run("check", "cartesian-1cell", "--in", fixture("fix_cod.json"), "--functor", "FIX-COD", "--cell", "nope").code == 2


def test_comma_arrow_and_section(tmp_path):
    emit_and_recheck(tmp_path, "comma", "--in", fixture("fix_proj.json"), "--functor", "FIX-PROJ")
    emit_and_recheck(tmp_path, "arrow", "--in", fixture("fix_2cell.json"), "--bicategory", "FIX-2CELL")
    for order in ("asc", "desc"):
        doc = emit_and_recheck(tmp_path, "section", "--in", fixture("fix_cod.json"), "--functor", "FIX-COD", "--seed-order", order)
        assert doc["certificate"]["kind"] == "section"


def test_2rari_on_the_section_document(tmp_path):
    out = tmp_path / "sec.json"
    assert run("section", "--in", fixture("fix_proj.json"), "--functor", "FIX-PROJ", "--emit", str(out)).code == 0
    doc = parse_document(out.read_text())
    (qn,) = [n for n in doc.functors if n.endswith("^L")]
    q = doc.functors[qn]
    from bifib.ids import encode_id

    obs = sorted(q.source.obs, key=repr)
    results = {run("check", "2rari", "--in", str(out), "--functor", qn, "--object", encode_id(X)).code for X in obs}
    assert results == {0}


def test_lift_triple_and_its_check(tmp_path):
    cod = fixture("fix_cod.json")
    f = json.dumps(["0<=a", "b<=1", "0<=b", "a<=1"], separators=(",", ":"))
    problem = json.dumps(["0<=0", json.dumps(["0<=0", "b<=1", "0<=b", "0<=1"], separators=(",", ":")), "0<=a", "1:0<=1"])
    doc = emit_and_recheck(tmp_path, "lift", "triple", "--in", cod, "--functor", "FIX-COD", "--cell", f, "--problem", problem)
    assert doc["certificate"]["kind"] == "lift-triple"


def test_lift_cone_and_limit_commands(tmp_path):
    proj = fixture("fix_proj.json")
    emit_and_recheck(tmp_path, "lift", "cone", "--in", proj, "--functor", "FIX-PROJ", "--diagram", "product")
    doc = emit_and_recheck(tmp_path, "limit", "lift", "--in", proj, "--functor", "FIX-PROJ", "--diagram", "product")
    cert = doc["certificate"]
    assert cert["kind"] == "limit-lift" and cert["witness"]["apex"] == '["p","0"]'
    assert cert["recheck"][:2] == ["limit", "check"]
    emit_and_recheck(
        tmp_path, "limit", "find", "--in", proj, "--bicategory", "FIX-LD(ISO)xFIX-LD(CHAIN)", "--diagram", "product"
    )


def test_limit_check_detects_a_tampered_certificate(tmp_path):
    out = tmp_path / "lim.json"
    proj = fixture("fix_proj.json")
    assert run("limit", "lift", "--in", proj, "--functor", "FIX-PROJ", "--diagram", "product", "--emit", str(out)).code == 0
    doc = json.loads(out.read_text())
    x = sorted(doc["certificate"]["witness"]["comparisons"])[0]
    doc["certificate"]["witness"]["comparisons"][x] = {}
    out.write_text(json.dumps(doc), encoding="utf-8")
    assert run("check", "certificate", "--in", str(out)).code == 1


def test_limit_lift_reports_failed_hypotheses(tmp_path):
    out = tmp_path / "fail.json"
    res = run("limit", "lift", "--in", fixture("fix_proj2.json"), "--functor", "FIX-PROJ2", "--diagram", "product", "--emit", str(out))
    assert res.code == 1
    assert json.loads(out.read_text())["certificate"]["counterexample"]["hypothesis"] == "base-limit"
    res = run("limit", "lift", "--in", fixture("fix_np.json"), "--functor", "FIX-NP", "--diagram", "product", "--emit", str(out))
    assert res.code == 1
    assert json.loads(out.read_text())["certificate"]["counterexample"]["hypothesis"] == "reindexing-preserves-limits"


def test_reindex_and_cartesian_transformation(tmp_path):
    doc = emit_and_recheck(
        tmp_path, "reindex", "--in", fixture("fix_proj.json"), "--functor", "FIX-PROJ", "--diagram", "fiber-product", "--cell", "0<=1"
    )
    assert "reindexed" in doc["functors"] or "reindexed" in doc.get("diagrams", {})


def test_pool_check_on_a_lifted_transformation(tmp_path):
    out = tmp_path / "cone.json"
    proj = fixture("fix_proj.json")
    assert run("lift", "cone", "--in", proj, "--functor", "FIX-PROJ", "--diagram", "product", "--emit", str(out)).code == 0
    res = run(
        "check", "cartesian-transformation", "--in", str(out), "--functor", "FIX-PROJ",
        "--transformation", "tau_bar", "--pool", "F_bar",
    )
    assert res.code == 0, res.message


def test_emitted_certificates_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run("limit", "lift", "--in", fixture("fix_cod.json"), "--functor", "FIX-COD", "--diagram", "pullback", "--emit", str(path))
    assert a.read_bytes() == b.read_bytes()


def test_main_prints_and_returns_the_exit_code(capsys):
    assert main(["validate", "--in", fixture("fix_1.json")]) == 0
    assert "holds" in capsys.readouterr().out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bifib.cli", "validate", "--in", fixture("fix_sq.json")], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "validation: holds" in proc.stdout
