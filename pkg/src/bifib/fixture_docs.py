"""The fixture corpus as JSON documents (the files under ``fixtures/``)."""
from __future__ import annotations

from pathlib import Path

from .document import DocumentBuilder
from .fibration import synthesize_cleavage
from .fixtures import (
    diagram,
    fix_1,
    fix_2cell,
    fix_cod,
    fix_id_sq,
    fix_nonpreserving,
    fix_proj,
    fix_proj2,
    fix_sq,
    pick,
    shape_cospan,
    shape_discrete2,
)


def _only(E, x, y):
    (f,) = E.hom(x, y)
    return f


def cospan_diagram(E, l, r, c, name: str = "pullback"):
    A = shape_cospan()
    map1 = {A.id1[a]: E.id1[x] for a, x in (("l", l), ("r", r), ("c", c))}
    map1["l<=c"] = _only(E, l, c)
    map1["r<=c"] = _only(E, r, c)
    return diagram(A, E, {"l": l, "r": r, "c": c}, map1, name=name)


def product_diagram(E, l, r, name: str = "product"):
    return pick(shape_discrete2(), E, {"l": l, "r": r}, name=name)


def _bundle(p, *diagrams) -> DocumentBuilder:
    b = DocumentBuilder()
    b.add(p)
    b.add(synthesize_cleavage(p), name="cleavage")
    for J in diagrams:
        b.add(J)
    return b


def fixture_documents() -> dict[str, str]:
    """File name to document text, deterministic."""
    docs = {}
    for fname, B in (("fix_1.json", fix_1()), ("fix_sq.json", fix_sq()), ("fix_2cell.json", fix_2cell())):
        b = DocumentBuilder()
        b.add(B)
        docs[fname] = b.dumps()
    cod = fix_cod()
    E = cod.source
    docs["fix_cod.json"] = _bundle(
        cod, product_diagram(E, "a<=a", "b<=b"), cospan_diagram(E, "a<=a", "b<=b", "1<=1")
    ).dumps()
    proj = fix_proj()
    docs["fix_proj.json"] = _bundle(
        proj,
        product_diagram(proj.source, ("p", "0"), ("q", "1")),
        product_diagram(proj.source, ("p", "1"), ("q", "1"), name="fiber-product"),
    ).dumps()
    proj2 = fix_proj2()
    docs["fix_proj2.json"] = _bundle(proj2, product_diagram(proj2.source, ("x", "x"), ("y", "y"))).dumps()
    docs["fix_id_sq.json"] = _bundle(fix_id_sq()).dumps()
    np_ = fix_nonpreserving()
    docs["fix_np.json"] = _bundle(np_, product_diagram(np_.source, "a", "c")).dumps()
    return docs


def write_fixture_files(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for fname, text in fixture_documents().items():
        path = directory / fname
        path.write_text(text, encoding="utf-8")
        out.append(path)
    return out
