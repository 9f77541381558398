"""JSON documents holding bicategories, functors, transformations and more.

Top-level keys: "bicategories", "functors", "transformations",
"modifications", "cleavages", "diagrams" and an optional "certificate".
Every cell is referenced by a string id; tuple ids are written as compact
JSON arrays inside the string and decoded back on parse. Tables are arrays
``[operand ids..., result id]``. Output is sorted so files are byte-stable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .core.bicategory import Bicategory
from .errors import StructuralError
from .fibration import Cleavage
from .fixtures import diagram as make_diagram
from .functor import LaxFunctor, Modification, OplaxTransformation
from .ids import encode_id, from_jsonable, sort_key

TOP_KEYS = ("bicategories", "functors", "transformations", "modifications", "cleavages", "diagrams", "certificate")

BICAT_KEYS = {"objects", "one_cells", "two_cells", "id1", "id2", "vcomp", "hcomp1", "hcomp2", "assoc", "lunit", "runit"}
FUNCTOR_KEYS = {"source", "target", "variance", "strict", "ob", "map1", "map2", "unit", "comp"}
TRANSFORMATION_KEYS = {"source", "target", "comp1", "comp2"}
MODIFICATION_KEYS = {"source", "target", "comp"}
CLEAVAGE_KEYS = {"functor", "order", "lift1", "local"}
DIAGRAM_KEYS = {"shape", "target", "ob", "map1"}


class ParseError(StructuralError):
    def __init__(self, message: str, path: str, line: int | None = None, column: int | None = None, key: str | None = None):
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{path}: {message}{where}")
        self.path, self.line, self.column, self.key = path, line, column, key


def decode_id(s: Any):
    if not isinstance(s, str):
        raise TypeError(f"ids must be strings, not {type(s).__name__}")
    if s.startswith("["):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError:
            return s
        if isinstance(obj, list):
            return from_jsonable(obj)
    return s


@dataclass
class Document:
    bicategories: dict = field(default_factory=dict)
    functors: dict = field(default_factory=dict)
    transformations: dict = field(default_factory=dict)
    modifications: dict = field(default_factory=dict)
    cleavages: dict = field(default_factory=dict)
    diagrams: dict = field(default_factory=dict)
    certificate: dict | None = None

    def functor(self, name: str) -> LaxFunctor:
        if name in self.functors:
            return self.functors[name]
        if name in self.diagrams:
            return self.diagrams[name]
        raise StructuralError(f"no functor or diagram named {name!r}")

    def lookup(self, kind: str, name: str):
        table = getattr(self, kind)
        if name not in table:
            raise StructuralError(f"no {kind[:-1]} named {name!r}")
        return table[name]


# parsing

class _Parser:
    def __init__(self, text: str):
        self.text = text

    def locate(self, token: str) -> tuple[int | None, int | None]:
        needle = json.dumps(token)
        i = self.text.find(needle)
        if i < 0:
            return None, None
        line = self.text.count("\n", 0, i) + 1
        col = i - (self.text.rfind("\n", 0, i) + 1) + 1
        return line, col

    def fail(self, message: str, path: str, token: str | None = None):
        line, col = self.locate(token) if token is not None else (None, None)
        raise ParseError(message, path, line, col, token)

    def keys(self, obj, allowed: set, required: set, path: str) -> None:
        if not isinstance(obj, dict):
            self.fail("expected an object", path)
        for k in obj:
            if k not in allowed:
                self.fail(f"unknown key {k!r}", path, k)
        for k in required:
            if k not in obj:
                self.fail(f"missing key {k!r}", path)

    def rows(self, obj, key: str, arity: int, path: str) -> list[list]:
        rows = obj.get(key, [])
        if not isinstance(rows, list):
            self.fail(f"{key} must be an array", path, key)
        out = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != arity or not all(isinstance(c, str) for c in row):
                self.fail(f"{key}[{i}] must be an array of {arity} string ids", f"{path}.{key}", key)
            out.append(row)
        return out

    def table(self, obj, key, arity, path, domain_checks, result_set):
        out = {}
        for row in self.rows(obj, key, arity, path):
            *ops, res = row
            for tok, dom in zip(ops, domain_checks):
                if decode_id(tok) not in dom:
                    self.fail(f"dangling reference {tok!r}", f"{path}.{key}", tok)
            if decode_id(res) not in result_set:
                self.fail(f"dangling reference {res!r}", f"{path}.{key}", res)
            k = tuple(decode_id(t) for t in ops)
            k = k[0] if len(k) == 1 else k
            if k in out:
                self.fail(f"duplicate entry for {encode_id(k)!r}", f"{path}.{key}", ops[0])
            out[k] = decode_id(res)
        return out

    def bicategory(self, name: str, obj) -> Bicategory:
        path = f"bicategories.{name}"
        self.keys(obj, BICAT_KEYS, {"objects", "one_cells", "two_cells", "id1", "id2"}, path)
        obs = []
        for tok in obj["objects"]:
            if not isinstance(tok, str):
                self.fail("object ids must be strings", path)
            x = decode_id(tok)
            if x in obs:
                self.fail(f"duplicate id {tok!r}", f"{path}.objects", tok)
            obs.append(x)
        ob_set = set(obs)
        one = {}
        for f, x, y in self.rows(obj, "one_cells", 3, path):
            for t in (x, y):
                if decode_id(t) not in ob_set:
                    self.fail(f"dangling reference {t!r}", f"{path}.one_cells", t)
            if decode_id(f) in one:
                self.fail(f"duplicate id {f!r}", f"{path}.one_cells", f)
            one[decode_id(f)] = (decode_id(x), decode_id(y))
        two = {}
        for a, f, g in self.rows(obj, "two_cells", 3, path):
            for t in (f, g):
                if decode_id(t) not in one:
                    self.fail(f"dangling reference {t!r}", f"{path}.two_cells", t)
            if decode_id(a) in two:
                self.fail(f"duplicate id {a!r}", f"{path}.two_cells", a)
            two[decode_id(a)] = (decode_id(f), decode_id(g))
        tables = dict(
            id1=self.table(obj, "id1", 2, path, [ob_set], one),
            id2=self.table(obj, "id2", 2, path, [one], two),
            vcomp=self.table(obj, "vcomp", 3, path, [two, two], two),
            hcomp1=self.table(obj, "hcomp1", 3, path, [one, one], one),
            hcomp2=self.table(obj, "hcomp2", 3, path, [two, two], two),
            assoc=self.table(obj, "assoc", 4, path, [one, one, one], two),
            lunit=self.table(obj, "lunit", 2, path, [one], two),
            runit=self.table(obj, "runit", 2, path, [one], two),
        )
        return Bicategory(obs, one, two, name=name, **tables)

    def functor(self, name: str, obj, doc: Document) -> LaxFunctor:
        path = f"functors.{name}"
        self.keys(obj, FUNCTOR_KEYS, {"source", "target", "ob", "map1", "map2", "unit", "comp"}, path)
        A = self.ref(doc.bicategories, obj["source"], path, "bicategory")
        B = self.ref(doc.bicategories, obj["target"], path, "bicategory")
        pairs = set(A.composable_pairs())
        if obj.get("variance", "lax") not in ("lax", "oplax", "pseudo"):
            self.fail(f"unknown variance {obj.get('variance')!r}", path, "variance")
        F = LaxFunctor(
            A, B,
            self.table(obj, "ob", 2, path, [set(A.obs)], set(B.obs)),
            self.table(obj, "map1", 2, path, [A.one_cells], B.one_cells),
            self.table(obj, "map2", 2, path, [A.two_cells], B.two_cells),
            self.table(obj, "unit", 2, path, [set(A.obs)], B.two_cells),
            self.table(obj, "comp", 3, path, [A.one_cells, A.one_cells], B.two_cells),
            variance=obj.get("variance", "lax"),
            strict=bool(obj.get("strict", False)),
            name=name,
        )
        for k in F.comp:
            if k not in pairs:
                self.fail(f"comp entry {encode_id(k)!r} is not a composable pair", f"{path}.comp", encode_id(k[0]))
        return F

    def ref(self, table: dict, name, path: str, what: str):
        if not isinstance(name, str) or name not in table:
            self.fail(f"unknown {what} {name!r}", path, name if isinstance(name, str) else None)
        return table[name]

    def parse(self) -> Document:
        try:
            raw = json.loads(self.text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, "<document>", e.lineno, e.colno) from None
        self.keys(raw, set(TOP_KEYS), set(), "<document>")
        doc = Document()
        for name, obj in sorted(raw.get("bicategories", {}).items()):
            doc.bicategories[name] = self.bicategory(name, obj)
        for name, obj in sorted(raw.get("functors", {}).items()):
            doc.functors[name] = self.functor(name, obj, doc)
        for name, obj in sorted(raw.get("diagrams", {}).items()):
            path = f"diagrams.{name}"
            if name in doc.functors:
                self.fail(f"duplicate id {name!r}", path, name)
            self.keys(obj, DIAGRAM_KEYS, DIAGRAM_KEYS, path)
            A = self.ref(doc.bicategories, obj["shape"], path, "bicategory")
            E = self.ref(doc.bicategories, obj["target"], path, "bicategory")
            ob = self.table(obj, "ob", 2, path, [set(A.obs)], set(E.obs))
            map1 = self.table(obj, "map1", 2, path, [A.one_cells], E.one_cells)
            try:
                doc.diagrams[name] = make_diagram(A, E, ob, map1, name=name)
            except KeyError as e:
                self.fail(f"diagram is not total on a locally discrete shape: missing {e}", path)
        for name, obj in sorted(raw.get("transformations", {}).items()):
            path = f"transformations.{name}"
            self.keys(obj, TRANSFORMATION_KEYS, TRANSFORMATION_KEYS, path)
            F = self.ref({**doc.functors, **doc.diagrams}, obj["source"], path, "functor")
            G = self.ref({**doc.functors, **doc.diagrams}, obj["target"], path, "functor")
            E = F.target
            doc.transformations[name] = OplaxTransformation(
                F, G,
                self.table(obj, "comp1", 2, path, [set(F.source.obs)], E.one_cells),
                self.table(obj, "comp2", 2, path, [F.source.one_cells], E.two_cells),
                name=name,
            )
        for name, obj in sorted(raw.get("modifications", {}).items()):
            path = f"modifications.{name}"
            self.keys(obj, MODIFICATION_KEYS, MODIFICATION_KEYS, path)
            s = self.ref(doc.transformations, obj["source"], path, "transformation")
            t = self.ref(doc.transformations, obj["target"], path, "transformation")
            doc.modifications[name] = Modification(
                s, t, self.table(obj, "comp", 2, path, [set(s.F.source.obs)], s.F.target.two_cells), name=name
            )
        for name, obj in sorted(raw.get("cleavages", {}).items()):
            path = f"cleavages.{name}"
            self.keys(obj, CLEAVAGE_KEYS, {"functor", "lift1", "local"}, path)
            p = self.ref(doc.functors, obj["functor"], path, "functor")
            E, B = p.source, p.target
            lift1 = {}
            for e, f, k in self.rows(obj, "lift1", 3, path):
                for tok, dom in ((e, set(E.obs)), (f, B.one_cells), (k, E.one_cells)):
                    if decode_id(tok) not in dom:
                        self.fail(f"dangling reference {tok!r}", f"{path}.lift1", tok)
                lift1[(decode_id(e), decode_id(f))] = decode_id(k)
            local = {}
            for g, beta, sigma in self.rows(obj, "local", 3, path):
                for tok, dom in ((g, E.one_cells), (beta, B.two_cells), (sigma, E.two_cells)):
                    if decode_id(tok) not in dom:
                        self.fail(f"dangling reference {tok!r}", f"{path}.local", tok)
                local[(decode_id(g), decode_id(beta))] = decode_id(sigma)
            cl = Cleavage(p, lift1, local, order=obj.get("order", "asc"))
            cl.name = name
            doc.cleavages[name] = cl
        doc.certificate = raw.get("certificate")
        return doc


def parse_document(text: str) -> Document:
    return _Parser(text).parse()


# serialization

def _rows(table: dict, key_arity: int) -> list[list[str]]:
    out = []
    for k, v in table.items():
        ks = list(k) if key_arity > 1 else [k]
        out.append([encode_id(x) for x in ks] + [encode_id(v)])
    out.sort(key=lambda r: [sort_key(x) for x in r])
    return out


def bicategory_json(B: Bicategory) -> dict:
    return {
        "objects": sorted(encode_id(x) for x in B.obs),
        "one_cells": sorted([encode_id(f), encode_id(x), encode_id(y)] for f, (x, y) in B.one_cells.items()),
        "two_cells": sorted([encode_id(a), encode_id(f), encode_id(g)] for a, (f, g) in B.two_cells.items()),
        "id1": _rows(B.id1, 1),
        "id2": _rows(B.id2, 1),
        "vcomp": _rows(B.vcomp, 2),
        "hcomp1": _rows(B.hcomp1, 2),
        "hcomp2": _rows(B.hcomp2, 2),
        "assoc": _rows(B.assoc, 3),
        "lunit": _rows(B.lunit, 1),
        "runit": _rows(B.runit, 1),
    }


class _Namer:
    def __init__(self):
        self.names: dict[int, str] = {}
        self.used: set[str] = set()

    def __call__(self, obj, default: str, name: str | None = None) -> str:
        if id(obj) in self.names:
            return self.names[id(obj)]
        base = name or getattr(obj, "name", "") or default
        name, i = base, 2
        while name in self.used:
            name, i = f"{base}#{i}", i + 1
        self.used.add(name)
        self.names[id(obj)] = name
        return name


class DocumentBuilder:
    """Collects entities and their dependencies under unique names."""

    def __init__(self):
        self.namer = _Namer()
        self.out = {k: {} for k in TOP_KEYS if k != "certificate"}
        self.certificate = None
        self._keep = []

    def add(self, x, name: str | None = None, as_diagram: bool = False) -> str:
        if id(x) in self.namer.names:
            return self.namer.names[id(x)]
        self._keep.append(x)
        if isinstance(x, Bicategory):
            name = self.namer(x, "B", name)
            self.out["bicategories"][name] = bicategory_json(x)
        elif isinstance(x, LaxFunctor) and (as_diagram or getattr(x, "_is_diagram", False)):
            A = x.source
            if len(A.two_cells) != len(A.one_cells) or any(f != g for f, g in A.two_cells.values()):
                raise StructuralError(f"{x.name!r} is not a diagram on a locally discrete shape")
            row = {"shape": self.add(A), "target": self.add(x.target), "ob": _rows(x.ob, 1), "map1": _rows(x.map1, 1)}
            name = self.namer(x, "J", name)
            self.out["diagrams"][name] = row
        elif isinstance(x, LaxFunctor):
            row = {
                "source": self.add(x.source),
                "target": self.add(x.target),
                "variance": x.variance,
                "strict": x.strict,
                "ob": _rows(x.ob, 1),
                "map1": _rows(x.map1, 1),
                "map2": _rows(x.map2, 1),
                "unit": _rows(x.unit, 1),
                "comp": _rows(x.comp, 2),
            }
            name = self.namer(x, "F", name)
            self.out["functors"][name] = row
        elif isinstance(x, OplaxTransformation):
            row = {"source": self.add(x.F), "target": self.add(x.G), "comp1": _rows(x.comp1, 1), "comp2": _rows(x.comp2, 1)}
            name = self.namer(x, "t", name)
            self.out["transformations"][name] = row
        elif isinstance(x, Modification):
            row = {"source": self.add(x.sigma), "target": self.add(x.tau), "comp": _rows(x.comp, 1)}
            name = self.namer(x, "m", name)
            self.out["modifications"][name] = row
        elif isinstance(x, Cleavage):
            row = {"functor": self.add(x.p), "order": x.order, "lift1": _rows(x.lift1, 2), "local": _rows(x.local, 2)}
            name = self.namer(x, "cleavage", name)
            self.out["cleavages"][name] = row
        else:
            raise TypeError(f"cannot serialize {x!r}")
        return name

    def to_json(self) -> dict:
        doc = {k: dict(sorted(v.items())) for k, v in self.out.items() if v}
        if self.certificate is not None:
            doc["certificate"] = self.certificate
        return doc

    def dumps(self) -> str:
        return dumps(self.to_json())


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def serialize(doc: Document) -> str:
    """Canonical text of a parsed document; entity names are preserved."""
    b = DocumentBuilder()
    for table in (doc.bicategories, doc.diagrams, doc.functors, doc.transformations, doc.modifications, doc.cleavages):
        for name, x in table.items():
            b.add(x, name=name, as_diagram=table is doc.diagrams)
    b.certificate = doc.certificate
    return b.dumps()
