"""Fully tabulated finite bicategories.

Horizontal and vertical composition are both diagrammatic: ``f . g`` is
"f then g" and ``a | b`` is "a then b". Associators point
``(f.g).h => f.(g.h)``, left unitors ``1.f => f`` and right unitors
``f.1 => f``. Identity 2-cells are explicit ids.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Iterable, Mapping

from ..errors import InconsistencyError, StructuralError
from .category import Category
from .report import DEFAULT_BOUNDS, Bounds, CoherenceReport


def _tag(prefix: str, cell):
    return f"{prefix}{cell}" if isinstance(cell, str) else (prefix, cell)


class Bicategory:
    TABLES = ("id1", "id2", "vcomp", "hcomp1", "hcomp2", "assoc", "lunit", "runit")

    def __init__(
        self,
        obs: Iterable[Hashable],
        one_cells: Mapping[Hashable, tuple],
        two_cells: Mapping[Hashable, tuple],
        id1: Mapping,
        id2: Mapping,
        vcomp: Mapping,
        hcomp1: Mapping,
        hcomp2: Mapping,
        assoc: Mapping,
        lunit: Mapping,
        runit: Mapping,
        name: str = "",
    ):
        self.obs = tuple(obs)
        self.one_cells = dict(one_cells)
        self.two_cells = dict(two_cells)
        self.id1 = dict(id1)
        self.id2 = dict(id2)
        self.vcomp = dict(vcomp)
        self.hcomp1 = dict(hcomp1)
        self.hcomp2 = dict(hcomp2)
        self.assoc = dict(assoc)
        self.lunit = dict(lunit)
        self.runit = dict(runit)
        self.name = name
        self._reindex()

    def _reindex(self) -> None:
        self._hom1: dict = defaultdict(list)
        self._out1: dict = defaultdict(list)
        for f, (x, y) in self.one_cells.items():
            self._hom1[(x, y)].append(f)
            self._out1[x].append(f)
        self._hom2: dict = defaultdict(list)
        for a, (f, g) in self.two_cells.items():
            self._hom2[(f, g)].append(a)
        self._inv: dict = {}
        self._homcat: dict = {}

    def replace(self, **tables) -> "Bicategory":
        """Copy with some tables swapped out (used for mutation testing)."""
        kw = {t: getattr(self, t) for t in self.TABLES}
        kw.update(tables)
        return Bicategory(self.obs, self.one_cells, self.two_cells, name=self.name, **kw)

    def __repr__(self) -> str:
        return (
            f"Bicategory({self.name or '?'}: {len(self.obs)} 0-cells, "
            f"{len(self.one_cells)} 1-cells, {len(self.two_cells)} 2-cells)"
        )

    def size(self) -> tuple[int, int, int]:
        return len(self.obs), len(self.one_cells), len(self.two_cells)

    def same_tables(self, other: "Bicategory") -> bool:
        return (
            set(self.obs) == set(other.obs)
            and self.one_cells == other.one_cells
            and self.two_cells == other.two_cells
            and all(getattr(self, t) == getattr(other, t) for t in self.TABLES)
        )

    # boundaries
    def src1(self, f):
        return self.one_cells[f][0]

    def tgt1(self, f):
        return self.one_cells[f][1]

    def src2(self, a):
        return self.two_cells[a][0]

    def tgt2(self, a):
        return self.two_cells[a][1]

    def hom(self, x, y) -> list:
        return self._hom1.get((x, y), [])

    def out(self, x) -> list:
        return self._out1.get(x, [])

    def cells(self, f, g) -> list:
        return self._hom2.get((f, g), [])

    # composition helpers; all raise KeyError on undefined composites
    def c1(self, *fs):
        out = fs[0]
        for f in fs[1:]:
            out = self.hcomp1[(out, f)]
        return out

    def v(self, *als):
        out = als[0]
        for a in als[1:]:
            out = self.vcomp[(out, a)]
        return out

    def h(self, a, b):
        return self.hcomp2[(a, b)]

    def wl(self, f, a):
        """Whisker ``f . a`` (1-cell on the left)."""
        return self.hcomp2[(self.id2[f], a)]

    def wr(self, a, g):
        """Whisker ``a . g`` (1-cell on the right)."""
        return self.hcomp2[(a, self.id2[g])]

    def inverse(self, a):
        """Two-sided vertical inverse of ``a``, or None."""
        if a in self._inv:
            return self._inv[a]
        f, g = self.two_cells[a]
        found = None
        for b in self.cells(g, f):
            if self.vcomp.get((a, b)) == self.id2.get(f) and self.vcomp.get((b, a)) == self.id2.get(g):
                found = b
                break
        self._inv[a] = found
        return found

    def inv(self, a):
        b = self.inverse(a)
        if b is None:
            raise InconsistencyError(f"2-cell {a!r} is not invertible in {self.name}")
        return b

    def is_invertible(self, a) -> bool:
        return self.inverse(a) is not None

    def a(self, f, g, h):
        return self.assoc[(f, g, h)]

    def ai(self, f, g, h):
        return self.inv(self.assoc[(f, g, h)])

    def l(self, f):
        return self.lunit[f]

    def li(self, f):
        return self.inv(self.lunit[f])

    def r(self, f):
        return self.runit[f]

    def ri(self, f):
        return self.inv(self.runit[f])

    def iso_cells(self, f, g) -> list:
        return [a for a in self.cells(f, g) if self.is_invertible(a)]

    def composable_pairs(self):
        for f, (_, y) in self.one_cells.items():
            for g in self.out(y):
                yield f, g

    def composable_triples(self):
        for f, g in self.composable_pairs():
            for h in self.out(self.tgt1(g)):
                yield f, g, h

    def hom_category(self, x, y) -> Category:
        key = (x, y)
        if key not in self._homcat:
            ones = self.hom(x, y)
            mors = {a: self.two_cells[a] for f in ones for g in ones for a in self.cells(f, g)}
            comp = {}
            for a, (f, g) in mors.items():
                for k in ones:
                    for b in self.cells(g, k):
                        comp[(a, b)] = self.vcomp[(a, b)]
            self._homcat[key] = Category(ones, mors, {f: self.id2[f] for f in ones}, comp, name=f"{self.name}({x},{y})")
        return self._homcat[key]

    def is_equivalence_1cell(self, f):
        """Return (g, unit, counit) exhibiting f as an equivalence, or None."""
        x, y = self.one_cells[f]
        for g in self.hom(y, x):
            units = self.iso_cells(self.id1[x], self.c1(f, g))
            counits = self.iso_cells(self.c1(g, f), self.id1[y])
            if units and counits:
                return g, units[0], counits[0]
        return None


def _structural(B: Bicategory) -> None:
    obs = set(B.obs)
    if len(obs) != len(B.obs):
        raise StructuralError("duplicate 0-cell ids")
    for f, st in B.one_cells.items():
        if len(st) != 2 or st[0] not in obs or st[1] not in obs:
            raise StructuralError(f"1-cell {f!r} has dangling endpoints {st!r}")
    for a, st in B.two_cells.items():
        if len(st) != 2 or st[0] not in B.one_cells or st[1] not in B.one_cells:
            raise StructuralError(f"2-cell {a!r} has dangling endpoints {st!r}")
        if B.one_cells[st[0]] != B.one_cells[st[1]]:
            raise StructuralError(f"2-cell {a!r} joins non-parallel 1-cells {st!r}")
    kinds = {
        "id1": (B.obs, B.one_cells),
        "id2": (B.one_cells, B.two_cells),
        "lunit": (B.one_cells, B.two_cells),
        "runit": (B.one_cells, B.two_cells),
    }
    for table, (dom, cod) in kinds.items():
        for k, v in getattr(B, table).items():
            if k not in dom or v not in cod:
                raise StructuralError(f"{table} entry {k!r} -> {v!r} is dangling")
    for table, dom, cod, arity in (
        ("vcomp", B.two_cells, B.two_cells, 2),
        ("hcomp1", B.one_cells, B.one_cells, 2),
        ("hcomp2", B.two_cells, B.two_cells, 2),
        ("assoc", B.one_cells, B.two_cells, 3),
    ):
        for k, v in getattr(B, table).items():
            if not isinstance(k, tuple) or len(k) != arity or any(c not in dom for c in k) or v not in cod:
                raise StructuralError(f"{table} entry {k!r} -> {v!r} is dangling")


def validate_bicategory(B: Bicategory, bounds: Bounds = DEFAULT_BOUNDS) -> CoherenceReport:
    """Enumerate every bicategory axiom instance; violations name the axiom."""
    bounds.check(*B.size(), what=repr(B))
    _structural(B)
    rep = CoherenceReport()
    ones, twos = B.one_cells, B.two_cells

    # totality and boundaries
    for x in B.obs:
        i = B.id1.get(x)
        if i is None:
            rep.add("totality", "id1", x)
        elif ones[i] != (x, x):
            rep.add("boundary", "id1", x)
    for f in ones:
        i = B.id2.get(f)
        if i is None:
            rep.add("totality", "id2", f)
        elif twos[i] != (f, f):
            rep.add("boundary", "id2", f)
    for a, (f, g) in twos.items():
        for b in [b for k in B.hom(*ones[g]) for b in B.cells(g, k)]:
            r = B.vcomp.get((a, b))
            if r is None:
                rep.add("totality", "vcomp", a, b)
            elif twos[r] != (f, twos[b][1]):
                rep.add("boundary", "vcomp", a, b)
    for f, g in B.composable_pairs():
        r = B.hcomp1.get((f, g))
        if r is None:
            rep.add("totality", "hcomp1", f, g)
        elif ones[r] != (B.src1(f), B.tgt1(g)):
            rep.add("boundary", "hcomp1", f, g)
    if not rep.ok:
        return rep
    for a, (f, f2) in twos.items():
        for g in B.out(B.tgt1(f)):
            for g2 in B.out(B.tgt1(f)):
                for b in B.cells(g, g2):
                    r = B.hcomp2.get((a, b))
                    if r is None:
                        rep.add("totality", "hcomp2", a, b)
                    elif twos[r] != (B.hcomp1[(f, g)], B.hcomp1[(f2, g2)]):
                        rep.add("boundary", "hcomp2", a, b)
    for f, g, h in B.composable_triples():
        r = B.assoc.get((f, g, h))
        if r is None:
            rep.add("totality", "assoc", f, g, h)
        elif twos[r] != (B.c1(B.c1(f, g), h), B.c1(f, B.c1(g, h))):
            rep.add("boundary", "assoc", f, g, h)
    for f, (x, y) in ones.items():
        for table, whole in (("lunit", B.hcomp1[(B.id1[x], f)]), ("runit", B.hcomp1[(f, B.id1[y])])):
            r = getattr(B, table).get(f)
            if r is None:
                rep.add("totality", table, f)
            elif twos[r] != (whole, f):
                rep.add("boundary", table, f)
    if any(v.axiom == "totality" for v in rep.violations):
        return rep

    V, H = B.vcomp.get, B.hcomp2.get

    def v(*xs):
        out = xs[0]
        for x in xs[1:]:
            if out is None or x is None:
                return None
            out = V((out, x))
        return out

    def h(a, b):
        if a is None or b is None:
            return None
        return H((a, b))

    def differ(lhs, rhs) -> bool:
        return lhs is not None and rhs is not None and lhs != rhs

    # each hom is a category under vertical composition
    for a, (f, g) in twos.items():
        if differ(v(B.id2[f], a), a) or differ(v(a, B.id2[g]), a):
            rep.add("hom-category", "unit", a)
        par = B.hom(*ones[f])
        for k in par:
            for b in B.cells(g, k):
                for m in par:
                    for c in B.cells(k, m):
                        if differ(v(v(a, b), c), v(a, v(b, c))):
                            rep.add("hom-category", "associativity", a, b, c)

    # functoriality of horizontal composition
    for f, g in B.composable_pairs():
        if differ(h(B.id2[f], B.id2[g]), B.id2.get(B.hcomp1[(f, g)])):
            rep.add("interchange", "identity", f, g)
    for a, (f, f1) in twos.items():
        for f2 in B.hom(*ones[f]):
            for a2 in B.cells(f1, f2):
                for g in B.out(B.tgt1(f)):
                    for g1 in B.out(B.tgt1(f)):
                        for b in B.cells(g, g1):
                            for g2 in B.out(B.tgt1(f)):
                                for b2 in B.cells(g1, g2):
                                    if differ(h(v(a, a2), v(b, b2)), v(h(a, b), h(a2, b2))):
                                        rep.add("interchange", "middle-four", a, a2, b, b2)

    # invertibility of structure cells
    for (f, g, k), a in B.assoc.items():
        if B.inverse(a) is None:
            rep.add("invertibility", "assoc", f, g, k)
    for table in ("lunit", "runit"):
        for f, a in getattr(B, table).items():
            if B.inverse(a) is None:
                rep.add("invertibility", table, f)

    # naturality of associator and unitors
    id2 = B.id2
    for f, g, k in B.composable_triples():
        for a in [a for f2 in B.hom(*ones[f]) for a in B.cells(f, f2)]:
            for b in [b for g2 in B.hom(*ones[g]) for b in B.cells(g, g2)]:
                for c in [c for k2 in B.hom(*ones[k]) for c in B.cells(k, k2)]:
                    f2, g2, k2 = twos[a][1], twos[b][1], twos[c][1]
                    lhs = v(h(h(a, b), c), B.assoc.get((f2, g2, k2)))
                    rhs = v(B.assoc.get((f, g, k)), h(a, h(b, c)))
                    if differ(lhs, rhs):
                        rep.add("naturality", "assoc", a, b, c)
    for a, (f, f2) in twos.items():
        x, y = ones[f]
        if differ(v(h(id2[B.id1[x]], a), B.lunit.get(f2)), v(B.lunit.get(f), a)):
            rep.add("naturality", "lunit", a)
        if differ(v(h(a, id2[B.id1[y]]), B.runit.get(f2)), v(B.runit.get(f), a)):
            rep.add("naturality", "runit", a)

    # pentagon and triangle
    for f, g, k in B.composable_triples():
        for m in B.out(B.tgt1(k)):
            fg, gk, km = B.c1(f, g), B.c1(g, k), B.c1(k, m)
            lhs = v(
                h(B.assoc[(f, g, k)], id2[m]),
                B.assoc[(f, gk, m)],
                h(id2[f], B.assoc[(g, k, m)]),
            )
            rhs = v(B.assoc[(fg, k, m)], B.assoc[(f, g, km)])
            if differ(lhs, rhs):
                rep.add("pentagon", f, g, k, m)
    for f, g in B.composable_pairs():
        y = B.tgt1(f)
        lhs = v(B.assoc[(f, B.id1[y], g)], h(id2[f], B.lunit[g]))
        rhs = h(B.runit[f], id2[g])
        if differ(lhs, rhs):
            rep.add("triangle", f, g)
    return rep


# constructions

def strict_bicategory(obs, one_cells, two_cells, id1, id2, vcomp, hcomp1, hcomp2, name: str = "") -> Bicategory:
    """Fill in identity associators and unitors for a strict 2-category."""
    B = Bicategory(obs, one_cells, two_cells, id1, id2, vcomp, hcomp1, hcomp2, {}, {}, {}, name=name)
    B.assoc = {(f, g, k): id2[B.c1(f, g, k)] for f, g, k in B.composable_triples()}
    B.lunit = {f: id2[f] for f in one_cells}
    B.runit = {f: id2[f] for f in one_cells}
    return B


def locally_discrete(C: Category, name: str = "") -> Bicategory:
    """The locally discrete bicategory on C: only identity 2-cells."""
    two = {_tag("1:", m): (m, m) for m in C.morphisms}
    id2 = {m: _tag("1:", m) for m in C.morphisms}
    vcomp = {(i, i): i for i in two}
    hcomp2 = {(id2[m], id2[n]): id2[r] for (m, n), r in C.comp.items()}
    return strict_bicategory(
        C.objects, C.morphisms, two, C.identity, id2, vcomp, C.comp, hcomp2, name=name or f"LD({C.name})"
    )


def product_bicategory(B1: Bicategory, B2: Bicategory, name: str = "") -> Bicategory:
    obs = [(x, y) for x in B1.obs for y in B2.obs]
    one = {
        (f, g): ((B1.src1(f), B2.src1(g)), (B1.tgt1(f), B2.tgt1(g)))
        for f in B1.one_cells
        for g in B2.one_cells
    }
    two = {(a, b): ((B1.src2(a), B2.src2(b)), (B1.tgt2(a), B2.tgt2(b))) for a in B1.two_cells for b in B2.two_cells}

    def pair_table(t1, t2):
        return {tuple(zip(k1, k2)): (v1, v2) for k1, v1 in t1.items() for k2, v2 in t2.items() if len(k1) == len(k2)}

    return Bicategory(
        obs,
        one,
        two,
        {(x, y): (B1.id1[x], B2.id1[y]) for (x, y) in obs},
        {(f, g): (B1.id2[f], B2.id2[g]) for (f, g) in one},
        pair_table(B1.vcomp, B2.vcomp),
        pair_table(B1.hcomp1, B2.hcomp1),
        pair_table(B1.hcomp2, B2.hcomp2),
        pair_table(B1.assoc, B2.assoc),
        {(f, g): (B1.lunit[f], B2.lunit[g]) for (f, g) in one},
        {(f, g): (B1.runit[f], B2.runit[g]) for (f, g) in one},
        name=name or f"{B1.name}x{B2.name}",
    )
