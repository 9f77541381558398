"""Finite 1-categories and functors, stored as explicit tables.

Composition is diagrammatic: ``comp[(m, n)]`` is "m then n".
"""
from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Iterable, Mapping

from ..errors import StructuralError
from ..ids import ordered
from .report import CoherenceReport


class Category:
    def __init__(
        self,
        objects: Iterable[Hashable],
        morphisms: Mapping[Hashable, tuple],
        identity: Mapping[Hashable, Hashable],
        comp: Mapping[tuple, Hashable],
        name: str = "",
    ):
        self.objects = tuple(objects)
        self.morphisms = dict(morphisms)
        self.identity = dict(identity)
        self.comp = dict(comp)
        self.name = name
        self._hom: dict[tuple, list] = defaultdict(list)
        for m, (s, t) in self.morphisms.items():
            self._hom[(s, t)].append(m)
        self._inverse: dict = {}

    def __repr__(self) -> str:
        return f"Category({self.name or '?'}: {len(self.objects)} obs, {len(self.morphisms)} mors)"

    def src(self, m):
        return self.morphisms[m][0]

    def tgt(self, m):
        return self.morphisms[m][1]

    def hom(self, x, y) -> list:
        return self._hom.get((x, y), [])

    def then(self, *ms):
        out = ms[0]
        for m in ms[1:]:
            out = self.comp[(out, m)]
        return out

    def inverse(self, m):
        """Two-sided inverse of ``m`` or None."""
        if m in self._inverse:
            return self._inverse[m]
        s, t = self.morphisms[m]
        found = None
        for n in self.hom(t, s):
            if self.comp.get((m, n)) == self.identity[s] and self.comp.get((n, m)) == self.identity[t]:
                found = n
                break
        self._inverse[m] = found
        return found

    def is_iso(self, m) -> bool:
        return self.inverse(m) is not None

    def composable_pairs(self):
        for m, (_, t) in self.morphisms.items():
            for y in self.objects:
                for n in self.hom(t, y):
                    yield m, n


class Functor1:
    """A functor between finite categories given by object and morphism maps."""

    def __init__(self, source: Category, target: Category, ob: Mapping, mor: Mapping, name: str = ""):
        self.source = source
        self.target = target
        self.ob = dict(ob)
        self.mor = dict(mor)
        self.name = name

    def __repr__(self) -> str:
        return f"Functor1({self.name or '?'}: {self.source!r} -> {self.target!r})"

    def hom_map(self, c1, c2) -> dict:
        return {m: self.mor[m] for m in self.source.hom(c1, c2)}


def identity_functor_1cat(C: Category) -> Functor1:
    return Functor1(C, C, {x: x for x in C.objects}, {m: m for m in C.morphisms}, name=f"id({C.name})")


def _structural_category(C: Category) -> None:
    obs = set(C.objects)
    if len(obs) != len(C.objects):
        raise StructuralError(f"duplicate object ids in {C!r}")
    for m, st in C.morphisms.items():
        if len(st) != 2 or st[0] not in obs or st[1] not in obs:
            raise StructuralError(f"morphism {m!r} has dangling endpoints {st!r}")
    for x, i in C.identity.items():
        if x not in obs:
            raise StructuralError(f"identity declared for unknown object {x!r}")
        if i not in C.morphisms:
            raise StructuralError(f"identity of {x!r} is unknown morphism {i!r}")
    for (m, n), r in C.comp.items():
        for c in (m, n, r):
            if c not in C.morphisms:
                raise StructuralError(f"composition entry ({m!r}, {n!r}) -> {r!r} mentions unknown {c!r}")


def validate_category(C: Category) -> CoherenceReport:
    """Check identity, boundary, unit and associativity laws by enumeration."""
    _structural_category(C)
    rep = CoherenceReport()
    for x in C.objects:
        if x not in C.identity:
            rep.add("totality", "identity", x)
        elif C.morphisms[C.identity[x]] != (x, x):
            rep.add("boundary", "identity", x)
    pairs = list(C.composable_pairs())
    for m, n in pairs:
        r = C.comp.get((m, n))
        if r is None:
            rep.add("totality", m, n)
        elif C.morphisms[r] != (C.src(m), C.tgt(n)):
            rep.add("boundary", m, n, r)
    for (m, n) in C.comp:
        if C.tgt(m) != C.src(n):
            rep.add("boundary", "non-composable entry", m, n)
    if not rep.ok:
        return rep
    for m, (s, t) in C.morphisms.items():
        if C.comp[(C.identity[s], m)] != m or C.comp[(m, C.identity[t])] != m:
            rep.add("unit", m)
    for m, n in pairs:
        mn = C.comp[(m, n)]
        for z in C.objects:
            for k in C.hom(C.tgt(n), z):
                if C.comp[(mn, k)] != C.comp[(m, C.comp[(n, k)])]:
                    rep.add("associativity", m, n, k)
    return rep


def validate_functor_1cat(F: Functor1) -> CoherenceReport:
    S, T = F.source, F.target
    rep = CoherenceReport()
    for x in S.objects:
        if x not in F.ob or F.ob[x] not in T.identity:
            raise StructuralError(f"object map undefined or dangling at {x!r}")
    for m, (s, t) in S.morphisms.items():
        if m not in F.mor or F.mor[m] not in T.morphisms:
            raise StructuralError(f"morphism map undefined or dangling at {m!r}")
        if T.morphisms[F.mor[m]] != (F.ob[s], F.ob[t]):
            rep.add("boundary", m)
    if not rep.ok:
        return rep
    for x in S.objects:
        if F.mor[S.identity[x]] != T.identity[F.ob[x]]:
            rep.add("identity", x)
    for m, n in S.composable_pairs():
        if F.mor[S.comp[(m, n)]] != T.comp[(F.mor[m], F.mor[n])]:
            rep.add("composition", m, n)
    return rep


def compose_functors_1cat(F: Functor1, G: Functor1) -> Functor1:
    """F then G."""
    return Functor1(
        F.source,
        G.target,
        {x: G.ob[F.ob[x]] for x in F.source.objects},
        {m: G.mor[F.mor[m]] for m in F.source.morphisms},
        name=f"{F.name};{G.name}",
    )


def poset_category(elements: Iterable[Hashable], relations: Iterable[tuple], name: str = "") -> Category:
    """Category of a finite poset given by generating relations (x, y) meaning x <= y.

    Morphism ids are the strings ``"x<=y"`` when both ends are strings, else tuples.
    """
    elements = list(elements)
    le = {(x, x) for x in elements} | set(relations)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(le):
            for (c, d) in list(le):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True

    def mid(a, b):
        if isinstance(a, str) and isinstance(b, str):
            return f"{a}<={b}"
        return ("le", a, b)

    morphisms = {mid(a, b): (a, b) for (a, b) in ordered(le)}
    identity = {x: mid(x, x) for x in elements}
    comp = {}
    for (a, b) in le:
        for (c, d) in le:
            if b == c:
                comp[(mid(a, b), mid(c, d))] = mid(a, d)
    return Category(elements, morphisms, identity, comp, name=name)


def arrow_category(C: Category, name: str = "") -> Category:
    """Arrow category: objects are morphisms, morphisms are commuting squares (u, w, s, t)."""
    morphisms = {}
    for u, (a, b) in C.morphisms.items():
        for w, (c, d) in C.morphisms.items():
            for s in C.hom(a, c):
                for t in C.hom(b, d):
                    if C.comp[(s, w)] == C.comp[(u, t)]:
                        morphisms[(u, w, s, t)] = (u, w)
    identity = {u: (u, u, C.identity[a], C.identity[b]) for u, (a, b) in C.morphisms.items()}
    comp = {}
    for m1 in morphisms:
        u, w, s, t = m1
        for m2 in morphisms:
            if m2[0] == w:
                _, v, s2, t2 = m2
                comp[(m1, m2)] = (u, v, C.comp[(s, s2)], C.comp[(t, t2)])
    return Category(list(C.morphisms), morphisms, identity, comp, name=name or f"{C.name}^->")


def product_category(C: Category, D: Category, name: str = "") -> Category:
    objects = [(x, y) for x in C.objects for y in D.objects]
    morphisms = {(m, n): ((C.src(m), D.src(n)), (C.tgt(m), D.tgt(n))) for m in C.morphisms for n in D.morphisms}
    identity = {(x, y): (C.identity[x], D.identity[y]) for (x, y) in objects}
    comp = {
        ((m1, n1), (m2, n2)): (C.comp[(m1, m2)], D.comp[(n1, n2)])
        for (m1, m2) in C.comp
        for (n1, n2) in D.comp
    }
    return Category(objects, morphisms, identity, comp, name=name or f"{C.name}x{D.name}")


def discrete_category(objects: Iterable[Hashable], name: str = "") -> Category:
    objects = list(objects)
    ids = {x: f"1_{x}" if isinstance(x, str) else ("1", x) for x in objects}
    return Category(objects, {i: (x, x) for x, i in ids.items()}, ids, {(i, i): i for i in ids.values()}, name=name)
