"""Lax functors, oplax transformations, modifications and icons.

Constraint directions: for ``variance`` "lax" and "pseudo" (and strict
functors) the unit constraint is ``1_{Fx} => F(1_x)`` and the composition
constraint ``Ff . Fg => F(f.g)``. For "oplax" both point the other way.
Transformation 2-cells point ``F(f) . t(a') => t(a) . G(f)``.
"""
from __future__ import annotations

import itertools
import math
from typing import Mapping

from .core.bicategory import Bicategory
from .core.category import Functor1
from .core.report import CoherenceReport
from .errors import SizeLimitError, StructuralError, VarianceError
from .ids import ordered, sort_key

VARIANCES = ("lax", "oplax", "pseudo")

# refuse to enumerate more candidate transformations than this
MAX_CANDIDATES = 200_000


class LaxFunctor:
    def __init__(
        self,
        source: Bicategory,
        target: Bicategory,
        ob: Mapping,
        map1: Mapping,
        map2: Mapping,
        unit: Mapping,
        comp: Mapping,
        variance: str = "lax",
        strict: bool = False,
        name: str = "",
    ):
        if variance not in VARIANCES:
            raise ValueError(f"unknown variance {variance!r}")
        self.source = source
        self.target = target
        self.ob = dict(ob)
        self.map1 = dict(map1)
        self.map2 = dict(map2)
        self.unit = dict(unit)
        self.comp = dict(comp)
        self.variance = variance
        self.strict = strict
        self.name = name
        self._homfun: dict = {}

    def __repr__(self) -> str:
        kind = "strict" if self.strict else self.variance
        return f"LaxFunctor({self.name or '?'}: {self.source.name} -> {self.target.name}, {kind})"

    @property
    def pseudo(self) -> bool:
        return self.strict or self.variance == "pseudo"

    def same_tables(self, other: "LaxFunctor") -> bool:
        return (
            self.ob == other.ob
            and self.map1 == other.map1
            and self.map2 == other.map2
            and self.unit == other.unit
            and self.comp == other.comp
        )

    def lax_unit(self, x):
        """Unit constraint in the direction ``1 => F(1)``."""
        if self.variance != "oplax":
            return self.unit[x]
        return self._invert(self.unit[x])

    def lax_comp(self, f, g):
        if self.variance != "oplax":
            return self.comp[(f, g)]
        return self._invert(self.comp[(f, g)])

    def oplax_unit(self, x):
        if self.variance == "oplax":
            return self.unit[x]
        return self._invert(self.unit[x])

    def oplax_comp(self, f, g):
        if self.variance == "oplax":
            return self.comp[(f, g)]
        return self._invert(self.comp[(f, g)])

    def _invert(self, a):
        b = self.target.inverse(a)
        if b is None:
            raise VarianceError(f"constraint {a!r} of {self.name} is not invertible")
        return b

    def hom_functor(self, x, y) -> Functor1:
        """The local functor ``F_{x,y}`` between hom-categories."""
        key = (x, y)
        if key not in self._homfun:
            S = self.source.hom_category(x, y)
            T = self.target.hom_category(self.ob[x], self.ob[y])
            self._homfun[key] = Functor1(
                S,
                T,
                {f: self.map1[f] for f in S.objects},
                {a: self.map2[a] for a in S.morphisms},
                name=f"{self.name}[{x},{y}]",
            )
        return self._homfun[key]


def strict_functor(source: Bicategory, target: Bicategory, ob, map1, map2, name: str = "") -> LaxFunctor:
    """Strict functor with identity constraints filled in."""
    unit = {x: target.id2[target.id1[ob[x]]] for x in source.obs}
    comp = {(f, g): target.id2[map1[source.hcomp1[(f, g)]]] for f, g in source.composable_pairs()}
    return LaxFunctor(source, target, ob, map1, map2, unit, comp, variance="pseudo", strict=True, name=name)


def identity_functor(B: Bicategory) -> LaxFunctor:
    return strict_functor(
        B, B, {x: x for x in B.obs}, {f: f for f in B.one_cells}, {a: a for a in B.two_cells}, name=f"id({B.name})"
    )


def validate_functor(F: LaxFunctor) -> CoherenceReport:
    A, E = F.source, F.target
    rep = CoherenceReport()
    for table, dom, cod in (
        ("ob", A.obs, E.obs),
        ("map1", A.one_cells, E.one_cells),
        ("map2", A.two_cells, E.two_cells),
        ("unit", A.obs, E.two_cells),
    ):
        tab = getattr(F, table)
        for k in dom:
            if k not in tab:
                rep.add("totality", table, k)
            elif tab[k] not in cod:
                raise StructuralError(f"{table}[{k!r}] = {tab[k]!r} is not a cell of {E.name}")
    for f, g in A.composable_pairs():
        if (f, g) not in F.comp:
            rep.add("totality", "comp", f, g)
        elif F.comp[(f, g)] not in E.two_cells:
            raise StructuralError(f"comp[{(f, g)!r}] is not a cell of {E.name}")
    if not rep.ok:
        return rep

    ob, m1, m2 = F.ob, F.map1, F.map2
    for f, (x, y) in A.one_cells.items():
        if E.one_cells[m1[f]] != (ob[x], ob[y]):
            rep.add("boundary", "map1", f)
    for a, (f, g) in A.two_cells.items():
        if E.two_cells[m2[a]] != (m1[f], m1[g]):
            rep.add("boundary", "map2", a)
    lax = F.variance != "oplax"
    for x in A.obs:
        u = (E.id1[ob[x]], m1[A.id1[x]])
        if E.two_cells[F.unit[x]] != (u if lax else u[::-1]):
            rep.add("boundary", "unit", x)
    for f, g in A.composable_pairs():
        c = (E.c1(m1[f], m1[g]), m1[A.c1(f, g)])
        if E.two_cells[F.comp[(f, g)]] != (c if lax else c[::-1]):
            rep.add("boundary", "comp", f, g)
    if not rep.ok:
        return rep

    # per-hom functoriality
    for f in A.one_cells:
        if m2[A.id2[f]] != E.id2[m1[f]]:
            rep.add("hom-functoriality", "identity", f)
    for (a, b), c in A.vcomp.items():
        if m2[c] != E.v(m2[a], m2[b]):
            rep.add("hom-functoriality", "composition", a, b)

    u, cm = F.unit, F.comp
    v, h, wl, wr = E.v, E.h, E.wl, E.wr
    # naturality of the composition constraint
    for f, g in A.composable_pairs():
        for a in [a for f2 in A.hom(*A.one_cells[f]) for a in A.cells(f, f2)]:
            for b in [b for g2 in A.hom(*A.one_cells[g]) for b in A.cells(g, g2)]:
                f2, g2 = A.tgt2(a), A.tgt2(b)
                if lax:
                    lhs, rhs = v(cm[(f, g)], m2[A.h(a, b)]), v(h(m2[a], m2[b]), cm[(f2, g2)])
                else:
                    lhs, rhs = v(m2[A.h(a, b)], cm[(f2, g2)]), v(cm[(f, g)], h(m2[a], m2[b]))
                if lhs != rhs:
                    rep.add("constraint-naturality", a, b)
    # associativity
    for f, g, k in A.composable_triples():
        Ff, Fg, Fk = m1[f], m1[g], m1[k]
        fg, gk = A.c1(f, g), A.c1(g, k)
        if lax:
            lhs = v(wr(cm[(f, g)], Fk), cm[(fg, k)], m2[A.a(f, g, k)])
            rhs = v(E.a(Ff, Fg, Fk), wl(Ff, cm[(g, k)]), cm[(f, gk)])
        else:
            lhs = v(m2[A.a(f, g, k)], cm[(f, gk)], wl(Ff, cm[(g, k)]))
            rhs = v(cm[(fg, k)], wr(cm[(f, g)], Fk), E.a(Ff, Fg, Fk))
        if lhs != rhs:
            rep.add("constraint-associativity", f, g, k)
    # unity
    for f, (x, y) in A.one_cells.items():
        Ff = m1[f]
        if lax:
            left = (E.l(Ff), v(wr(u[x], Ff), cm[(A.id1[x], f)], m2[A.l(f)]))
            right = (E.r(Ff), v(wl(Ff, u[y]), cm[(f, A.id1[y])], m2[A.r(f)]))
        else:
            left = (m2[A.l(f)], v(cm[(A.id1[x], f)], wr(u[x], Ff), E.l(Ff)))
            right = (m2[A.r(f)], v(cm[(f, A.id1[y])], wl(Ff, u[y]), E.r(Ff)))
        if left[0] != left[1]:
            rep.add("constraint-unity", "left", f)
        if right[0] != right[1]:
            rep.add("constraint-unity", "right", f)

    if F.pseudo:
        for x, c in u.items():
            if not E.is_invertible(c):
                rep.add("pseudo-invertibility", "unit", x)
        for fg, c in cm.items():
            if not E.is_invertible(c):
                rep.add("pseudo-invertibility", "comp", *fg)
    if F.strict:
        for x in A.obs:
            if m1[A.id1[x]] != E.id1[ob[x]] or u[x] != E.id2[E.id1[ob[x]]]:
                rep.add("strictness", "unit", x)
        for f, g in A.composable_pairs():
            if m1[A.c1(f, g)] != E.c1(m1[f], m1[g]) or cm[(f, g)] != E.id2[m1[A.c1(f, g)]]:
                rep.add("strictness", "comp", f, g)
    return rep


def _result_variance(F: LaxFunctor, G: LaxFunctor) -> str:
    kinds = {("pseudo" if X.pseudo else X.variance) for X in (F, G)}
    if kinds == {"pseudo"}:
        return "pseudo"
    if kinds == {"lax", "oplax"}:
        raise VarianceError(f"cannot compose {F!r} with {G!r}: lax and oplax")
    return (kinds - {"pseudo"}).pop()


def compose_functors(F: LaxFunctor, G: LaxFunctor, name: str = "") -> LaxFunctor:
    """F then G, with pasted constraints."""
    if F.target is not G.source:
        raise StructuralError(f"cannot compose {F!r} with {G!r}: target/source mismatch")
    variance = _result_variance(F, G)
    A, E = F.source, G.target
    ob = {x: G.ob[F.ob[x]] for x in A.obs}
    map1 = {f: G.map1[F.map1[f]] for f in A.one_cells}
    map2 = {a: G.map2[F.map2[a]] for a in A.two_cells}
    if variance == "oplax":
        unit = {x: E.v(G.map2[F.oplax_unit(x)], G.oplax_unit(F.ob[x])) for x in A.obs}
        comp = {
            (f, g): E.v(G.map2[F.oplax_comp(f, g)], G.oplax_comp(F.map1[f], F.map1[g]))
            for f, g in A.composable_pairs()
        }
    else:
        unit = {x: E.v(G.lax_unit(F.ob[x]), G.map2[F.lax_unit(x)]) for x in A.obs}
        comp = {
            (f, g): E.v(G.lax_comp(F.map1[f], F.map1[g]), G.map2[F.lax_comp(f, g)])
            for f, g in A.composable_pairs()
        }
    return LaxFunctor(
        A, E, ob, map1, map2, unit, comp,
        variance=variance,
        strict=F.strict and G.strict,
        name=name or f"{F.name};{G.name}",
    )


def constant_functor(A: Bicategory, E: Bicategory, x, name: str = "") -> LaxFunctor:
    one = E.id1[x]
    i = E.id2[one]
    return LaxFunctor(
        A,
        E,
        {a: x for a in A.obs},
        {f: one for f in A.one_cells},
        {a: i for a in A.two_cells},
        {a: i for a in A.obs},
        {fg: E.l(one) for fg in A.composable_pairs()},
        variance="pseudo",
        name=name or f"const({x})",
    )


def _cell_items(d: Mapping) -> tuple:
    return tuple((k, d[k]) for k in ordered(d))


class OplaxTransformation:
    def __init__(self, F: LaxFunctor, G: LaxFunctor, comp1: Mapping, comp2: Mapping, name: str = ""):
        self.F = F
        self.G = G
        self.comp1 = dict(comp1)
        self.comp2 = dict(comp2)
        self.name = name

    def __repr__(self) -> str:
        return f"OplaxTransformation({self.name or '?'}: {self.F.name} => {self.G.name})"

    def key(self) -> tuple:
        return (_cell_items(self.comp1), _cell_items(self.comp2))

    def same_components(self, other: "OplaxTransformation") -> bool:
        return self.comp1 == other.comp1 and self.comp2 == other.comp2


class Modification:
    def __init__(self, sigma: OplaxTransformation, tau: OplaxTransformation, comp: Mapping, name: str = ""):
        self.sigma = sigma
        self.tau = tau
        self.comp = dict(comp)
        self.name = name

    def __repr__(self) -> str:
        return f"Modification({self.name or '?'})"

    def key(self) -> tuple:
        return (self.sigma.key(), self.tau.key(), _cell_items(self.comp))


class Icon:
    """Functors agreeing on objects plus 2-cells ``F(f) => G(f)``."""

    def __init__(self, F: LaxFunctor, G: LaxFunctor, comp: Mapping, name: str = ""):
        self.F = F
        self.G = G
        self.comp = dict(comp)
        self.name = name


def _check_endpoints(F: LaxFunctor, G: LaxFunctor) -> None:
    if F.source is not G.source or F.target is not G.target:
        raise StructuralError(f"{F!r} and {G!r} do not share source and target")


def _use_oplax_forms(F: LaxFunctor, G: LaxFunctor) -> bool:
    return F.variance == "oplax" or G.variance == "oplax"


def validate_transformation(t: OplaxTransformation, mode: str = "oplax") -> CoherenceReport:
    if mode not in ("oplax", "pseudo"):
        raise ValueError(f"mode must be 'oplax' or 'pseudo', not {mode!r}")
    F, G = t.F, t.G
    _check_endpoints(F, G)
    A, E = F.source, F.target
    rep = CoherenceReport()
    for a in A.obs:
        if a not in t.comp1:
            rep.add("totality", "comp1", a)
        elif t.comp1[a] not in E.one_cells:
            raise StructuralError(f"component {t.comp1[a]!r} is not a 1-cell of {E.name}")
        elif E.one_cells[t.comp1[a]] != (F.ob[a], G.ob[a]):
            rep.add("boundary", "comp1", a)
    for f in A.one_cells:
        if f not in t.comp2:
            rep.add("totality", "comp2", f)
        elif t.comp2[f] not in E.two_cells:
            raise StructuralError(f"component {t.comp2[f]!r} is not a 2-cell of {E.name}")
    if not rep.ok:
        return rep
    c1, c2 = t.comp1, t.comp2
    for f, (a, a2) in A.one_cells.items():
        want = (E.c1(F.map1[f], c1[a2]), E.c1(c1[a], G.map1[f]))
        if E.two_cells[c2[f]] != want:
            rep.add("boundary", "comp2", f)
    if not rep.ok:
        return rep

    v, wl, wr = E.v, E.wl, E.wr
    for r, (f, g) in A.two_cells.items():
        a, a2 = A.one_cells[f]
        if v(wr(F.map2[r], c1[a2]), c2[g]) != v(c2[f], wl(c1[a], G.map2[r])):
            rep.add("naturality", r)

    oplax_forms = _use_oplax_forms(F, G)
    for a in A.obs:
        ta, one = c1[a], A.id1[a]
        if oplax_forms:
            lhs = v(c2[one], wl(ta, G.oplax_unit(a)))
            rhs = v(wr(F.oplax_unit(a), ta), E.l(ta), E.ri(ta))
        else:
            lhs = v(wr(F.lax_unit(a), ta), c2[one])
            rhs = v(E.l(ta), E.ri(ta), wl(ta, G.lax_unit(a)))
        if lhs != rhs:
            rep.add("unity", a)
    for f, g in A.composable_pairs():
        a, a1 = A.one_cells[f]
        a2 = A.tgt1(g)
        Ff, Fg, Gf, Gg = F.map1[f], F.map1[g], G.map1[f], G.map1[g]
        paste = v(
            E.a(Ff, Fg, c1[a2]),
            wl(Ff, c2[g]),
            E.ai(Ff, c1[a1], Gg),
            wr(c2[f], Gg),
            E.a(c1[a], Gf, Gg),
        )
        fg = A.c1(f, g)
        if oplax_forms:
            lhs = v(c2[fg], wl(c1[a], G.oplax_comp(f, g)))
            rhs = v(wr(F.oplax_comp(f, g), c1[a2]), paste)
        else:
            lhs = v(wr(F.lax_comp(f, g), c1[a2]), c2[fg])
            rhs = v(paste, wl(c1[a], G.lax_comp(f, g)))
        if lhs != rhs:
            rep.add("composition", f, g)
    if mode == "pseudo":
        for f, c in c2.items():
            if not E.is_invertible(c):
                rep.add("pseudo-invertibility", f)
    return rep


def validate_modification(m: Modification) -> CoherenceReport:
    s, t = m.sigma, m.tau
    if s.F is not t.F or s.G is not t.G:
        raise StructuralError("modification endpoints are not parallel transformations")
    A, E = s.F.source, s.F.target
    rep = CoherenceReport()
    for a in A.obs:
        if a not in m.comp:
            rep.add("totality", a)
        elif m.comp[a] not in E.two_cells:
            raise StructuralError(f"component {m.comp[a]!r} is not a 2-cell of {E.name}")
        elif E.two_cells[m.comp[a]] != (s.comp1[a], t.comp1[a]):
            rep.add("boundary", a)
    if not rep.ok:
        return rep
    for f, (a, a2) in A.one_cells.items():
        lhs = E.v(s.comp2[f], E.wr(m.comp[a], s.G.map1[f]))
        rhs = E.v(E.wl(s.F.map1[f], m.comp[a2]), t.comp2[f])
        if lhs != rhs:
            rep.add("modification", f)
    return rep


def validate_icon(i: Icon) -> CoherenceReport:
    F, G = i.F, i.G
    _check_endpoints(F, G)
    A, E = F.source, F.target
    rep = CoherenceReport()
    if F.ob != G.ob:
        rep.add("boundary", "objects differ")
        return rep
    for f in A.one_cells:
        if f not in i.comp:
            rep.add("totality", f)
        elif E.two_cells.get(i.comp[f]) != (F.map1[f], G.map1[f]):
            rep.add("boundary", f)
    if not rep.ok:
        return rep
    for r, (f, g) in A.two_cells.items():
        if E.v(F.map2[r], i.comp[g]) != E.v(i.comp[f], G.map2[r]):
            rep.add("naturality", r)
    for a in A.obs:
        if E.v(F.lax_unit(a), i.comp[A.id1[a]]) != G.lax_unit(a):
            rep.add("unity", a)
    for f, g in A.composable_pairs():
        lhs = E.v(F.lax_comp(f, g), i.comp[A.c1(f, g)])
        rhs = E.v(E.h(i.comp[f], i.comp[g]), G.lax_comp(f, g))
        if lhs != rhs:
            rep.add("composition", f, g)
    return rep


def identity_transformation(F: LaxFunctor) -> OplaxTransformation:
    E = F.target
    comp1 = {a: E.id1[F.ob[a]] for a in F.source.obs}
    comp2 = {f: E.v(E.r(F.map1[f]), E.li(F.map1[f])) for f in F.source.one_cells}
    return OplaxTransformation(F, F, comp1, comp2, name=f"1_{F.name}")


def vcomp_transformations(s: OplaxTransformation, t: OplaxTransformation, name: str = "") -> OplaxTransformation:
    """Composite ``s | t`` with associators inserted explicitly."""
    if s.G is not t.F:
        raise StructuralError(f"{s!r} and {t!r} are not composable")
    F, G, H = s.F, s.G, t.G
    A, E = F.source, F.target
    comp1 = {a: E.c1(s.comp1[a], t.comp1[a]) for a in A.obs}
    comp2 = {}
    for f, (a, a2) in A.one_cells.items():
        Ff, Gf, Hf = F.map1[f], G.map1[f], H.map1[f]
        sa, sa2, ta, ta2 = s.comp1[a], s.comp1[a2], t.comp1[a], t.comp1[a2]
        comp2[f] = E.v(
            E.ai(Ff, sa2, ta2),
            E.wr(s.comp2[f], ta2),
            E.a(sa, Gf, ta2),
            E.wl(sa, t.comp2[f]),
            E.ai(sa, ta, Hf),
        )
    return OplaxTransformation(F, H, comp1, comp2, name=name or f"{s.name}|{t.name}")


def identity_modification(t: OplaxTransformation) -> Modification:
    E = t.F.target
    return Modification(t, t, {a: E.id2[c] for a, c in t.comp1.items()})


def vcomp_modifications(m: Modification, n: Modification) -> Modification:
    E = m.sigma.F.target
    return Modification(m.sigma, n.tau, {a: E.v(m.comp[a], n.comp[a]) for a in m.comp})


def whisker_modification_right(m: Modification, t: OplaxTransformation) -> Modification:
    """``m . t`` : (s|t) => (s'|t), given m : s => s'."""
    E = t.F.target
    return Modification(
        vcomp_transformations(m.sigma, t),
        vcomp_transformations(m.tau, t),
        {a: E.wr(m.comp[a], t.comp1[a]) for a in m.comp},
    )


def whisker_modification_left(t: OplaxTransformation, m: Modification) -> Modification:
    """``t . m`` : (t|s) => (t|s'), given m : s => s'."""
    E = t.F.target
    return Modification(
        vcomp_transformations(t, m.sigma),
        vcomp_transformations(t, m.tau),
        {a: E.wl(t.comp1[a], m.comp[a]) for a in m.comp},
    )


def is_invertible_modification(m: Modification) -> bool:
    E = m.sigma.F.target
    return all(E.is_invertible(c) for c in m.comp.values())


def postwhisker(x, p: LaxFunctor, F: LaxFunctor | None = None, G: LaxFunctor | None = None):
    """Postwhisker a transformation or modification by the pseudofunctor ``p``.

    ``F`` and ``G`` may pass in already-built composites so that repeated
    whiskering shares functor objects.
    """
    if isinstance(x, Modification):
        s = postwhisker(x.sigma, p, F, G)
        t = postwhisker(x.tau, p, s.F, s.G)
        return Modification(s, t, {a: p.map2[c] for a, c in x.comp.items()})
    t = x
    if t.F.target is not p.source:
        raise StructuralError(f"cannot postwhisker {t!r} by {p!r}")
    Fp = F or compose_functors(t.F, p)
    Gp = G or (Fp if t.G is t.F else compose_functors(t.G, p))
    B = p.target
    comp1 = {a: p.map1[c] for a, c in t.comp1.items()}
    comp2 = {}
    for f, (a, a2) in t.F.source.one_cells.items():
        if p.strict:
            comp2[f] = p.map2[t.comp2[f]]
        else:
            comp2[f] = B.v(
                p.lax_comp(t.F.map1[f], t.comp1[a2]),
                p.map2[t.comp2[f]],
                p.oplax_comp(t.comp1[a], t.G.map1[f]),
            )
    return OplaxTransformation(Fp, Gp, comp1, comp2, name=f"{t.name}.{p.name}")


def _bounded_product(options: list[list], what: str):
    total = math.prod(len(o) for o in options) if options else 1
    if total > MAX_CANDIDATES:
        raise SizeLimitError(f"{what}: {total} candidates exceed {MAX_CANDIDATES}")
    return itertools.product(*options)


def enumerate_transformations(F: LaxFunctor, G: LaxFunctor, mode: str = "oplax") -> list[OplaxTransformation]:
    """Every valid transformation ``F => G`` (pseudo mode: invertible 2-cells), in id order."""
    _check_endpoints(F, G)
    A, E = F.source, F.target
    objs = ordered(A.obs)
    ones = ordered(A.one_cells)
    out = []
    for comps in _bounded_product([ordered(E.hom(F.ob[a], G.ob[a])) for a in objs], "components"):
        c1 = dict(zip(objs, comps))
        options = []
        for f in ones:
            a, a2 = A.one_cells[f]
            cands = E.cells(E.c1(F.map1[f], c1[a2]), E.c1(c1[a], G.map1[f]))
            if mode == "pseudo":
                cands = [c for c in cands if E.is_invertible(c)]
            options.append(ordered(cands))
        for cells in _bounded_product(options, "transformation 2-cells"):
            t = OplaxTransformation(F, G, c1, dict(zip(ones, cells)))
            if validate_transformation(t, mode).ok:
                out.append(t)
    return out


def enumerate_modifications(s: OplaxTransformation, t: OplaxTransformation) -> list[Modification]:
    A, E = s.F.source, s.F.target
    objs = ordered(A.obs)
    out = []
    options = [ordered(E.cells(s.comp1[a], t.comp1[a])) for a in objs]
    for cells in _bounded_product(options, "modifications"):
        m = Modification(s, t, dict(zip(objs, cells)))
        if validate_modification(m).ok:
            out.append(m)
    return out


def transformation_sort_key(t: OplaxTransformation) -> str:
    return sort_key(t.key())
