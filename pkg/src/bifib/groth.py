"""Oplax comma bicategories, arrow bicategories and sections built from raris.

Objects of the comma ``B/p`` are triples ``(b, e, f : b -> pe)``; 1-cells
are ``(X, Y, s, t, alpha)`` with ``alpha : s.f' => f.pt``; 2-cells are
``(u, v, beta, gamma)`` with ``(beta.f') | alpha' = alpha | (f.p gamma)``.
The arrow bicategory of ``E`` is the comma of the identity functor, so its
objects are ``(e0, e0', u : e0 -> e0')``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core.bicategory import Bicategory
from .core.classical import is_rari_universal_1cat, rari_universal_lifts_1cat, unique_preimage
from .core.report import DEFAULT_BOUNDS, Bounds, CoherenceReport, Verdict
from .errors import InconsistencyError, PreconditionError, StructuralError
from .fibration import Cleavage, is_fibration
from .functor import (
    LaxFunctor,
    OplaxTransformation,
    compose_functors,
    enumerate_modifications,
    identity_functor,
    identity_transformation,
    postwhisker,
    strict_functor,
    validate_functor,
    validate_transformation,
)
from .ids import ordered


class CommaBicategory(Bicategory):
    """``B/p`` together with ``p`` and both strict projections."""

    p: LaxFunctor
    d0: LaxFunctor
    d1: LaxFunctor
    is_arrow: bool = False


def oplax_comma(p: LaxFunctor, bounds: Bounds = DEFAULT_BOUNDS, name: str = "") -> tuple[CommaBicategory, LaxFunctor]:
    if not p.pseudo:
        raise PreconditionError(f"{p!r} is not a pseudofunctor")
    E, B = p.source, p.target
    obs = [(b, e, f) for e in ordered(E.obs) for b in ordered(B.obs) for f in ordered(B.hom(b, p.ob[e]))]
    bounds.check(len(obs), 0, 0, "comma bicategory")
    pm = p.map1

    one = {}
    for X in obs:
        b, e, f = X
        for Y in obs:
            b2, e2, f2 = Y
            for s in B.hom(b, b2):
                sf2 = B.c1(s, f2)
                for t in E.hom(e, e2):
                    for al in B.cells(sf2, B.c1(f, pm[t])):
                        one[(X, Y, s, t, al)] = (X, Y)
        bounds.check(len(obs), len(one), 0, "comma bicategory")

    by_hom: dict = {}
    for u, xy in one.items():
        by_hom.setdefault(xy, []).append(u)
    two = {}
    for (X, Y), us in by_hom.items():
        f, f2 = X[2], Y[2]
        for u in us:
            _, _, s, t, al = u
            for u2 in us:
                _, _, s2, t2, al2 = u2
                for be in B.cells(s, s2):
                    lhs = B.v(B.wr(be, f2), al2)
                    for ga in E.cells(t, t2):
                        if lhs == B.v(al, B.wl(f, p.map2[ga])):
                            two[(u, u2, be, ga)] = (u, u2)
        bounds.check(len(obs), len(one), len(two), "comma bicategory")

    id1 = {}
    for X in obs:
        b, e, f = X
        al = B.v(B.l(f), B.ri(f), B.wl(f, p.lax_unit(e)))
        id1[X] = (X, X, B.id1[b], E.id1[e], al)
    id2 = {u: (u, u, B.id2[u[2]], E.id2[u[3]]) for u in one}

    hcomp1 = {}
    for u in one:
        X, Y, s, t, al = u
        f = X[2]
        for u2 in by_hom_out(by_hom, Y):
            _, Z, s2, t2, al2 = u2
            f2, f3 = Y[2], Z[2]
            comp = B.v(
                B.a(s, s2, f3),
                B.wl(s, al2),
                B.ai(s, f2, pm[t2]),
                B.wr(al, pm[t2]),
                B.a(f, pm[t], pm[t2]),
                B.wl(f, p.lax_comp(t, t2)),
            )
            hcomp1[(u, u2)] = (X, Z, B.c1(s, s2), E.c1(t, t2), comp)

    vcomp = {}
    for c, (u, u2) in two.items():
        for c2 in two_out(two, u2):
            vcomp[(c, c2)] = (u, c2[1], B.v(c[2], c2[2]), E.v(c[3], c2[3]))
    hcomp2 = {}
    two_by_src_obj: dict = {}
    for c, (u, _) in two.items():
        two_by_src_obj.setdefault(u[0], []).append(c)
    for c, (u, w) in two.items():
        for c2 in two_by_src_obj.get(u[1], []):
            hcomp2[(c, c2)] = (hcomp1[(u, c2[0])], hcomp1[(w, c2[1])], B.h(c[2], c2[2]), E.h(c[3], c2[3]))

    def cell(src, tgt, be, ga):
        key = (src, tgt, be, ga)
        if key not in two:
            raise InconsistencyError(f"componentwise coherence cell {key!r} is not a 2-cell of the comma")
        return key

    assoc = {}
    for (u, v), uv in hcomp1.items():
        for w in by_hom_out(by_hom, v[1]):
            assoc[(u, v, w)] = cell(
                hcomp1[(uv, w)], hcomp1[(u, hcomp1[(v, w)])], B.a(u[2], v[2], w[2]), E.a(u[3], v[3], w[3])
            )
    lunit = {u: cell(hcomp1[(id1[u[0]], u)], u, B.l(u[2]), E.l(u[3])) for u in one}
    runit = {u: cell(hcomp1[(u, id1[u[1]])], u, B.r(u[2]), E.r(u[3])) for u in one}

    C = CommaBicategory(
        obs, one, two, id1, id2, vcomp, hcomp1, hcomp2, assoc, lunit, runit,
        name=name or f"{B.name}/{p.name}",
    )
    C.p = p
    C.d0 = strict_functor(
        C, B, {X: X[0] for X in obs}, {u: u[2] for u in one}, {c: c[2] for c in two}, name="d0"
    )
    C.d1 = strict_functor(
        C, E, {X: X[1] for X in obs}, {u: u[3] for u in one}, {c: c[3] for c in two}, name="d1"
    )
    return C, C.d0


def by_hom_out(by_hom: Mapping, X) -> list:
    return [u for (X0, _), us in by_hom.items() if X0 == X for u in us]


def two_out(two: Mapping, u) -> list:
    return [c for c, (u0, _) in two.items() if u0 == u]


def arrow_bicategory(E: Bicategory, bounds: Bounds = DEFAULT_BOUNDS) -> CommaBicategory:
    """Arrows of ``E`` and oplax squares ``(s, t, alpha : s.u' => u.t)``."""
    C, _ = oplax_comma(identity_functor(E), bounds=bounds, name=f"{E.name}^I")
    C.is_arrow = True
    return C


def p_L(p: LaxFunctor, EI: CommaBicategory | None = None, Bp: CommaBicategory | None = None) -> LaxFunctor:
    """Strict functor ``E^I -> B/p`` sending ``u : e0 -> e0'`` to ``(p e0, e0', p u)``."""
    if not p.strict:
        raise PreconditionError(f"{p!r} is not strict")
    EI = EI or arrow_bicategory(p.source)
    Bp = Bp or oplax_comma(p)[0]

    def obj(X):
        e0, e1, u = X
        return (p.ob[e0], e1, p.map1[u])

    def one(u):
        X, Y, s, t, al = u
        return (obj(X), obj(Y), p.map1[s], t, p.map2[al])

    ob = {X: obj(X) for X in EI.obs}
    map1 = {u: one(u) for u in EI.one_cells}
    map2 = {c: (one(c[0]), one(c[1]), p.map2[c[2]], c[3]) for c in EI.two_cells}
    for what, table, cells in (("1-cell", map1, Bp.one_cells), ("2-cell", map2, Bp.two_cells)):
        for k, v in table.items():
            if v not in cells:
                raise InconsistencyError(f"image of {what} {k!r} is not in {Bp.name}")
    return strict_functor(EI, Bp, ob, map1, map2, name=f"{p.name}^L")


# raris and sections

def is_2rari_universal(q: LaxFunctor, e, b=None) -> Verdict:
    """Every local functor ``q_{e',e}`` admits a rari; witness: lifts per ``(e', d)``."""
    if not q.strict:
        raise PreconditionError(f"{q!r} is not strict")
    if b is not None and q.ob[e] != b:
        return Verdict(False, counterexample={"over": q.ob[e]})
    memo = q.__dict__.setdefault("_rari_memo", {})
    if e in memo:
        return memo[e]
    E, B = q.source, q.target
    lifts = {}
    result = None
    for e2 in ordered(E.obs):
        F = q.hom_functor(e2, e)
        for d in ordered(B.hom(q.ob[e2], q.ob[e])):
            found = rari_universal_lifts_1cat(F, d)
            if not found:
                result = Verdict(False, witness=lifts, counterexample={"source": e2, "one_cell": d})
                break
            lifts[(e2, d)] = found[0]
        if result is not None:
            break
    memo[e] = result if result is not None else Verdict(True, witness=lifts)
    return memo[e]


def is_rari_universal_1cell(q: LaxFunctor, f) -> bool:
    E = q.source
    x, y = E.one_cells[f]
    memo = q.__dict__.setdefault("_rari1_memo", {})
    if f not in memo:
        memo[f] = bool(is_rari_universal_1cat(q.hom_functor(x, y), f))
    return memo[f]


def build_lax_section(q: LaxFunctor, choices: Mapping, hom_choices: Mapping | None = None, order: str = "asc", check: bool = True) -> LaxFunctor:
    """Lax section of the strict functor ``q`` from 2-rari-universal object choices.

    ``hom_choices[(b, b')]`` maps each 1-cell ``d : b -> b'`` to a rari-universal
    lift in ``E(s b, s b')``; missing entries are synthesized in ``order``.
    Constraints are the unique preimages of identity 2-cells.
    """
    if not q.strict:
        raise PreconditionError(f"{q!r} is not strict")
    E, B = q.source, q.target
    hom_choices = dict(hom_choices or {})
    for b in B.obs:
        if b not in choices:
            raise PreconditionError(f"no lift chosen over {b!r}")
        e = choices[b]
        if q.ob[e] != b:
            raise PreconditionError(f"{e!r} does not lie over {b!r}")
        if check and not is_2rari_universal(q, e):
            raise PreconditionError(f"{e!r} is not a 2-rari-universal lift of {b!r}")
    ob = {b: choices[b] for b in B.obs}
    map1 = {}
    for b in B.obs:
        for b2 in B.obs:
            F = q.hom_functor(ob[b], ob[b2])
            given = hom_choices.get((b, b2), {})
            for d in B.hom(b, b2):
                if d in given:
                    c = given[d]
                    if F.ob.get(c) != d or not is_rari_universal_1cat(F, c):
                        raise PreconditionError(f"{c!r} is not a rari-universal lift of {d!r}")
                else:
                    found = rari_universal_lifts_1cat(F, d, order)
                    if not found:
                        raise PreconditionError(f"no rari-universal lift of {d!r}")
                    c = found[0]
                map1[d] = c
    map2 = {}
    for a, (d, d2) in B.two_cells.items():
        x, y = B.one_cells[d]
        map2[a] = unique_preimage(q.hom_functor(ob[x], ob[y]), map1[d], map1[d2], a)
    unit = {}
    for b in B.obs:
        one = B.id1[b]
        unit[b] = unique_preimage(q.hom_functor(ob[b], ob[b]), E.id1[ob[b]], map1[one], B.id2[one])
    comp = {}
    for f, g in B.composable_pairs():
        fg = B.c1(f, g)
        x, z = B.src1(f), B.tgt1(g)
        comp[(f, g)] = unique_preimage(q.hom_functor(ob[x], ob[z]), E.c1(map1[f], map1[g]), map1[fg], B.id2[fg])
    return LaxFunctor(B, E, ob, map1, map2, unit, comp, variance="lax", name=f"s({q.name})")


def is_section(q: LaxFunctor, s: LaxFunctor) -> bool:
    """``s`` then ``q`` equals the identity, table for table."""
    return compose_functors(s, q).same_tables(identity_functor(q.target))


def check_identity_condition(q: LaxFunctor) -> Verdict:
    """Identities on 2-rari-universal objects are rari-universal."""
    E = q.source
    for e in ordered(E.obs):
        if is_2rari_universal(q, e) and not is_rari_universal_1cell(q, E.id1[e]):
            return Verdict(False, counterexample={"object": e})
    return Verdict(True)


def check_composition_condition(q: LaxFunctor, objects=None) -> Verdict:
    """Rari-universal 1-cells are closed under composition.

    By default every composable pair is swept. ``objects`` restricts the sweep
    to 1-cells whose endpoints all lie in the given set, e.g. the objects a
    section actually chooses.
    """
    E = q.source
    allowed = set(E.obs) if objects is None else set(objects)
    good = [
        f for f in ordered(E.one_cells)
        if set(E.one_cells[f]) <= allowed and is_rari_universal_1cell(q, f)
    ]
    good_set = set(good)
    for f in good:
        for g in ordered(E.out(E.tgt1(f))):
            if g in good_set and not is_rari_universal_1cell(q, E.c1(f, g)):
                return Verdict(False, counterexample={"cells": (f, g), "composite": E.c1(f, g)})
    return Verdict(True)


def cartesian_arrow_objects(p: LaxFunctor, EI: Bicategory) -> list:
    """Objects of ``E^I`` that are Cartesian 1-cells of the strict fibration ``p``."""
    from .fibration import is_cartesian_1cell_strict

    return [X for X in EI.obs if is_cartesian_1cell_strict(p, X[2])]


def upgrade_section_to_pseudo(q: LaxFunctor, s: LaxFunctor) -> CoherenceReport:
    E = s.target
    rep = CoherenceReport()
    for b, c in s.unit.items():
        if not E.is_invertible(c):
            rep.add("unit-invertibility", b, c)
    for fg, c in s.comp.items():
        if not E.is_invertible(c):
            rep.add("composition-invertibility", fg, c)
    if not is_section(q, s):
        rep.add("section")
    return rep


def as_pseudo(s: LaxFunctor) -> LaxFunctor:
    return LaxFunctor(s.source, s.target, s.ob, s.map1, s.map2, s.unit, s.comp, variance="pseudo", name=s.name)


@dataclass(frozen=True)
class Equivalence:
    f: object
    g: object
    unit: object
    counit: object


def is_equivalence_data(E: Bicategory, eq: Equivalence) -> bool:
    x, y = E.one_cells[eq.f]
    if E.one_cells.get(eq.g) != (y, x):
        return False
    return (
        E.two_cells.get(eq.unit) == (E.id1[x], E.c1(eq.f, eq.g))
        and E.two_cells.get(eq.counit) == (E.c1(eq.g, eq.f), E.id1[y])
        and E.is_invertible(eq.unit)
        and E.is_invertible(eq.counit)
    )


def lift_equivalence(q: LaxFunctor, e, e2, eq: Equivalence, order: str = "asc") -> Equivalence:
    """Lift an equivalence ``q e ~ q e2`` to one between the 2-rari-universal ``e`` and ``e2``."""
    E, B = q.source, q.target
    for x in (e, e2):
        if not is_2rari_universal(q, x):
            raise PreconditionError(f"{x!r} is not 2-rari-universal")
    if not is_equivalence_data(B, eq) or B.one_cells[eq.f] != (q.ob[e], q.ob[e2]):
        raise PreconditionError("equivalence data does not match the base objects")
    fh = _rari_lift(q, e, e2, eq.f, order)
    gh = _rari_lift(q, e2, e, eq.g, order)
    unit = unique_preimage(q.hom_functor(e, e), E.id1[e], E.c1(fh, gh), eq.unit)
    counit = unique_preimage(q.hom_functor(e2, e2), E.c1(gh, fh), E.id1[e2], eq.counit)
    out = Equivalence(fh, gh, unit, counit)
    if not is_equivalence_data(E, out):
        raise InconsistencyError("lifted equivalence data is not invertible")
    return out


def _rari_lift(q: LaxFunctor, x, y, d, order: str = "asc"):
    found = rari_universal_lifts_1cat(q.hom_functor(x, y), d, order)
    if not found:
        raise PreconditionError(f"no rari-universal lift of {d!r} from {x!r} to {y!r}")
    return found[0]


def section_equivalence(q: LaxFunctor, s: LaxFunctor, s2: LaxFunctor, order: str = "asc") -> tuple[OplaxTransformation, CoherenceReport]:
    """Pseudonatural equivalence ``s => s2`` lying over the identity.

    Components are rari-universal lifts of identities; the 2-cells are the
    unique lifts of ``r_f | l_f^-1 : f.1 => 1.f``.
    """
    E, B = q.source, q.target
    comp1 = {b: _rari_lift(q, s.ob[b], s2.ob[b], B.id1[b], order) for b in B.obs}
    comp2 = {}
    for f, (b, b2) in B.one_cells.items():
        canon = B.v(B.r(f), B.li(f))
        comp2[f] = unique_preimage(
            q.hom_functor(s.ob[b], s2.ob[b2]),
            E.c1(s.map1[f], comp1[b2]),
            E.c1(comp1[b], s2.map1[f]),
            canon,
        )
    tau = OplaxTransformation(s, s2, comp1, comp2, name="tau")
    rep = CoherenceReport()
    rep.extend(validate_transformation(tau, mode="pseudo"), prefix="transformation:")
    for b, c in comp1.items():
        if E.is_equivalence_1cell(c) is None:
            rep.add("component-equivalence", b, c)
    whiskered = postwhisker(tau, q)
    trivial = identity_transformation(identity_functor(B))
    if whiskered.comp1 != trivial.comp1 or whiskered.comp2 != trivial.comp2:
        rep.add("over-identity")
    return tau, rep


def compare_section_equivalences(q: LaxFunctor, t1: OplaxTransformation, t2: OplaxTransformation) -> Verdict:
    """Exactly one modification ``t1 => t2`` lies over identities, and it is invertible."""
    E, B = q.source, q.target
    over = [
        m
        for m in enumerate_modifications(t1, t2)
        if all(B.two_cells[q.map2[c]][0] == B.two_cells[q.map2[c]][1] and q.map2[c] == B.id2[B.two_cells[q.map2[c]][0]] for c in m.comp.values())
    ]
    if len(over) != 1:
        return Verdict(False, counterexample={"count": len(over)})
    m = over[0]
    if not all(E.is_invertible(c) for c in m.comp.values()):
        return Verdict(False, counterexample={"not_invertible": m.comp})
    return Verdict(True, witness=m)


# correspondences for functors into comma and arrow bicategories

def _projection_target(C: CommaBicategory, G: LaxFunctor) -> LaxFunctor:
    return G if C.is_arrow else compose_functors(G, C.p)


def unpack(C: CommaBicategory, X: LaxFunctor) -> tuple[LaxFunctor, LaxFunctor, OplaxTransformation]:
    """``X : A -> B/p`` as ``(F, G, tau : F => G.p)``; for arrows ``tau : F => G``."""
    if X.target is not C:
        raise StructuralError(f"{X!r} does not land in {C.name}")
    F = compose_functors(X, C.d0, name=f"{X.name};d0")
    G = compose_functors(X, C.d1, name=f"{X.name};d1")
    comp1 = {a: X.ob[a][2] for a in X.source.obs}
    comp2 = {u: X.map1[u][4] for u in X.source.one_cells}
    return F, G, OplaxTransformation(F, _projection_target(C, G), comp1, comp2, name=f"{X.name};tau")


def pack(C: CommaBicategory, F: LaxFunctor, G: LaxFunctor, tau: OplaxTransformation, name: str = "") -> LaxFunctor:
    A = F.source
    if G.source is not A or F.target is not C.p.target or G.target is not C.p.source:
        raise StructuralError("functors do not match the comma bicategory")
    if tau.F is not F:
        raise StructuralError("transformation does not start at F")
    Gp = _projection_target(C, G)
    if not tau.G.same_tables(Gp):
        raise StructuralError("transformation does not end at G.p")
    kinds = {("pseudo" if X.pseudo else X.variance) for X in (F, G)}
    if kinds == {"lax", "oplax"}:
        raise StructuralError("F and G have incompatible variance")
    ob = {a: (F.ob[a], G.ob[a], tau.comp1[a]) for a in A.obs}
    map1 = {u: (ob[x], ob[y], F.map1[u], G.map1[u], tau.comp2[u]) for u, (x, y) in A.one_cells.items()}
    map2 = {c: (map1[u], map1[v], F.map2[c], G.map2[c]) for c, (u, v) in A.two_cells.items()}
    unit = {a: (C.id1[ob[a]], map1[A.id1[a]], F.unit[a], G.unit[a]) for a in A.obs}
    comp = {
        (u, v): (C.c1(map1[u], map1[v]), map1[A.c1(u, v)], F.comp[(u, v)], G.comp[(u, v)])
        for u, v in A.composable_pairs()
    }
    for what, table, cells in (("1-cell", map1, C.one_cells), ("2-cell", map2, C.two_cells)):
        for k, val in table.items():
            if val not in cells:
                raise StructuralError(f"image of {what} {k!r} is not a cell of {C.name}")
    for table in (unit, comp):
        for k, val in table.items():
            if val not in C.two_cells:
                raise StructuralError(f"constraint at {k!r} is not a cell of {C.name}")
    variance = "pseudo" if kinds == {"pseudo"} else (kinds - {"pseudo"}).pop()
    return LaxFunctor(A, C, ob, map1, map2, unit, comp, variance=variance, strict=F.strict and G.strict, name=name or f"<{F.name},{G.name}>")


def lift_to_pair(EI: CommaBicategory, Y: LaxFunctor) -> tuple[LaxFunctor, OplaxTransformation]:
    """A functor into ``E^I`` as ``(F_bar, tau_bar)``; ``tau_bar`` ends at the codomain functor."""
    Fb, _, tb = unpack(EI, Y)
    return Fb, tb


def pair_to_lift(EI: CommaBicategory, Fb: LaxFunctor, tb: OplaxTransformation) -> LaxFunctor:
    return pack(EI, Fb, tb.G, tb)


@dataclass(frozen=True)
class Correspondences:
    """The converters for one comma bicategory; each round trip is the identity on tables."""

    comma: CommaBicategory

    def pack(self, F: LaxFunctor, G: LaxFunctor, tau: OplaxTransformation, name: str = "") -> LaxFunctor:
        return pack(self.comma, F, G, tau, name)

    def unpack(self, X: LaxFunctor) -> tuple[LaxFunctor, LaxFunctor, OplaxTransformation]:
        return unpack(self.comma, X)

    def lift_to_pair(self, Y: LaxFunctor) -> tuple[LaxFunctor, OplaxTransformation]:
        return lift_to_pair(self.comma, Y)

    def pair_to_lift(self, Fb: LaxFunctor, tb: OplaxTransformation) -> LaxFunctor:
        return pair_to_lift(self.comma, Fb, tb)


def pack_unpack(C: CommaBicategory) -> Correspondences:
    return Correspondences(C)


def is_strict_lift(Y: LaxFunctor, pL: LaxFunctor, X: LaxFunctor) -> bool:
    """``Y`` followed by ``p^L`` equals ``X`` on the nose."""
    return compose_functors(Y, pL).same_tables(X)


# the section of p^L

def s_L(p: LaxFunctor, cleavage: Cleavage, pL: LaxFunctor | None = None, order: str | None = None) -> LaxFunctor:
    """Pseudofunctor section of ``p^L`` choosing the cleavage's Cartesian lifts."""
    if not is_fibration(p):
        raise PreconditionError(f"{p!r} is not a fibration")
    pL = pL or p_L(p)
    order = order or cleavage.order
    Bp = pL.target
    choices = {}
    for X in Bp.obs:
        b, e, f = X
        fh = cleavage.lift1[(e, f)]
        choices[X] = (p.source.src1(fh), e, fh)
    s = build_lax_section(pL, choices, order=order)
    rep = upgrade_section_to_pseudo(pL, s)
    if not rep.ok:
        raise InconsistencyError(f"section of {pL.name} is not pseudo: {rep}")
    out = as_pseudo(s)
    out.name = f"s^L({p.name})"
    return out


def validate_section(q: LaxFunctor, s: LaxFunctor) -> CoherenceReport:
    rep = CoherenceReport()
    rep.extend(validate_functor(s), prefix="functor:")
    rep.extend(upgrade_section_to_pseudo(q, s))
    return rep
