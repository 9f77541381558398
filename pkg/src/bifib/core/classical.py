"""Classical 1-categorical oracles.

Everything here is decided by brute-force enumeration over finite
categories and is used to cross-check the bicategorical machinery.
"""
from __future__ import annotations

import itertools
from typing import Mapping

from ..errors import PreconditionError
from ..ids import ordered
from .category import Category, Functor1
from .report import Verdict


def factorizations_1cat(F: Functor1, phi, psi, u) -> list:
    """All chi with F(chi) = u and chi ; phi = psi."""
    C = F.source
    c2, c1 = C.src(psi), C.src(phi)
    return [chi for chi in C.hom(c2, c1) if F.mor[chi] == u and C.comp[(chi, phi)] == psi]


def is_cartesian_morphism_1cat(F: Functor1, phi) -> Verdict:
    C, D = F.source, F.target
    c1, c = C.morphisms[phi]
    Fphi = F.mor[phi]
    for c2 in C.objects:
        for psi in C.hom(c2, c):
            Fpsi = F.mor[psi]
            for u in D.hom(F.ob[c2], F.ob[c1]):
                if D.comp[(u, Fphi)] != Fpsi:
                    continue
                sols = factorizations_1cat(F, phi, psi, u)
                if len(sols) != 1:
                    return Verdict(False, counterexample={"psi": psi, "u": u, "solutions": sols})
    return Verdict(True)


class CartesianCache:
    """Memoises Cartesian-morphism verdicts for one functor."""

    def __init__(self, F: Functor1):
        self.F = F
        self._memo: dict = {}

    def __call__(self, phi) -> bool:
        if phi not in self._memo:
            self._memo[phi] = bool(is_cartesian_morphism_1cat(self.F, phi))
        return self._memo[phi]


def cartesian_lifts_1cat(F: Functor1, e, u, cache: CartesianCache | None = None, order: str = "asc") -> list:
    """Cartesian morphisms into ``e`` over ``u``, in the requested id order."""
    cache = cache or CartesianCache(F)
    C = F.source
    found = []
    for phi in ordered(C.morphisms, order):
        if C.tgt(phi) == e and F.mor[phi] == u and cache(phi):
            found.append(phi)
    return found


def is_grothendieck_fibration_1cat(F: Functor1, order: str = "asc") -> Verdict:
    """Every (e, u : d -> F e) has a Cartesian lift; the chosen lifts are the witness."""
    C, D = F.source, F.target
    cache = CartesianCache(F)
    by_target: dict = {}
    for phi in ordered(C.morphisms, order):
        by_target.setdefault((C.tgt(phi), F.mor[phi]), []).append(phi)
    lifts = {}
    for e in C.objects:
        for d in D.objects:
            for u in D.hom(d, F.ob[e]):
                chosen = next((phi for phi in by_target.get((e, u), []) if cache(phi)), None)
                if chosen is None:
                    return Verdict(False, witness=lifts, counterexample={"object": e, "morphism": u})
                lifts[(e, u)] = chosen
    return Verdict(True, witness=lifts)


def hom_map_is_bijective(F: Functor1, c1, c2) -> bool:
    C, D = F.source, F.target
    images = [F.mor[m] for m in C.hom(c1, c2)]
    return len(set(images)) == len(images) and set(images) == set(D.hom(F.ob[c1], F.ob[c2]))


def is_rari_universal_1cat(F: Functor1, c) -> Verdict:
    for c1 in F.source.objects:
        if not hom_map_is_bijective(F, c1, c):
            return Verdict(False, counterexample={"object": c1})
    return Verdict(True)


def rari_universal_lifts_1cat(F: Functor1, d, order: str = "asc") -> list:
    return [c for c in ordered(F.source.objects, order) if F.ob[c] == d and is_rari_universal_1cat(F, c)]


def unique_preimage(F: Functor1, c1, c2, u):
    sols = [m for m in F.source.hom(c1, c2) if F.mor[m] == u]
    if len(sols) != 1:
        raise PreconditionError(f"{u!r} has {len(sols)} preimages in Hom({c1!r}, {c2!r})")
    return sols[0]


def rari_of_1cat(F: Functor1, choice: Mapping) -> Functor1:
    """The right-adjoint right inverse determined by a choice of rari-universal lifts."""
    C, D = F.source, F.target
    for d in D.objects:
        if d not in choice:
            raise PreconditionError(f"no lift chosen for {d!r}")
        c = choice[d]
        if F.ob[c] != d or not is_rari_universal_1cat(F, c):
            raise PreconditionError(f"{c!r} is not a rari-universal lift of {d!r}")
    mor = {u: unique_preimage(F, choice[D.src(u)], choice[D.tgt(u)], u) for u in D.morphisms}
    return Functor1(D, C, {d: choice[d] for d in D.objects}, mor, name=f"rari({F.name})")


def is_equivalence_1cat(F: Functor1) -> Verdict:
    """Fully faithful and essentially surjective, with explicit witnesses."""
    C, D = F.source, F.target
    homs = {}
    for c1 in C.objects:
        for c2 in C.objects:
            if not hom_map_is_bijective(F, c1, c2):
                return Verdict(False, counterexample={"not_fully_faithful": (c1, c2)})
            homs[(c1, c2)] = F.hom_map(c1, c2)
    isos = {}
    for d in ordered(D.objects):
        hit = None
        for c in ordered(C.objects):
            for m in ordered(D.hom(F.ob[c], d)):
                if D.is_iso(m):
                    hit = (c, m)
                    break
            if hit:
                break
        if hit is None:
            return Verdict(False, counterexample={"not_essentially_surjective": d})
        isos[d] = hit
    return Verdict(True, witness={"iso": isos, "hom": homs})


def free_fibration_1cat(p: Functor1) -> tuple[Category, Functor1]:
    """Comma category of triples (b, e, f : b -> p e) with its projection to the base."""
    E, B = p.source, p.target
    objects = [(b, e, f) for e in E.objects for b in B.objects for f in B.hom(b, p.ob[e])]
    morphisms = {}
    for X in objects:
        b, e, f = X
        for Y in objects:
            b2, e2, f2 = Y
            for s in B.hom(b, b2):
                for t in E.hom(e, e2):
                    if B.comp[(s, f2)] == B.comp[(f, p.mor[t])]:
                        morphisms[(X, Y, s, t)] = (X, Y)
    identity = {X: (X, X, B.identity[X[0]], E.identity[X[1]]) for X in objects}
    comp = {}
    for m in morphisms:
        X, Y, s, t = m
        for n in morphisms:
            if n[0] == Y:
                _, Z, s2, t2 = n
                comp[(m, n)] = (X, Z, B.comp[(s, s2)], E.comp[(t, t2)])
    C = Category(objects, morphisms, identity, comp, name=f"{B.name}/{p.name}")
    proj = Functor1(C, B, {X: X[0] for X in objects}, {m: m[2] for m in morphisms}, name="d0")
    return C, proj


def cones_1cat(C: Category, D: Functor1, x) -> list[dict]:
    """Cones with apex ``x`` over a diagram D : S -> C (S finite)."""
    S = D.source
    legs_options = [C.hom(x, D.ob[a]) for a in S.objects]
    out = []
    for legs in itertools.product(*legs_options):
        leg = dict(zip(S.objects, legs))
        if all(C.comp[(leg[S.src(u)], D.mor[u])] == leg[S.tgt(u)] for u in S.morphisms):
            out.append(leg)
    return out


def is_limit_1cat(C: Category, D: Functor1, L, legs: Mapping) -> Verdict:
    S = D.source
    for x in C.objects:
        for cone in cones_1cat(C, D, x):
            sols = [m for m in C.hom(x, L) if all(C.comp[(m, legs[a])] == cone[a] for a in S.objects)]
            if len(sols) != 1:
                return Verdict(False, counterexample={"apex": x, "cone": cone, "factorizations": sols})
    return Verdict(True)


def limits_1cat(C: Category, D: Functor1) -> list[tuple]:
    """All limit cones (L, legs), in id order of L."""
    out = []
    for L in ordered(C.objects):
        for legs in cones_1cat(C, D, L):
            if is_limit_1cat(C, D, L, legs):
                out.append((L, legs))
    return out
