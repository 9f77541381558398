"""Fibers, cones, limits as hom-equivalences, reindexing and limit lifting.

A cone with apex ``x`` over ``J : A -> E`` is a transformation from the
constant functor at ``x`` to ``J``. ``(L, cone)`` is a limit when, for every
object ``x``, whiskering onto the cone is an equivalence of categories
``E(x, L) -> Cone(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .core.bicategory import Bicategory
from .core.category import Category, Functor1
from .core.classical import is_equivalence_1cat
from .core.report import DEFAULT_BOUNDS, Bounds, Verdict
from .errors import HypothesisError, InconsistencyError, PreconditionError
from .expfib import canonical_lift, factor_through_cartesian
from .fibration import Cleavage, cartesian_lift_1cell
from .functor import (
    Icon,
    LaxFunctor,
    OplaxTransformation,
    compose_functors,
    constant_functor,
    enumerate_modifications,
    enumerate_transformations,
    identity_transformation,
    strict_functor,
    validate_icon,
    vcomp_transformations,
)
from .ids import ordered

MODES = ("pseudo", "oplax")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, not {mode!r}")


@dataclass
class Cone:
    apex: Hashable
    legs: OplaxTransformation
    mode: str = "pseudo"


@dataclass
class LimitCertificate:
    """Comparison functors ``E(x, L) -> Cone(x)`` with their equivalence witnesses."""

    apex: Hashable
    comparisons: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    counterexample: dict | None = None


# cones

class ConeContext:
    """Constant functors and cone categories for one diagram, built on demand."""

    def __init__(self, E: Bicategory, J: LaxFunctor, mode: str):
        _check_mode(mode)
        self.E, self.J, self.mode = E, J, mode
        self._const: dict = {}
        self._cats: dict = {}

    def const(self, x) -> LaxFunctor:
        if x not in self._const:
            self._const[x] = constant_functor(self.J.source, self.E, x, name=f"const({x})")
        return self._const[x]

    def cones(self, x) -> list[OplaxTransformation]:
        return self.category(x)[1]

    def category(self, x) -> tuple[Category, list]:
        if x not in self._cats:
            self._cats[x] = _cone_category(self.E, self.const(x), self.J, self.mode)
        return self._cats[x]


def _cone_category(E: Bicategory, D: LaxFunctor, J: LaxFunctor, mode: str) -> tuple[Category, list]:
    cones = enumerate_transformations(D, J, mode=mode)
    keys = [c.key() for c in cones]
    morphisms, identity, by_pair = {}, {}, {}
    for c, k in zip(cones, keys):
        for c2, k2 in zip(cones, keys):
            mods = enumerate_modifications(c, c2)
            by_pair[(k, k2)] = mods
            for m in mods:
                morphisms[m.key()] = (k, k2)
        identity[k] = (k, k, tuple((a, E.id2[c.comp1[a]]) for a in ordered(c.comp1)))
    comp = {}
    for (k, k2), mods in by_pair.items():
        for m in mods:
            for k3 in keys:
                for n in by_pair[(k2, k3)]:
                    r = (k, k3, tuple((a, E.v(m.comp[a], n.comp[a])) for a in ordered(m.comp)))
                    comp[(m.key(), n.key())] = r
    return Category(keys, morphisms, identity, comp, name=f"Cone({D.name})"), cones


def cone_category(E: Bicategory, J: LaxFunctor, x, mode: str = "pseudo") -> Category:
    """Cones at ``x`` and modifications between them, by enumeration."""
    return ConeContext(E, J, mode).category(x)[0]


def whisker_cone(E: Bicategory, D: LaxFunctor, cone: OplaxTransformation, g) -> OplaxTransformation:
    """Precompose ``cone`` (apex ``L``) with ``g : x -> L``; ``D`` is the constant functor at ``x``."""
    J = cone.G
    A = J.source
    comp1 = {a: E.c1(g, c) for a, c in cone.comp1.items()}
    comp2 = {}
    one_L = E.id1[E.tgt1(g)]
    for f, (a, a2) in A.one_cells.items():
        ta, ta2 = cone.comp1[a], cone.comp1[a2]
        comp2[f] = E.v(
            E.l(E.c1(g, ta2)),
            E.wr(E.ri(g), ta2),
            E.a(g, one_L, ta2),
            E.wl(g, cone.comp2[f]),
            E.ai(g, ta, J.map1[f]),
        )
    return OplaxTransformation(D, J, comp1, comp2)


def comparison_functor(ctx: ConeContext, L, cone: OplaxTransformation, x) -> Functor1:
    E = ctx.E
    H = E.hom_category(x, L)
    C, _ = ctx.category(x)
    D = ctx.const(x)
    ob = {}
    for g in H.objects:
        k = whisker_cone(E, D, cone, g).key()
        if k not in C.morphisms and k not in set(C.objects):
            raise InconsistencyError(f"whiskering {g!r} onto the cone does not give a {ctx.mode} cone")
        ob[g] = k
    mor = {}
    for b, (g, g2) in H.morphisms.items():
        mor[b] = (ob[g], ob[g2], tuple((a, E.wr(b, cone.comp1[a])) for a in ordered(cone.comp1)))
        if mor[b] not in C.morphisms:
            raise InconsistencyError(f"whiskering the 2-cell {b!r} does not give a modification")
    return Functor1(H, C, ob, mor, name=f"cmp({x})")


def is_limit(E: Bicategory, J: LaxFunctor, L, cone: OplaxTransformation, mode: str = "pseudo", ctx: ConeContext | None = None) -> tuple[bool, LimitCertificate]:
    ctx = ctx or ConeContext(E, J, mode)
    if cone.F.ob and set(cone.F.ob.values()) != {L}:
        raise PreconditionError(f"cone apex is not {L!r}")
    if cone.key() not in set(ctx.category(L)[0].objects):
        raise PreconditionError(f"not a valid {mode} cone")
    cert = LimitCertificate(L)
    for x in ordered(E.obs):
        F = comparison_functor(ctx, L, cone, x)
        v = is_equivalence_1cat(F)
        cert.comparisons[x] = F
        if not v:
            cert.counterexample = {"object": x, **v.counterexample}
            return False, cert
        cert.witnesses[x] = v.witness
    return True, cert


def find_limit(E: Bicategory, J: LaxFunctor, mode: str = "pseudo", ctx: ConeContext | None = None):
    """First certified limit ``(L, cone, certificate)`` in id order, or None."""
    ctx = ctx or ConeContext(E, J, mode)
    for L in ordered(E.obs):
        for cone in ctx.cones(L):
            ok, cert = is_limit(E, J, L, cone, mode, ctx)
            if ok:
                return L, cone, cert
    return None


def limits_equivalent(E: Bicategory, J: LaxFunctor, lim1: tuple, lim2: tuple, mode: str = "pseudo") -> Verdict:
    """An equivalence ``e : L1 -> L2`` with an invertible modification ``e.cone2 => cone1``."""
    (L1, c1), (L2, c2) = lim1[:2], lim2[:2]
    for e in ordered(E.hom(L1, L2)):
        if E.is_equivalence_1cell(e) is None:
            continue
        w = whisker_cone(E, c1.F, c2, e)
        for m in enumerate_modifications(w, c1):
            if all(E.is_invertible(c) for c in m.comp.values()):
                return Verdict(True, witness={"equivalence": e, "modification": m.comp})
    return Verdict(False, counterexample={"apexes": (L1, L2)})


# fibers

class FiberBicategory(Bicategory):
    """Objects strictly over ``b``; 1-cells ``(f, phi : pf => 1_b)``; 2-cells ``(u, v, sigma)``."""

    b: Hashable
    p: LaxFunctor
    inclusion: LaxFunctor


def fiber(p: LaxFunctor, b, bounds: Bounds = DEFAULT_BOUNDS) -> FiberBicategory:
    if not p.strict:
        raise PreconditionError(f"{p!r} is not strict")
    E, B = p.source, p.target
    one_b = B.id1[b]
    obs = [e for e in ordered(E.obs) if p.ob[e] == b]
    ob_set = set(obs)
    one = {}
    for f, (x, y) in E.one_cells.items():
        if x in ob_set and y in ob_set:
            for phi in B.iso_cells(p.map1[f], one_b):
                one[(f, phi)] = (x, y)
    bounds.check(len(obs), len(one), 0, "fiber")
    by_hom: dict = {}
    for u, xy in one.items():
        by_hom.setdefault(xy, []).append(u)
    two = {}
    for us in by_hom.values():
        for u in us:
            for v in us:
                for s in E.cells(u[0], v[0]):
                    if B.v(p.map2[s], v[1]) == u[1]:
                        two[(u, v, s)] = (u, v)
    bounds.check(len(obs), len(one), len(two), "fiber")
    l1 = B.l(one_b)
    id1 = {e: (E.id1[e], B.id2[one_b]) for e in obs}
    if any(i not in one for i in id1.values()):
        raise InconsistencyError("identity 1-cells are missing from the fiber")
    id2 = {u: (u, u, E.id2[u[0]]) for u in one}
    hcomp1 = {}
    for u, (x, y) in one.items():
        for (y0, _), vs in by_hom.items():
            if y0 != y:
                continue
            for v in vs:
                hcomp1[(u, v)] = (E.c1(u[0], v[0]), B.v(B.h(u[1], v[1]), l1))
    for k, w in hcomp1.items():
        if w not in one:
            raise InconsistencyError(f"composite {k!r} is not a fiber 1-cell")
    two_by_src: dict = {}
    for c, (u, _) in two.items():
        two_by_src.setdefault(u, []).append(c)
    vcomp = {}
    for c, (u, v) in two.items():
        for c2 in two_by_src.get(v, []):
            vcomp[(c, c2)] = (u, c2[1], E.v(c[2], c2[2]))
    two_by_src_obj: dict = {}
    for c, (u, _) in two.items():
        two_by_src_obj.setdefault(one[u][0], []).append(c)
    hcomp2 = {}
    for c, (u, v) in two.items():
        for c2 in two_by_src_obj.get(one[u][1], []):
            hcomp2[(c, c2)] = (hcomp1[(u, c2[0])], hcomp1[(v, c2[1])], E.h(c[2], c2[2]))

    def cell(src, tgt, s):
        key = (src, tgt, s)
        if key not in two:
            raise InconsistencyError(f"coherence cell {key!r} does not respect the identifications")
        return key

    assoc = {}
    for (u, v), uv in hcomp1.items():
        for (y0, _), ws in by_hom.items():
            if y0 != one[v][1]:
                continue
            for w in ws:
                assoc[(u, v, w)] = cell(hcomp1[(uv, w)], hcomp1[(u, hcomp1[(v, w)])], E.a(u[0], v[0], w[0]))
    lunit = {u: cell(hcomp1[(id1[one[u][0]], u)], u, E.l(u[0])) for u in one}
    runit = {u: cell(hcomp1[(u, id1[one[u][1]])], u, E.r(u[0])) for u in one}
    Fib = FiberBicategory(obs, one, two, id1, id2, vcomp, hcomp1, hcomp2, assoc, lunit, runit, name=f"{E.name}|{b}")
    Fib.b = b
    Fib.p = p
    Fib.inclusion = strict_functor(
        Fib, E, {e: e for e in obs}, {u: u[0] for u in one}, {c: c[2] for c in two}, name=f"incl({b})"
    )
    return Fib


def to_fiber_functor(Fib: FiberBicategory, F: LaxFunctor) -> LaxFunctor:
    """A functor into ``E`` lying strictly over the constant at ``b``, viewed in the fiber."""
    B = Fib.p.target
    A = F.source
    ident = B.id2[B.id1[Fib.b]]
    for a in A.obs:
        if F.ob[a] not in set(Fib.obs):
            raise PreconditionError(f"{F.ob[a]!r} does not lie over {Fib.b!r}")
    map1 = {u: (c, ident) for u, c in F.map1.items()}
    for u, c in map1.items():
        if c not in Fib.one_cells:
            raise PreconditionError(f"{F.map1[u]!r} does not lie over the identity of {Fib.b!r}")
    map2 = {s: (map1[u], map1[v], F.map2[s]) for s, (u, v) in A.two_cells.items()}
    unit = {a: (Fib.id1[F.ob[a]], map1[A.id1[a]], c) for a, c in F.unit.items()}
    comp = {(u, v): (Fib.c1(map1[u], map1[v]), map1[A.c1(u, v)], c) for (u, v), c in F.comp.items()}
    for table in (map2, unit, comp):
        for k, c in table.items():
            if c not in Fib.two_cells:
                raise PreconditionError(f"cell at {k!r} does not respect the identifications")
    return LaxFunctor(A, Fib, F.ob, map1, map2, unit, comp, variance=F.variance, strict=F.strict, name=f"{F.name}|fib")


def to_fiber_transformation(Fib: FiberBicategory, t: OplaxTransformation, Ffib: LaxFunctor, Gfib: LaxFunctor) -> OplaxTransformation:
    B = Fib.p.target
    ident = B.id2[B.id1[Fib.b]]
    A = Ffib.source
    comp1 = {a: (c, ident) for a, c in t.comp1.items()}
    comp2 = {}
    for f, (a, a2) in A.one_cells.items():
        key = (Fib.c1(Ffib.map1[f], comp1[a2]), Fib.c1(comp1[a], Gfib.map1[f]), t.comp2[f])
        if key not in Fib.two_cells:
            raise PreconditionError(f"2-cell at {f!r} does not lie in the fiber")
        comp2[f] = key
    for a, c in comp1.items():
        if c not in Fib.one_cells:
            raise PreconditionError(f"component at {a!r} does not lie over the identity")
    return OplaxTransformation(Ffib, Gfib, comp1, comp2, name=f"{t.name}|fib")


def from_fiber_transformation(Fib: FiberBicategory, t: OplaxTransformation, F: LaxFunctor, G: LaxFunctor) -> OplaxTransformation:
    return OplaxTransformation(
        F, G, {a: c[0] for a, c in t.comp1.items()}, {f: c[2] for f, c in t.comp2.items()}, name=f"{t.name}|E"
    )


def fiber_diagram_pair(Fib: FiberBicategory, Ffib: LaxFunctor) -> tuple[LaxFunctor, Icon]:
    """``(F0, rho)``: the underlying diagram in ``E`` and the invertible icon ``F0.p => const(b)``."""
    p = Fib.p
    F0 = compose_functors(Ffib, Fib.inclusion, name=f"{Ffib.name};incl")
    F0p = compose_functors(F0, p)
    const = constant_functor(Ffib.source, p.target, Fib.b)
    rho = Icon(F0p, const, {u: c[1] for u, c in Ffib.map1.items()}, name="rho")
    rep = validate_icon(rho)
    if not rep.ok:
        raise InconsistencyError(f"identifications do not form an icon: {rep}")
    return F0, rho


# reindexing

def canonical_reindex_transformation(p: LaxFunctor, F0: LaxFunctor, rho: Icon, f) -> OplaxTransformation:
    """``tau : const(b) => F0.p`` with ``tau(a) = f`` and ``tau(u) = l_f | r_f^-1 | f.rho(u)^-1``."""
    B = p.target
    b, b2 = B.one_cells[f]
    A = F0.source
    const = constant_functor(A, B, b, name=f"const({b})")
    F0p = rho.F
    comp2 = {}
    for u in A.one_cells:
        comp2[u] = B.v(B.l(f), B.ri(f), B.wl(f, B.inv(rho.comp[u])))
    return OplaxTransformation(const, F0p, {a: f for a in A.obs}, comp2, name=f"tau({f})")


def reindex_diagram(p: LaxFunctor, cl: Cleavage, F0: LaxFunctor, rho: Icon, f) -> tuple[LaxFunctor, OplaxTransformation]:
    """Reindex the fiber diagram ``(F0, rho)`` along ``f : b -> b'``; ``F_bar`` lies over ``const(b)``."""
    for u, c in rho.comp.items():
        if not p.target.is_invertible(c):
            raise PreconditionError(f"identification at {u!r} is not invertible")
    tau = canonical_reindex_transformation(p, F0, rho, f)
    return canonical_lift(p, cl, tau.F, F0, tau, mode="pseudo" if F0.pseudo else F0.variance)


def reindex_cone(p: LaxFunctor, cl: Cleavage, Ffib: LaxFunctor, L, cone_fib: OplaxTransformation, f):
    """Reindex a fiber cone along ``f : b -> b'``.

    Returns ``(Fib_b, Fbar_fib, L', cone')``: the fiber over ``b``, the reindexed
    diagram, the apex ``g*L`` and the cone obtained by factoring
    ``f_hat . cone`` through the Cartesian ``tau_bar``.
    """
    Fib2 = Ffib.target
    E, B = p.source, p.target
    b = B.src1(f)
    F0, rho = fiber_diagram_pair(Fib2, Ffib)
    Fb, tb = reindex_diagram(p, cl, F0, rho, f)
    fh = cartesian_lift_1cell(p, cl, f, L)
    L2 = E.src1(fh)
    A = F0.source
    cone_E = from_fiber_transformation(Fib2, cone_fib, constant_functor(A, E, L), F0)
    H = constant_functor(A, E, L2, name=f"const({L2})")
    sigma = whisker_cone(E, H, cone_E, fh)
    Hp = compose_functors(H, p)
    kappa = identity_transformation(Hp)
    alpha = {}
    for a in A.obs:
        phi = cone_fib.comp1[a][1]
        alpha[a] = B.v(B.l(f), B.ri(f), B.wl(f, B.inv(phi)))
    kb, _ = factor_through_cartesian(p, cl, tb, sigma, kappa, alpha)
    Fib = fiber(p, b)
    Fb_fib = to_fiber_functor(Fib, Fb)
    H_fib = constant_functor(A, Fib, L2, name=f"const({L2})")
    cone2 = to_fiber_transformation(Fib, kb, H_fib, Fb_fib)
    return Fib, Fb_fib, L2, cone2


def preserves_limit(p: LaxFunctor, cl: Cleavage, f, Ffib: LaxFunctor, L, cone_fib: OplaxTransformation, mode: str = "pseudo") -> tuple[bool, LimitCertificate]:
    """Whether reindexing the fiber limit ``(L, cone_fib)`` along ``f`` gives a limit."""
    Fib, Fb_fib, L2, cone2 = reindex_cone(p, cl, Ffib, L, cone_fib, f)
    return is_limit(Fib, Fb_fib, L2, cone2, mode)


# limit lifting

@dataclass
class LiftedLimit:
    apex: Hashable
    cone: OplaxTransformation
    certificate: LimitCertificate
    base: tuple
    fiber_limit: tuple
    lifted_diagram: LaxFunctor
    lifted_cone: OplaxTransformation


def lift_limit(
    p: LaxFunctor,
    cl: Cleavage,
    J: LaxFunctor,
    mode: str = "pseudo",
    base_limit: tuple | None = None,
    fiber_limit: tuple | None = None,
    check_hypotheses: bool = True,
) -> LiftedLimit:
    """Limit of ``J`` in ``E`` from a base limit and a fiber limit.

    Steps: the limit ``(s, tau)`` of ``J.p``; the canonical Cartesian lift
    ``tau_bar : s_bar => J``; the limit ``(L, tau_star)`` of ``s_bar`` in the
    fiber over ``s``; the answer ``tau_star | tau_bar``, certified afterwards.
    """
    _check_mode(mode)
    E, B = p.source, p.target
    A = J.source
    Jp = compose_functors(J, p, name=f"{J.name};p")
    if base_limit is None:
        found = find_limit(B, Jp, mode)
        if found is None:
            raise HypothesisError("base-limit", f"no {mode} limit of {Jp.name} in {B.name}")
        s, tau = found[0], found[1]
    else:
        s, tau = base_limit[:2]
        ok, _ = is_limit(B, Jp, s, _rebase(tau, Jp), mode)
        if not ok:
            raise HypothesisError("base-limit", "supplied base cone is not a limit")
    tau = _rebase(tau, Jp)
    s_bar, tau_bar = canonical_lift(p, cl, tau.F, J, tau, mode="pseudo" if J.pseudo else J.variance)
    Fib = fiber(p, s)
    s_fib = to_fiber_functor(Fib, s_bar)
    fctx = ConeContext(Fib, s_fib, mode)
    if fiber_limit is None:
        found = find_limit(Fib, s_fib, mode, fctx)
        if found is None:
            raise HypothesisError("fiber-limit", f"no {mode} limit of the lifted diagram in the fiber over {s!r}")
        L, tau_star = found[0], found[1]
    else:
        L, tau_star = fiber_limit[:2]
        ok, _ = is_limit(Fib, s_fib, L, tau_star, mode, fctx)
        if not ok:
            raise HypothesisError("fiber-limit", "supplied fiber cone is not a limit")
    if check_hypotheses:
        for b in ordered(B.obs):
            for g in ordered(B.hom(b, s)):
                ok, cert = preserves_limit(p, cl, g, s_fib, L, tau_star, mode)
                if not ok:
                    raise HypothesisError("reindexing-preserves-limits", f"reindexing along {g!r} fails at {cert.counterexample}")
    D = constant_functor(A, E, L, name=f"const({L})")
    tau_star_E = from_fiber_transformation(Fib, tau_star, D, s_bar)
    cone = vcomp_transformations(tau_star_E, tau_bar, name="lifted-cone")
    ok, cert = is_limit(E, J, L, cone, mode)
    if not ok:
        raise InconsistencyError(f"lifted cone is not a limit: {cert.counterexample}")
    return LiftedLimit(L, cone, cert, (s, tau), (L, tau_star), s_bar, tau_bar)


def _rebase(tau: OplaxTransformation, G: LaxFunctor) -> OplaxTransformation:
    """Same components, retargeted at the functor object ``G`` (tables must agree)."""
    if tau.G is G:
        return tau
    if not tau.G.same_tables(G):
        raise PreconditionError("cone does not end at the diagram")
    return OplaxTransformation(tau.F, G, tau.comp1, tau.comp2, name=tau.name)
