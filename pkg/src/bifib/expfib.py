"""Lifting along postwhiskering ``- . p`` for a strict fibration ``p``.

Functor bicategories are never built. Transformations and modifications
are handled one at a time, and universal properties are checked by
enumerating over a caller-supplied pool of functors.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core.report import CoherenceReport, Verdict
from .errors import InconsistencyError, PreconditionError, SizeLimitError, StructuralError
from .fibration import (
    Cleavage,
    Lift,
    LiftProblem,
    _cart2,
    factor_2cell,
    is_cartesian_1cell_strict,
    lift_triple_strict,
)
from .functor import (
    LaxFunctor,
    Modification,
    OplaxTransformation,
    compose_functors,
    enumerate_modifications,
    enumerate_transformations,
    postwhisker,
    validate_modification,
    validate_transformation,
    vcomp_transformations,
)
from .groth import CommaBicategory, arrow_bicategory, oplax_comma, p_L, pack, s_L, unpack
from .ids import ordered

# refuse direct Cartesian checks with more problem pairs than this
MAX_PROBLEM_PAIRS = 250_000


@dataclass
class LiftingContext:
    p: LaxFunctor
    cleavage: Cleavage
    Bp: CommaBicategory
    EI: CommaBicategory
    pL: LaxFunctor
    sL: LaxFunctor


def lifting_context(p: LaxFunctor, cl: Cleavage) -> LiftingContext:
    """Comma, arrow bicategory, ``p^L`` and ``s^L`` for a cleavage, built once."""
    ctx = cl.__dict__.get("_context")
    if ctx is None:
        Bp, _ = oplax_comma(p)
        EI = arrow_bicategory(p.source)
        pL = p_L(p, EI, Bp)
        ctx = LiftingContext(p, cl, Bp, EI, pL, s_L(p, cl, pL))
        cl.__dict__["_context"] = ctx
    return ctx


def is_pseudonatural(t: OplaxTransformation) -> bool:
    E = t.F.target
    return all(E.is_invertible(c) for c in t.comp2.values())


def whiskered_components(t: OplaxTransformation, p: LaxFunctor) -> tuple[dict, dict]:
    """Components of ``t . p`` for strict ``p`` without building functor composites."""
    return {a: p.map1[c] for a, c in t.comp1.items()}, {f: p.map2[c] for f, c in t.comp2.items()}


def _same_components(t: OplaxTransformation, comp1: dict, comp2: dict) -> bool:
    return t.comp1 == comp1 and t.comp2 == comp2


# canonical lifts

def canonical_lift(p: LaxFunctor, cl: Cleavage, F: LaxFunctor, G: LaxFunctor, tau: OplaxTransformation, mode: str = "lax") -> tuple[LaxFunctor, OplaxTransformation]:
    """Strict lift ``(F_bar, tau_bar : F_bar => G)`` of ``tau : F => G.p``, read off ``(F, G, tau) . s^L``."""
    if mode not in ("lax", "oplax", "pseudo"):
        raise ValueError(f"unknown mode {mode!r}")
    if not p.strict:
        raise PreconditionError(f"{p!r} is not strict")
    kinds = {("pseudo" if X.pseudo else X.variance) for X in (F, G)}
    if mode == "pseudo" and kinds != {"pseudo"}:
        raise PreconditionError("pseudo mode needs pseudofunctors F and G")
    if mode != "pseudo" and mode not in kinds and kinds != {"pseudo"}:
        raise PreconditionError(f"mode {mode!r} does not match functor variance {sorted(kinds)}")
    ctx = lifting_context(p, cl)
    X = pack(ctx.Bp, F, G, tau, name=f"<{F.name},{G.name},{tau.name}>")
    Y = compose_functors(X, ctx.sL, name=f"{X.name};sL")
    Fb, G2, tb = unpack(ctx.EI, Y)
    if not G2.same_tables(G):
        raise InconsistencyError("codomain of the lift differs from G")
    Fb.name = f"{F.name}^"
    tau_bar = OplaxTransformation(Fb, G, tb.comp1, tb.comp2, name=f"{tau.name}^")
    if not compose_functors(Fb, p).same_tables(F):
        raise InconsistencyError("lifted functor does not lie strictly over F")
    if (tau_bar.comp1, tau_bar.comp2) != (tau.comp1, tau.comp2) and whiskered_components(tau_bar, p) != (tau.comp1, tau.comp2):
        raise InconsistencyError("lifted transformation does not lie strictly over tau")
    return Fb, tau_bar


def lift_modification_pointwise(
    p: LaxFunctor, cl: Cleavage, tau: OplaxTransformation, sigma: OplaxTransformation, gamma: Modification
) -> tuple[OplaxTransformation, Modification]:
    """Lift ``gamma : sigma => tau.p`` to a Cartesian ``gamma_bar : sigma_bar => tau``.

    ``gamma_bar(a)`` is the cleavage's Cartesian 2-cell over ``gamma(a)`` into
    ``tau(a)``; ``sigma_bar(f)`` is the unique 2-cell over ``sigma(f)`` that
    makes ``gamma_bar`` a modification.
    """
    F, G = tau.F, tau.G
    A, E = F.source, F.target
    if gamma.tau.comp1 != whiskered_components(tau, p)[0] or gamma.tau.comp2 != whiskered_components(tau, p)[1]:
        raise PreconditionError("gamma does not end at tau . p")
    if gamma.sigma is not sigma:
        raise PreconditionError("gamma does not start at sigma")
    gb = {}
    for a in A.obs:
        try:
            gb[a] = cl.local[(tau.comp1[a], gamma.comp[a])]
        except KeyError:
            raise PreconditionError(f"no local lift of {gamma.comp[a]!r} into {tau.comp1[a]!r}") from None
    sb1 = {a: E.src2(c) for a, c in gb.items()}
    sb2 = {}
    for f, (a, a2) in A.one_cells.items():
        Ff, Gf = F.map1[f], G.map1[f]
        rhs = E.v(E.wl(Ff, gb[a2]), tau.comp2[f])
        sols = [
            d
            for d in E.cells(E.c1(Ff, sb1[a2]), E.c1(sb1[a], Gf))
            if p.map2[d] == sigma.comp2[f] and E.v(d, E.wr(gb[a], Gf)) == rhs
        ]
        if len(sols) != 1:
            raise InconsistencyError(f"{len(sols)} candidate lifts of sigma at {f!r}")
        sb2[f] = sols[0]
    sigma_bar = OplaxTransformation(F, G, sb1, sb2, name=f"{sigma.name}^")
    gamma_bar = Modification(sigma_bar, tau, gb, name=f"{gamma.name}^")
    return sigma_bar, gamma_bar


def factor_through_local_lift(
    p: LaxFunctor, gamma_bar: Modification, theta: Modification, kappa: Modification
) -> Modification:
    """Unique ``kappa_bar : rho => sigma_bar`` over ``kappa`` with ``kappa_bar | gamma_bar = theta``."""
    E = theta.sigma.F.target
    comp = {}
    for a, th in theta.comp.items():
        sols = [
            c
            for c in E.cells(theta.sigma.comp1[a], gamma_bar.sigma.comp1[a])
            if p.map2[c] == kappa.comp[a] and E.v(c, gamma_bar.comp[a]) == th
        ]
        if len(sols) != 1:
            raise InconsistencyError(f"{len(sols)} factorizations at {a!r}")
        comp[a] = sols[0]
    return Modification(theta.sigma, gamma_bar.sigma, comp)


# factorization through Cartesian transformations

def factor_through_cartesian(
    p: LaxFunctor,
    cl: Cleavage,
    tau_bar: OplaxTransformation,
    sigma: OplaxTransformation,
    kappa: OplaxTransformation,
    alpha: dict,
) -> tuple[OplaxTransformation, Modification]:
    """Factor ``sigma : H => G`` through ``tau_bar : F_bar => G``.

    ``kappa : H.p => F_bar.p`` and ``alpha(a) : kappa(a).tau(a) => p sigma(a)``
    (invertible) are the base data. Returns ``kappa_bar : H => F_bar`` over
    ``kappa`` and the invertible modification ``alpha_bar : kappa_bar|tau_bar => sigma``
    over ``alpha``.
    """
    Fb, G, H = tau_bar.F, tau_bar.G, sigma.F
    A, E, B = H.source, H.target, p.target
    if sigma.G is not G:
        raise StructuralError("sigma and tau_bar have different codomains")
    kb1, ab = {}, {}
    for a in ordered(A.obs):
        prob = LiftProblem(H.ob[a], sigma.comp1[a], kappa.comp1[a], alpha[a])
        if B.two_cells.get(alpha[a]) != (B.c1(kappa.comp1[a], p.map1[tau_bar.comp1[a]]), p.map1[sigma.comp1[a]]):
            raise PreconditionError(f"alpha at {a!r} has the wrong boundary")
        lift = lift_triple_strict(p, cl, tau_bar.comp1[a], prob)
        kb1[a], ab[a] = lift.h_hat, lift.alpha_hat
    kb2 = {}
    for f, (a, a2) in A.one_cells.items():
        Hf, Ff = H.map1[f], Fb.map1[f]
        rhs = E.v(E.wl(Hf, ab[a2]), sigma.comp2[f])
        sols = []
        for d in ordered(E.cells(E.c1(Hf, kb1[a2]), E.c1(kb1[a], Ff))):
            if p.map2[d] != kappa.comp2[f]:
                continue
            comp = E.v(
                E.ai(Hf, kb1[a2], tau_bar.comp1[a2]),
                E.wr(d, tau_bar.comp1[a2]),
                E.a(kb1[a], Ff, tau_bar.comp1[a2]),
                E.wl(kb1[a], tau_bar.comp2[f]),
                E.ai(kb1[a], tau_bar.comp1[a], G.map1[f]),
            )
            if E.v(comp, E.wr(ab[a], G.map1[f])) == rhs:
                sols.append(d)
        if len(sols) != 1:
            raise InconsistencyError(f"{len(sols)} candidate factorizations at {f!r}")
        kb2[f] = sols[0]
    kappa_bar = OplaxTransformation(H, Fb, kb1, kb2, name=f"{kappa.name}^")
    alpha_bar = Modification(vcomp_transformations(kappa_bar, tau_bar), sigma, ab, name="alpha^")
    return kappa_bar, alpha_bar


def factorization_report(
    p: LaxFunctor,
    kappa_bar: OplaxTransformation,
    alpha_bar: Modification,
    kappa: OplaxTransformation,
    alpha: dict,
    mode: str = "oplax",
) -> CoherenceReport:
    rep = CoherenceReport()
    rep.extend(validate_transformation(kappa_bar, mode=mode), prefix="kappa:")
    rep.extend(validate_modification(alpha_bar), prefix="alpha:")
    if whiskered_components(kappa_bar, p) != (kappa.comp1, kappa.comp2):
        rep.add("kappa-over")
    if {a: p.map2[c] for a, c in alpha_bar.comp.items()} != dict(alpha):
        rep.add("alpha-over")
    E = kappa_bar.F.target
    for a, c in alpha_bar.comp.items():
        if not E.is_invertible(c):
            rep.add("alpha-invertible", a)
    return rep


def factorizations_by_enumeration(
    p: LaxFunctor, tau_bar: OplaxTransformation, sigma: OplaxTransformation, kappa: OplaxTransformation, alpha: dict, mode: str = "oplax"
) -> list[tuple[OplaxTransformation, Modification]]:
    """Every strict factorization ``(kappa_bar, alpha_bar)``, found by brute force."""
    out = []
    for kb in enumerate_transformations(sigma.F, tau_bar.F, mode=mode):
        if whiskered_components(kb, p) != (kappa.comp1, kappa.comp2):
            continue
        comp = vcomp_transformations(kb, tau_bar)
        for m in enumerate_modifications(comp, sigma):
            if {a: p.map2[c] for a, c in m.comp.items()} == dict(alpha) and all(
                kb.F.target.is_invertible(c) for c in m.comp.values()
            ):
                out.append((kb, m))
    return out


def factor_modification(
    p: LaxFunctor,
    tau_bar: OplaxTransformation,
    h: OplaxTransformation,
    h2: OplaxTransformation,
    sigma: Modification,
    alpha: Modification,
    alpha2: Modification,
    delta: dict,
) -> Modification:
    """Unique ``delta_hat : h => h2`` over ``delta`` with ``(delta_hat . tau_bar) | alpha2 = alpha | sigma``.

    ``alpha : h|tau_bar => g`` and ``alpha2 : h2|tau_bar => g2`` are invertible,
    ``sigma : g => g2``, and ``delta(a) : p h(a) => p h2(a)``.
    """
    B = p.target
    comp = {}
    for a in ordered(h.F.source.obs):
        t = tau_bar.comp1[a]
        pt = p.map1[t]
        lhs = B.v(B.wr(delta[a], pt), p.map2[alpha2.comp[a]])
        if lhs != B.v(p.map2[alpha.comp[a]], p.map2[sigma.comp[a]]):
            raise PreconditionError(f"compatibility fails at {a!r}")
        z = h.F.ob[a]
        prob1 = LiftProblem(z, sigma.sigma.comp1[a], p.map1[h.comp1[a]], p.map2[alpha.comp[a]])
        prob2 = LiftProblem(z, sigma.tau.comp1[a], p.map1[h2.comp1[a]], p.map2[alpha2.comp[a]])
        lift1 = Lift(h.comp1[a], alpha.comp[a], B.id2[prob1.h])
        lift2 = Lift(h2.comp1[a], alpha2.comp[a], B.id2[prob2.h])
        comp[a] = factor_2cell(p, t, prob1, lift1, prob2, lift2, delta[a], sigma.comp[a])
    m = Modification(h, h2, comp, name="delta^")
    rep = validate_modification(m)
    if not rep.ok:
        raise InconsistencyError(f"pointwise factorization is not a modification: {rep}")
    return m


# Cartesian transformations

def is_pointwise_cartesian(p: LaxFunctor, t: OplaxTransformation) -> Verdict:
    for a in ordered(t.comp1):
        if not is_cartesian_1cell_strict(p, t.comp1[a]):
            return Verdict(False, counterexample={"component": a, "cell": t.comp1[a]})
    for f in ordered(t.comp2):
        if not _cart2(p, t.comp2[f]):
            return Verdict(False, counterexample={"one_cell": f, "cell": t.comp2[f]})
    return Verdict(True)


def _mod_image(p: LaxFunctor, m: Modification) -> dict:
    return {a: p.map2[c] for a, c in m.comp.items()}


def is_cartesian_transformation_direct(p: LaxFunctor, t: OplaxTransformation, pool, mode: str = "oplax") -> Verdict:
    """Strict lifting characterization of ``t : F => G`` in the functor bicategory.

    Quantifies over functors ``H`` in ``pool``: every invertible base problem
    ``(kappa : H.p => F.p, sigma : H => G, alpha)`` has a strict lift, and
    modifications between lifts factor uniquely.
    """
    F, G = t.F, t.G
    E, B = p.source, p.target
    Fp = compose_functors(F, p)
    Gp = compose_functors(G, p)
    tp = postwhisker(t, p, Fp, Gp)
    for H in pool:
        if H.source is not F.source or H.target is not E:
            raise StructuralError(f"pool functor {H!r} has the wrong shape")
        Hp = compose_functors(H, p)
        sigmas = enumerate_transformations(H, G, mode=mode)
        kappas = enumerate_transformations(Hp, Fp, mode=mode)
        lifts_k = enumerate_transformations(H, F, mode=mode)
        problems = []
        for k in kappas:
            kt = vcomp_transformations(k, tp)
            for s in sigmas:
                sp = postwhisker(s, p, Hp, Gp)
                for al in enumerate_modifications(kt, sp):
                    if all(B.is_invertible(c) for c in al.comp.values()):
                        problems.append((k, s, al))
        lifts = {}
        for i, (k, s, al) in enumerate(problems):
            target = dict(al.comp)
            found = []
            for kb in lifts_k:
                if whiskered_components(kb, p) != (k.comp1, k.comp2):
                    continue
                for ab in enumerate_modifications(vcomp_transformations(kb, t), s):
                    if _mod_image(p, ab) == target and all(E.is_invertible(c) for c in ab.comp.values()):
                        found.append((kb, ab))
            if not found:
                return Verdict(False, counterexample={"clause": 1, "pool": H.name, "kappa": k.key(), "sigma": s.key()})
            lifts[i] = found
        if len(problems) ** 2 > MAX_PROBLEM_PAIRS:
            raise SizeLimitError(f"{len(problems)} lifting problems are too many to pair up")
        for i, (k1, s1, al1) in enumerate(problems):
            for j, (k2, s2, al2) in enumerate(problems):
                for dl in enumerate_modifications(k1, k2):
                    for sg in enumerate_modifications(s1, s2):
                        base_l = {
                            a: B.v(al1.comp[a], p.map2[sg.comp[a]]) for a in al1.comp
                        }
                        base_r = {
                            a: B.v(B.wr(dl.comp[a], tp.comp1[a]), al2.comp[a]) for a in al1.comp
                        }
                        if base_l != base_r:
                            continue
                        for kb1, ab1 in lifts[i]:
                            for kb2, ab2 in lifts[j]:
                                n = 0
                                for d in enumerate_modifications(kb1, kb2):
                                    if _mod_image(p, d) != dl.comp:
                                        continue
                                    if all(
                                        E.v(E.wr(d.comp[a], t.comp1[a]), ab2.comp[a]) == E.v(ab1.comp[a], sg.comp[a])
                                        for a in d.comp
                                    ):
                                        n += 1
                                if n != 1:
                                    return Verdict(False, counterexample={"clause": 2, "pool": H.name, "solutions": n})
    return Verdict(True)


def is_cartesian_transformation(
    p: LaxFunctor, t: OplaxTransformation, pool=None, mode: str = "oplax", cleavage: Cleavage | None = None
) -> Verdict:
    """Pointwise verdict; with a pool, also the direct verdict, and the two must agree.

    The direct check always adds ``F`` and the canonical lift of ``t . p`` to
    the pool, since those are the functors that witness a failure. The
    witness records both verdicts. A disagreement raises.
    """
    pw = is_pointwise_cartesian(p, t)
    if pool is None:
        return Verdict(pw.holds, witness={"pointwise": pw.holds}, counterexample=pw.counterexample)
    from .fibration import synthesize_cleavage

    cl = cleavage or synthesize_cleavage(p)
    tp_comp1, tp_comp2 = whiskered_components(t, p)
    Fp = compose_functors(t.F, p)
    Gp = compose_functors(t.G, p)
    tp = OplaxTransformation(Fp, Gp, tp_comp1, tp_comp2, name=f"{t.name}.p")
    Fb, _ = canonical_lift(p, cl, Fp, t.G, tp, mode="pseudo" if Fp.pseudo and t.G.pseudo else t.F.variance)
    full_pool = [t.F, Fb] + [H for H in pool if H is not t.F]
    direct = is_cartesian_transformation_direct(p, t, full_pool, mode=mode)
    if direct.holds != pw.holds:
        raise InconsistencyError(
            f"pointwise ({pw.holds}) and direct ({direct.holds}) Cartesian verdicts disagree: "
            f"{pw.counterexample or direct.counterexample}"
        )
    return Verdict(
        pw.holds,
        witness={"pointwise": pw.holds, "direct": direct.holds, "pool": [H.name for H in full_pool]},
        counterexample=pw.counterexample or direct.counterexample,
    )


def check_cartesian_composition(p: LaxFunctor, t1: OplaxTransformation, t2: OplaxTransformation) -> Verdict:
    """The composite ``t1 | t2`` is pointwise Cartesian; a non-Cartesian factor is reported."""
    for i, t in enumerate((t1, t2), 1):
        v = is_pointwise_cartesian(p, t)
        if not v:
            return Verdict(False, counterexample={"factor": i, **v.counterexample})
    return is_pointwise_cartesian(p, vcomp_transformations(t1, t2))
