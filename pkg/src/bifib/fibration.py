"""Cartesian cells, fibrations of bicategories, cleavages and lifts.

Lifting problems for a 1-cell ``f : x -> y`` are quadruples
``(z, g : z -> y, h : pz -> px, alpha : h . pf => pg)``. Composition is
written "h then pf" throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .core.classical import (
    CartesianCache,
    is_cartesian_morphism_1cat,
    is_grothendieck_fibration_1cat,
)
from .core.report import CoherenceReport, Verdict
from .errors import InconsistencyError, PreconditionError
from .functor import LaxFunctor
from .ids import ordered


@dataclass(frozen=True)
class LiftProblem:
    z: Hashable
    g: Hashable
    h: Hashable
    alpha: Hashable


@dataclass(frozen=True)
class Lift:
    h_hat: Hashable
    alpha_hat: Hashable
    beta_hat: Hashable


def _memo(p: LaxFunctor) -> dict:
    return p.__dict__.setdefault("_fib_memo", {})


def _require_lax(p: LaxFunctor) -> None:
    if p.variance == "oplax" and not p.strict:
        raise PreconditionError(f"{p!r} must be lax or pseudo")


def _require_strict(p: LaxFunctor) -> None:
    if not p.strict:
        raise PreconditionError(f"{p!r} is not strict")


# local (hom-level) notions

def _hom_cache(p: LaxFunctor, x, y) -> CartesianCache:
    caches = _memo(p).setdefault("cart2", {})
    if (x, y) not in caches:
        caches[(x, y)] = CartesianCache(p.hom_functor(x, y))
    return caches[(x, y)]


def is_cartesian_2cell(p: LaxFunctor, sigma) -> Verdict:
    """Cartesian with respect to the local functor ``p_{x,y}``."""
    E = p.source
    x, y = E.one_cells[E.src2(sigma)]
    cache = _hom_cache(p, x, y)
    if sigma in cache._memo and cache._memo[sigma]:
        return Verdict(True)
    v = is_cartesian_morphism_1cat(p.hom_functor(x, y), sigma)
    cache._memo[sigma] = v.holds
    return v


def _cart2(p: LaxFunctor, sigma) -> bool:
    E = p.source
    x, y = E.one_cells[E.src2(sigma)]
    return _hom_cache(p, x, y)(sigma)


def is_locally_fibred(p: LaxFunctor, order: str = "asc") -> Verdict:
    """Every local functor is a Grothendieck fibration; witness: chosen local lifts per hom."""
    memo = _memo(p)
    key = ("locally_fibred", order)
    if key in memo:
        return memo[key]
    E = p.source
    lifts = {}
    result = None
    for x in ordered(E.obs):
        for y in ordered(E.obs):
            v = is_grothendieck_fibration_1cat(p.hom_functor(x, y), order=order)
            if not v:
                result = Verdict(False, witness=lifts, counterexample={"hom": (x, y), **v.counterexample})
                break
            lifts[(x, y)] = v.witness
        if result is not None:
            break
    memo[key] = result if result is not None else Verdict(True, witness=lifts)
    return memo[key]


# lifting problems

def lift_problems(p: LaxFunctor, f, z, invertible: bool = True):
    E, B = p.source, p.target
    x, y = E.one_cells[f]
    pf = p.map1[f]
    for g in ordered(E.hom(z, y)):
        for h in ordered(B.hom(p.ob[z], p.ob[x])):
            cells = B.cells(B.c1(h, pf), p.map1[g])
            if invertible:
                cells = [a for a in cells if B.is_invertible(a)]
            for a in ordered(cells):
                yield LiftProblem(z, g, h, a)


def strict_lifts(p: LaxFunctor, f, prob: LiftProblem, order: str = "asc", invertible: bool = True) -> list[Lift]:
    """Lifts with ``p(h_hat) = h`` and ``p2 | p(alpha_hat) = alpha``; beta_hat is an identity."""
    E, B = p.source, p.target
    x = E.src1(f)
    out = []
    for hh in ordered(E.hom(prob.z, x), order):
        if p.map1[hh] != prob.h:
            continue
        p2 = p.lax_comp(hh, f)
        for ah in ordered(E.cells(E.c1(hh, f), prob.g), order):
            if invertible and not E.is_invertible(ah):
                continue
            if B.v(p2, p.map2[ah]) == prob.alpha:
                out.append(Lift(hh, ah, B.id2[prob.h]))
    return out


def general_lifts(p: LaxFunctor, f, prob: LiftProblem) -> list[Lift]:
    """Lifts allowing any invertible ``beta_hat : p(h_hat) => h``."""
    E, B = p.source, p.target
    x = E.src1(f)
    pf = p.map1[f]
    out = []
    for hh in ordered(E.hom(prob.z, x)):
        p2 = p.lax_comp(hh, f)
        betas = ordered(B.iso_cells(p.map1[hh], prob.h))
        if not betas:
            continue
        for ah in ordered(E.cells(E.c1(hh, f), prob.g)):
            if not E.is_invertible(ah):
                continue
            rhs = B.v(p2, p.map2[ah])
            for bh in betas:
                if B.v(B.wr(bh, pf), prob.alpha) == rhs:
                    out.append(Lift(hh, ah, bh))
    return out


def morphisms_of_problems(p: LaxFunctor, f, prob1: LiftProblem, prob2: LiftProblem):
    """Pairs (delta, sigma) with ``alpha1 | p(sigma) = (delta . pf) | alpha2``."""
    E, B = p.source, p.target
    pf = p.map1[f]
    for d in ordered(B.cells(prob1.h, prob2.h)):
        lhs_tail = B.v(B.wr(d, pf), prob2.alpha)
        for s in ordered(E.cells(prob1.g, prob2.g)):
            if B.v(prob1.alpha, p.map2[s]) == lhs_tail:
                yield d, s


def _factor_solutions(p: LaxFunctor, f, lift1: Lift, lift2: Lift, d, s) -> list:
    E, B = p.source, p.target
    target = E.v(lift1.alpha_hat, s)
    lhs_beta = B.v(lift1.beta_hat, d)
    return [
        dh
        for dh in ordered(E.cells(lift1.h_hat, lift2.h_hat))
        if B.v(p.map2[dh], lift2.beta_hat) == lhs_beta and E.v(E.wr(dh, f), lift2.alpha_hat) == target
    ]


def _cartesian_1cell(p: LaxFunctor, f, lifts_fn) -> Verdict:
    E = p.source
    for z in ordered(E.obs):
        problems = list(lift_problems(p, f, z))
        lifts = {}
        for prob in problems:
            lifts[prob] = lifts_fn(p, f, prob)
            if not lifts[prob]:
                return Verdict(False, counterexample={"clause": 1, "problem": prob})
        for prob1 in problems:
            for prob2 in problems:
                for d, s in morphisms_of_problems(p, f, prob1, prob2):
                    for l1 in lifts[prob1]:
                        for l2 in lifts[prob2]:
                            sols = _factor_solutions(p, f, l1, l2, d, s)
                            if len(sols) != 1:
                                return Verdict(
                                    False,
                                    counterexample={
                                        "clause": 2, "problems": (prob1, prob2), "lifts": (l1, l2),
                                        "delta": d, "sigma": s, "solutions": sols,
                                    },
                                )
    return Verdict(True)


def is_cartesian_1cell_strict(p: LaxFunctor, f) -> Verdict:
    """Strict lifting characterization: strict lifts exist and 2-cells factor uniquely."""
    _require_strict(p)
    if not is_locally_fibred(p):
        raise PreconditionError(f"{p!r} is not locally fibred")
    memo = _memo(p).setdefault("cart1_strict", {})
    if f not in memo:
        memo[f] = _cartesian_1cell(p, f, strict_lifts)
    return memo[f]


def is_cartesian_1cell_def(p: LaxFunctor, f) -> Verdict:
    """Original definition: lifts carry an invertible ``beta_hat``; enumerated in full."""
    _require_lax(p)
    memo = _memo(p).setdefault("cart1_def", {})
    if f not in memo:
        memo[f] = _cartesian_1cell(p, f, general_lifts)
    return memo[f]


def is_fibration(p: LaxFunctor, order: str = "asc") -> Verdict:
    """Locally fibred, Cartesian 1-cell lifts exist, Cartesian 2-cells closed under composition.

    The witness maps ``(e, f)`` to the first Cartesian lift of ``f`` with codomain ``e``.
    """
    _require_strict(p)
    E, B = p.source, p.target
    lf = is_locally_fibred(p)
    if not lf:
        return Verdict(False, counterexample={"clause": 1, **lf.counterexample})
    lifts = {}
    for e in ordered(E.obs):
        into_e = [k for x in E.obs for k in E.hom(x, e)]
        for b in ordered(B.obs):
            for f in ordered(B.hom(b, p.ob[e])):
                chosen = next(
                    (k for k in ordered(into_e, order) if p.map1[k] == f and is_cartesian_1cell_strict(p, k)),
                    None,
                )
                if chosen is None:
                    return Verdict(False, witness=lifts, counterexample={"clause": 2, "object": e, "base": f})
                lifts[(e, f)] = chosen
    cart = [a for a in ordered(E.two_cells) if _cart2(p, a)]
    by_src_obj: dict = {}
    for a in cart:
        by_src_obj.setdefault(E.one_cells[E.src2(a)][0], []).append(a)
    for a in cart:
        y = E.one_cells[E.src2(a)][1]
        for b in by_src_obj.get(y, []):
            c = E.h(a, b)
            if not _cart2(p, c):
                return Verdict(False, witness=lifts, counterexample={"clause": 3, "cells": (a, b), "composite": c})
    return Verdict(True, witness=lifts)


@dataclass
class Cleavage:
    """Chosen Cartesian data for a strict fibration.

    ``lift1[(e, f)]`` is a Cartesian 1-cell over ``f`` with codomain ``e``;
    ``local[(g, beta)]`` a Cartesian 2-cell over ``beta`` with codomain ``g``;
    ``lift_triple`` caches strict lifts (beta_hat always an identity).
    """

    p: LaxFunctor
    lift1: dict
    local: dict
    lift_triple: dict = field(default_factory=dict)
    order: str = "asc"


def synthesize_cleavage(p: LaxFunctor, order: str = "asc") -> Cleavage:
    """Cleavage choosing the least (or greatest) witness by cell id.

    Memoized per functor and order; lazily added lift entries are deterministic.
    """
    memo = _memo(p).setdefault("cleavage", {})
    if order not in memo:
        memo[order] = _synthesize_cleavage(p, order)
    return memo[order]


def _synthesize_cleavage(p: LaxFunctor, order: str) -> Cleavage:
    fib = is_fibration(p, order=order)
    if not fib:
        raise PreconditionError(f"{p!r} is not a fibration: {fib.counterexample}")
    lf = is_locally_fibred(p, order=order)
    local = {}
    for (x, y), hom_lifts in lf.witness.items():
        for (g, beta), sigma in hom_lifts.items():
            local[(g, beta)] = sigma
    # identity-choosing: identities are Cartesian for strict p, so prefer them
    E, B = p.source, p.target
    lift1 = dict(fib.witness)
    for (e, f) in lift1:
        if f == B.id1[p.ob[e]] and p.map1[E.id1[e]] == f:
            lift1[(e, f)] = E.id1[e]
    for (g, beta) in local:
        if p.map2[E.id2[g]] == beta:
            local[(g, beta)] = E.id2[g]
    return Cleavage(p, lift1, local, order=order)


def validate_cleavage(cl: Cleavage) -> CoherenceReport:
    p = cl.p
    E, B = p.source, p.target
    rep = CoherenceReport()
    for (e, f), k in cl.lift1.items():
        if E.tgt1(k) != e or p.map1[k] != f:
            rep.add("lift1-boundary", e, f, k)
        elif not is_cartesian_1cell_strict(p, k):
            rep.add("lift1-cartesian", e, f, k)
    for (g, beta), s in cl.local.items():
        if E.tgt2(s) != g or p.map2[s] != beta:
            rep.add("local-boundary", g, beta, s)
        elif not _cart2(p, s):
            rep.add("local-cartesian", g, beta, s)
    for (f, prob), lift in cl.lift_triple.items():
        if lift.beta_hat != B.id2[prob.h] or lift not in strict_lifts(p, f, prob, invertible=False):
            rep.add("lift-triple", f, prob)
    return rep


def cartesian_lift_1cell(p: LaxFunctor, cl: Cleavage, f, e):
    try:
        return cl.lift1[(e, f)]
    except KeyError:
        raise PreconditionError(f"cleavage has no lift of {f!r} with codomain {e!r}") from None


def lift_triple_strict(p: LaxFunctor, cl: Cleavage, f_cart, prob: LiftProblem) -> Lift:
    """Strict lift of an invertible problem against a Cartesian 1-cell."""
    if not p.target.is_invertible(prob.alpha):
        raise PreconditionError(f"{prob.alpha!r} is not invertible")
    key = (f_cart, prob)
    if key not in cl.lift_triple:
        found = strict_lifts(p, f_cart, prob, order=cl.order)
        if not found:
            raise InconsistencyError(f"no strict lift of {prob} through {f_cart!r}")
        cl.lift_triple[key] = found[0]
    return cl.lift_triple[key]


def lift_triple_noninvertible(p: LaxFunctor, cl: Cleavage, f_cart, prob: LiftProblem) -> Lift:
    """Lift of a problem with arbitrary ``alpha``; the resulting ``alpha_hat`` is Cartesian.

    Take the chosen Cartesian 2-cell ``rho : k => g`` over ``alpha``, lift the
    identity problem on ``k`` strictly to ``gamma : h_hat . f => k`` and set
    ``alpha_hat = gamma | rho``.
    """
    E, B = p.source, p.target
    key = (f_cart, prob, "noninvertible")
    if key in cl.lift_triple:
        return cl.lift_triple[key]
    try:
        rho = cl.local[(prob.g, prob.alpha)]
    except KeyError:
        raise PreconditionError(f"cleavage has no local lift of {prob.alpha!r} at {prob.g!r}") from None
    k = E.src2(rho)
    inner = LiftProblem(prob.z, k, prob.h, B.id2[p.map1[k]])
    gamma = lift_triple_strict(p, cl, f_cart, inner)
    alpha_hat = E.v(gamma.alpha_hat, rho)
    if not _cart2(p, alpha_hat):
        raise InconsistencyError(f"composite {alpha_hat!r} is not Cartesian")
    lift = Lift(gamma.h_hat, alpha_hat, B.id2[prob.h])
    cl.lift_triple[key] = lift
    return lift


def factor_2cell(p: LaxFunctor, f_cart, prob1: LiftProblem, lift1: Lift, prob2: LiftProblem, lift2: Lift, delta, sigma):
    """The unique ``delta_hat : h_hat1 => h_hat2`` over ``delta`` compatible with ``sigma``."""
    B = p.target
    pf = p.map1[f_cart]
    if B.v(prob1.alpha, p.map2[sigma]) != B.v(B.wr(delta, pf), prob2.alpha):
        raise PreconditionError("(delta, sigma) is not a morphism of lifting problems")
    sols = _factor_solutions(p, f_cart, lift1, lift2, delta, sigma)
    if len(sols) != 1:
        raise InconsistencyError(f"expected a unique factorization, found {len(sols)}")
    return sols[0]


def unique_2cell_test(p: LaxFunctor, f_cart, alpha_cart, d1, d2) -> bool:
    """Whether ``p(d1) = p(d2)`` and ``d1.f | alpha = d2.f | alpha``.

    When that holds the two 2-cells must coincide; a counterexample raises.
    """
    E = p.source
    same_image = p.map2[d1] == p.map2[d2]
    same_paste = E.v(E.wr(d1, f_cart), alpha_cart) == E.v(E.wr(d2, f_cart), alpha_cart)
    premises = same_image and same_paste
    if premises and d1 != d2:
        raise InconsistencyError(f"{d1!r} != {d2!r} although both agree after p and after pasting")
    return premises
