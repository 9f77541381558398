"""The fixture corpus and diagram shapes used throughout the test-suite.

FIX-1      terminal bicategory
FIX-SQ     the commutative-square poset 0 <= a, b <= 1 (a meet-semilattice)
FIX-LD(C)  locally discrete bicategory on a category C
FIX-COD    cod : LD(SQ^->) -> LD(SQ), strict
FIX-PROJ   projection LD(ISO) x LD(CHAIN) -> LD(CHAIN)
FIX-2CELL  the walking 2-cell: x, y, parallel f, g : x -> y, t : f => g
FIX-PROJ2  projection FIX-2CELL x FIX-2CELL -> FIX-2CELL
FIX-NP     poset fibration over CHAIN whose reindexing breaks a fiber product
"""
from __future__ import annotations

from functools import lru_cache

from .core.bicategory import Bicategory, locally_discrete, product_bicategory, strict_bicategory
from .core.category import Category, arrow_category, discrete_category, poset_category
from .functor import LaxFunctor, constant_functor, identity_functor, strict_functor


@lru_cache(maxsize=None)
def fix_1() -> Bicategory:
    return strict_bicategory(
        ["*"], {"1*": ("*", "*")}, {"1:1*": ("1*", "1*")},
        {"*": "1*"}, {"1*": "1:1*"},
        {("1:1*", "1:1*"): "1:1*"}, {("1*", "1*"): "1*"}, {("1:1*", "1:1*"): "1:1*"},
        name="FIX-1",
    )


@lru_cache(maxsize=None)
def sq_category() -> Category:
    return poset_category(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")], name="SQ")


@lru_cache(maxsize=None)
def chain_category() -> Category:
    return poset_category(["0", "1"], [("0", "1")], name="CHAIN")


@lru_cache(maxsize=None)
def iso_category() -> Category:
    """Walking isomorphism: two objects, a unique morphism between any two."""
    return poset_category(["p", "q"], [("p", "q"), ("q", "p")], name="ISO")


def fix_ld(C: Category) -> Bicategory:
    return locally_discrete(C)


@lru_cache(maxsize=None)
def fix_sq() -> Bicategory:
    return locally_discrete(sq_category(), name="FIX-LD(SQ)")


@lru_cache(maxsize=None)
def fix_cod() -> LaxFunctor:
    SQ = sq_category()
    arr = arrow_category(SQ, name="SQ^->")
    E = locally_discrete(arr, name="FIX-LD(SQ^->)")
    B = fix_sq()
    ob = {u: SQ.tgt(u) for u in arr.objects}
    map1 = {m: m[3] for m in arr.morphisms}
    map2 = {E.id2[m]: B.id2[m[3]] for m in arr.morphisms}
    return strict_functor(E, B, ob, map1, map2, name="FIX-COD")


def projection_functor(E: Bicategory, B: Bicategory, name: str = "") -> LaxFunctor:
    P = product_bicategory(E, B)
    return strict_functor(
        P, B,
        {x: x[1] for x in P.obs},
        {f: f[1] for f in P.one_cells},
        {a: a[1] for a in P.two_cells},
        name=name or f"proj({E.name}x{B.name})",
    )


@lru_cache(maxsize=None)
def fix_proj() -> LaxFunctor:
    E = locally_discrete(iso_category(), name="FIX-LD(ISO)")
    B = locally_discrete(chain_category(), name="FIX-LD(CHAIN)")
    return projection_functor(E, B, name="FIX-PROJ")


@lru_cache(maxsize=None)
def fix_2cell() -> Bicategory:
    one = {"1x": ("x", "x"), "1y": ("y", "y"), "f": ("x", "y"), "g": ("x", "y")}
    two = {"1:1x": ("1x", "1x"), "1:1y": ("1y", "1y"), "1:f": ("f", "f"), "1:g": ("g", "g"), "t": ("f", "g")}
    id2 = {c: f"1:{c}" for c in one}
    vcomp = {(i, i): i for i in id2.values()}
    vcomp.update({("1:f", "t"): "t", ("t", "1:g"): "t"})
    hcomp1 = {("1x", "1x"): "1x", ("1y", "1y"): "1y"}
    for k in ("f", "g"):
        hcomp1[("1x", k)] = k
        hcomp1[(k, "1y")] = k
    hcomp2 = {(id2[a], id2[b]): id2[c] for (a, b), c in hcomp1.items()}
    hcomp2.update({("1:1x", "t"): "t", ("t", "1:1y"): "t"})
    return strict_bicategory(["x", "y"], one, two, {"x": "1x", "y": "1y"}, id2, vcomp, hcomp1, hcomp2, name="FIX-2CELL")


@lru_cache(maxsize=None)
def fix_proj2() -> LaxFunctor:
    return projection_functor(fix_2cell(), fix_2cell(), name="FIX-PROJ2")


@lru_cache(maxsize=None)
def fix_nonpreserving() -> LaxFunctor:
    """Fiber over 1 has the product m of a and c; reindexing sends it to m0.

    Over 0, both m0 and z lie below a0 and c0 and are incomparable, so m0 is
    not a product there, and E has no product of a and c at all.
    """
    over = {"a": "1", "c": "1", "m": "1", "a0": "0", "c0": "0", "m0": "0", "z": "0"}
    rel = [
        ("m", "a"), ("m", "c"), ("m0", "a0"), ("m0", "c0"), ("z", "a0"), ("z", "c0"),
        ("a0", "a"), ("c0", "c"), ("m0", "m"),
    ]
    P = poset_category(list(over), rel, name="NP")
    E = locally_discrete(P, name="FIX-LD(NP)")
    B = locally_discrete(chain_category(), name="FIX-LD(CHAIN)")
    map1 = {u: f"{over[P.src(u)]}<={over[P.tgt(u)]}" for u in P.morphisms}
    return strict_functor(E, B, over, map1, {E.id2[u]: B.id2[map1[u]] for u in P.morphisms}, name="FIX-NP")


@lru_cache(maxsize=None)
def delooping_z2() -> Bicategory:
    """One object, one 1-cell, 2-cells the group Z/2 = {e, s}; both compositions multiply."""
    mult = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
    return strict_bicategory(
        ["*"], {"1": ("*", "*")}, {"e": ("1", "1"), "s": ("1", "1")},
        {"*": "1"}, {"1": "e"}, mult, {("1", "1"): "1"}, mult, name="B(Z/2)",
    )


@lru_cache(maxsize=None)
def fix_id_sq() -> LaxFunctor:
    return identity_functor(fix_sq())


def all_bicategory_fixtures() -> dict[str, Bicategory]:
    return {
        "FIX-1": fix_1(),
        "FIX-SQ": fix_sq(),
        "FIX-LD(SQ^->)": fix_cod().source,
        "FIX-PROJ": fix_proj().source,
        "FIX-2CELL": fix_2cell(),
        "FIX-PROJ2": fix_proj2().source,
    }


# diagram shapes

@lru_cache(maxsize=None)
def shape_empty() -> Bicategory:
    return strict_bicategory([], {}, {}, {}, {}, {}, {}, {}, name="EMPTY")


@lru_cache(maxsize=None)
def shape_terminal() -> Bicategory:
    return locally_discrete(discrete_category(["*"]), name="TERMINAL")


@lru_cache(maxsize=None)
def shape_discrete2() -> Bicategory:
    return locally_discrete(discrete_category(["l", "r"]), name="DISCRETE2")


@lru_cache(maxsize=None)
def shape_arrow() -> Bicategory:
    return locally_discrete(poset_category(["s", "t"], [("s", "t")]), name="ARROW")


@lru_cache(maxsize=None)
def shape_cospan() -> Bicategory:
    return locally_discrete(poset_category(["l", "r", "c"], [("l", "c"), ("r", "c")]), name="COSPAN")


def shape_walking_2cell() -> Bicategory:
    return fix_2cell()


def diagram(A: Bicategory, E: Bicategory, ob: dict, map1: dict, name: str = "") -> LaxFunctor:
    """Strict diagram from a locally discrete shape; 2-cells go to identities."""
    map2 = {A.id2[f]: E.id2[map1[f]] for f in A.one_cells}
    J = strict_functor(A, E, ob, map1, map2, name=name)
    J._is_diagram = True
    return J


def pick(A: Bicategory, E: Bicategory, ob: dict, name: str = "") -> LaxFunctor:
    """Diagram on a discrete shape choosing one object per vertex."""
    map1 = {A.id1[a]: E.id1[x] for a, x in ob.items()}
    return diagram(A, E, ob, map1, name=name)


__all__ = [
    "fix_1", "fix_sq", "delooping_z2", "fix_nonpreserving", "fix_cod", "fix_proj", "fix_proj2", "fix_2cell", "fix_id_sq", "fix_ld",
    "sq_category", "chain_category", "iso_category", "projection_functor", "all_bicategory_fixtures",
    "shape_empty", "shape_terminal", "shape_discrete2", "shape_arrow", "shape_cospan", "shape_walking_2cell",
    "diagram", "pick", "constant_functor",
]
