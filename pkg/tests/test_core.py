from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from _support import mutations, underlying_category, underlying_functor
from bifib.core import (
    Category,
    Functor1,
    free_fibration_1cat,
    is_cartesian_morphism_1cat,
    is_equivalence_1cat,
    is_grothendieck_fibration_1cat,
    is_rari_universal_1cat,
    rari_of_1cat,
    validate_bicategory,
    validate_category,
    validate_functor_1cat,
)
from bifib.core.bicategory import Bicategory, locally_discrete, product_bicategory
from bifib.core.category import arrow_category, discrete_category, poset_category, product_category
from bifib.core.classical import limits_1cat
from bifib.core.report import Bounds
from bifib.errors import PreconditionError, SizeLimitError, StructuralError
from bifib.fixtures import all_bicategory_fixtures, delooping_z2, fix_2cell, fix_cod, sq_category


def left_zero_monoid() -> Category:
    """One object; morphisms 1, a, b with xy = x for x, y in {a, b}."""
    mors = {m: ("*", "*") for m in ("1", "a", "b")}
    comp = {}
    for x, y in itertools.product(mors, repeat=2):
        comp[(x, y)] = y if x == "1" else x
    return Category(["*"], mors, {"*": "1"}, comp, name="LZ")


def test_terminal_category_is_valid():
    C = discrete_category(["*"])
    assert validate_category(C).ok


def test_square_poset_is_valid():
    C = sq_category()
    assert validate_category(C).ok
    # every composable triple was checked: 4 objects, 9 morphisms
    assert len(C.morphisms) == 9


def test_redirected_comp_in_square_poset_is_a_boundary_violation():
    C = sq_category()
    comp = dict(C.comp)
    comp[("0<=a", "a<=1")] = "0<=b"
    rep = validate_category(Category(C.objects, C.morphisms, C.identity, comp))
    assert "boundary" in rep.axioms()


def _monoid_laws_hold(comp: dict, unit: str) -> bool:
    els = {x for x, _ in comp}
    assoc = all(comp[(comp[(x, y)], z)] == comp[(x, comp[(y, z)])] for x in els for y in els for z in els)
    return assoc and all(comp[(unit, x)] == x == comp[(x, unit)] for x in els)


def test_redirects_in_a_monoid_agree_with_a_direct_law_check():
    C = left_zero_monoid()
    assert validate_category(C).ok
    seen = set()
    for key, old in C.comp.items():
        for new in C.morphisms:
            if new == old:
                continue
            comp = dict(C.comp)
            comp[key] = new
            rep = validate_category(Category(C.objects, C.morphisms, C.identity, comp))
            assert rep.ok == _monoid_laws_hold(comp, "1")
            seen |= rep.axioms()
            for v in rep.violations:
                if v.axiom == "associativity":
                    assert len(v.cells) == 3
    assert {"associativity", "unit"} <= seen


def test_dangling_comp_is_structural():
    C = sq_category()
    comp = dict(C.comp)
    comp[("0<=a", "a<=1")] = "nope"
    with pytest.raises(StructuralError):
        validate_category(Category(C.objects, C.morphisms, C.identity, comp))


@pytest.mark.parametrize("name", sorted(all_bicategory_fixtures()))
def test_fixture_bicategories_are_valid(name):
    assert validate_bicategory(all_bicategory_fixtures()[name]).ok


def test_delooping_is_valid():
    assert validate_bicategory(delooping_z2()).ok


def test_assoc_replaced_in_walking_2cell_is_rejected():
    B = fix_2cell()
    assoc = dict(B.assoc)
    key = ("1x", "f", "1y")
    assoc[key] = "t"
    tables = {t: getattr(B, t) for t in Bicategory.TABLES}
    tables["assoc"] = assoc
    rep = validate_bicategory(Bicategory(B.obs, B.one_cells, B.two_cells, **tables))
    assert not rep.ok


def test_non_inverse_associator_breaks_pentagon():
    B = delooping_z2()
    tables = {t: dict(getattr(B, t)) for t in Bicategory.TABLES}
    tables["assoc"][("1", "1", "1")] = "s"
    rep = validate_bicategory(Bicategory(B.obs, B.one_cells, B.two_cells, **tables))
    assert "pentagon" in rep.axioms() or "invertibility" in rep.axioms()


def test_mutations_always_name_an_axiom():
    fx = dict(all_bicategory_fixtures(), **{"B(Z/2)": delooping_z2()})
    ms = mutations(fx, per_fixture=12, seed=1)
    assert len(ms) >= 50
    for m in ms:
        rep = validate_bicategory(m.apply(fx[m.fixture]))
        assert not rep.ok, m
        assert all(v.axiom for v in rep.violations)


def test_dangling_two_cell_is_structural():
    B = fix_2cell()
    two = dict(B.two_cells)
    two["u"] = ("f", "missing")
    tables = {t: getattr(B, t) for t in Bicategory.TABLES}
    with pytest.raises(StructuralError):
        validate_bicategory(Bicategory(B.obs, B.one_cells, two, **tables))


def test_size_guardrail():
    with pytest.raises(SizeLimitError):
        validate_bicategory(fix_cod().source, Bounds(max_obs=3))


def test_product_of_fixtures_is_valid():
    assert validate_bicategory(product_bicategory(fix_2cell(), delooping_z2())).ok


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=8))
def test_random_posets_give_valid_locally_discrete_bicategories(pairs):
    rel = [(str(a), str(b)) for a, b in pairs if a < b]
    C = poset_category([str(i) for i in range(5)], rel)
    assert validate_category(C).ok
    assert validate_bicategory(locally_discrete(C)).ok


# classical oracles

def test_identity_morphisms_are_cartesian():
    C = sq_category()
    F = Functor1(C, C, {x: x for x in C.objects}, {m: m for m in C.morphisms})
    assert all(is_cartesian_morphism_1cat(F, C.identity[x]) for x in C.objects)


def cod_1cat() -> Functor1:
    SQ = sq_category()
    arr = arrow_category(SQ)
    return Functor1(arr, SQ, {u: SQ.tgt(u) for u in arr.objects}, {m: m[3] for m in arr.morphisms})


def test_cod_pullback_square_is_cartesian_and_non_pullback_is_not():
    F = cod_1cat()
    # morphisms of the arrow category are (source arrow, target arrow, top, bottom)
    C = F.source
    pullback = ("0<=b", "a<=1", "0<=a", "b<=1")  # a -> 1 pulled back along b -> 1
    assert pullback in C.morphisms and is_cartesian_morphism_1cat(F, pullback)
    non_pullback = ("0<=a", "1<=1", "0<=1", "a<=1")
    assert non_pullback in C.morphisms and not is_cartesian_morphism_1cat(F, non_pullback)


def test_cod_is_a_fibration_because_square_has_meets():
    v = is_grothendieck_fibration_1cat(cod_1cat())
    assert v.holds and v.witness


def test_walking_arrow_into_iso_is_not_a_fibration():
    A = poset_category(["s", "t"], [("s", "t")])
    ISO = poset_category(["p", "q"], [("p", "q"), ("q", "p")])
    F = Functor1(A, ISO, {"s": "p", "t": "q"}, {"s<=s": "p<=p", "t<=t": "q<=q", "s<=t": "p<=q"})
    v = is_grothendieck_fibration_1cat(F)
    assert not v.holds
    assert v.counterexample["morphism"] == "q<=p"


def test_rari_universal_lifts_for_cod():
    F = cod_1cat()
    SQ = F.target
    for x in SQ.objects:
        assert is_rari_universal_1cat(F, SQ.identity[x])
    # an object of the arrow category over 1 that is not the identity fails
    assert not is_rari_universal_1cat(F, "0<=1")


def test_rari_of_projection_is_the_constant_pairing():
    C = poset_category(["u", "v"], [("u", "v")])
    D = sq_category()
    P = product_category(C, D)
    proj = Functor1(P, D, {x: x[1] for x in P.objects}, {m: m[1] for m in P.morphisms})
    top = "v"
    G = rari_of_1cat(proj, {d: (top, d) for d in D.objects})
    assert validate_functor_1cat(G).ok
    assert all(proj.mor[G.mor[m]] == m for m in D.morphisms)


def test_rari_of_cod_with_identity_choices():
    F = cod_1cat()
    SQ = F.target
    G = rari_of_1cat(F, {x: SQ.identity[x] for x in SQ.objects})
    assert validate_functor_1cat(G).ok
    assert all(G.ob[x] == SQ.identity[x] for x in SQ.objects)


def test_rari_choice_must_be_universal():
    F = cod_1cat()
    with pytest.raises(PreconditionError):
        rari_of_1cat(F, {x: "0<=1" for x in F.target.objects})


def test_equivalence_oracle():
    C = sq_category()
    assert is_equivalence_1cat(Functor1(C, C, {x: x for x in C.objects}, {m: m for m in C.morphisms}))
    ISO = poset_category(["p", "q"], [("p", "q"), ("q", "p")])
    one = discrete_category(["*"])
    incl = Functor1(one, ISO, {"*": "p"}, {one.identity["*"]: "p<=p"})
    assert is_equivalence_1cat(incl)
    two = discrete_category(["l", "r"])
    const = Functor1(one, two, {"*": "l"}, {one.identity["*"]: two.identity["l"]})
    assert not is_equivalence_1cat(const)


def test_free_fibration_of_identity_is_arrow_category():
    C = sq_category()
    FF, proj = free_fibration_1cat(Functor1(C, C, {x: x for x in C.objects}, {m: m for m in C.morphisms}))
    assert len(FF.objects) == len(C.morphisms)
    assert validate_category(FF).ok
    assert is_grothendieck_fibration_1cat(proj)


def test_free_fibration_of_point_is_a_fibration():
    C = sq_category()
    one = discrete_category(["*"])
    top = Functor1(one, C, {"*": "1"}, {one.identity["*"]: "1<=1"})
    FF, proj = free_fibration_1cat(top)
    assert len(FF.objects) == len(C.objects)  # every object maps to the top
    assert is_grothendieck_fibration_1cat(proj)


def test_binary_meets_are_limits_in_square():
    C = sq_category()
    two = discrete_category(["l", "r"])
    meet = {("a", "b"): "0", ("a", "1"): "a", ("1", "1"): "1", ("0", "b"): "0"}
    for (x, y), m in meet.items():
        D = Functor1(two, C, {"l": x, "r": y}, {two.identity["l"]: C.identity[x], two.identity["r"]: C.identity[y]})
        assert [L for L, _ in limits_1cat(C, D)] == [m]


def test_underlying_category_of_locally_discrete_fixture():
    E = fix_cod().source
    C = underlying_category(E)
    assert validate_category(C).ok
    assert validate_functor_1cat(underlying_functor(fix_cod())).ok
