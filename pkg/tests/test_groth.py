from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from _support import arrow_diagrams, underlying_category
from bifib.core.bicategory import locally_discrete, validate_bicategory
from bifib.core.category import arrow_category, identity_functor_1cat, poset_category
from bifib.core.classical import free_fibration_1cat
from bifib.errors import PreconditionError, StructuralError
from bifib.expfib import canonical_lift
from bifib.fibration import is_cartesian_1cell_def, is_cartesian_1cell_strict, is_fibration, synthesize_cleavage
from bifib.fixtures import (
    fix_1,
    fix_2cell,
    fix_cod,
    fix_id_sq,
    fix_proj,
    fix_proj2,
    fix_sq,
    shape_arrow,
    shape_terminal,
)
from bifib.functor import (
    compose_functors,
    constant_functor,
    enumerate_transformations,
    identity_functor,
    postwhisker,
    strict_functor,
    validate_functor,
    validate_transformation,
)
from bifib.groth import (
    Equivalence,
    arrow_bicategory,
    build_lax_section,
    check_composition_condition,
    check_identity_condition,
    compare_section_equivalences,
    is_2rari_universal,
    is_equivalence_data,
    is_section,
    is_strict_lift,
    lift_equivalence,
    oplax_comma,
    p_L,
    pack,
    pack_unpack,
    s_L,
    section_equivalence,
    unpack,
    upgrade_section_to_pseudo,
    validate_section,
)
from bifib.ids import ordered

FIBRATIONS = {"idSQ": fix_id_sq, "COD": fix_cod, "PROJ": fix_proj, "PROJ2": fix_proj2}

# (objects, 1-cells, 2-cells) of B/p, and the number of E^I objects that are Cartesian
COMMA_SIZES = {"idSQ": (9, 36, 36), "COD": (25, 196, 196), "PROJ": (6, 24, 24), "PROJ2": (8, 56, 95)}
RARI_OBJECTS = {"idSQ": (9, 9), "COD": (36, 25), "PROJ": (12, 12), "PROJ2": (16, 8)}


def cod_over_v():
    """cod over a V-shaped poset without meets: locally fibred, not a fibration."""
    C = poset_category(["a", "b", "1"], [("a", "1"), ("b", "1")], name="V")
    arr = arrow_category(C)
    E, B = locally_discrete(arr), locally_discrete(C)
    return strict_functor(
        E, B, {u: C.tgt(u) for u in arr.objects}, {m: m[3] for m in arr.morphisms},
        {E.id2[m]: B.id2[m[3]] for m in arr.morphisms}, name="cod(V)",
    )


# the oplax comma and the arrow bicategory

def test_comma_of_the_terminal_identity_has_one_object():
    C, d0 = oplax_comma(identity_functor(fix_1()))
    assert len(C.obs) == 1 and len(C.one_cells) == 1
    assert validate_bicategory(C).ok and validate_functor(d0).ok


def test_comma_of_identity_on_sq_is_the_classical_free_fibration():
    C, d0 = oplax_comma(fix_id_sq())
    SQ = underlying_category(fix_sq())
    K, proj = free_fibration_1cat(identity_functor_1cat(SQ))
    assert set(C.obs) == set(K.objects)
    assert {u[:4] for u in C.one_cells} == set(K.morphisms)
    assert all(a == b for a, b in C.two_cells.values())
    assert {X: d0.ob[X] for X in C.obs} == dict(proj.ob)


@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_comma_sizes_and_coherence(name):
    p = FIBRATIONS[name]()
    E, B = p.source, p.target
    C, d0 = oplax_comma(p)
    direct = sum(len(B.hom(b, p.ob[e])) for e in E.obs for b in B.obs)
    assert len(C.obs) == direct
    assert (len(C.obs), len(C.one_cells), len(C.two_cells)) == COMMA_SIZES[name]
    assert validate_bicategory(C).ok
    assert d0.strict and validate_functor(d0).ok


@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_comma_projection_is_a_fibration(name):
    _, d0 = oplax_comma(FIBRATIONS[name]())
    assert is_fibration(d0)


def test_arrow_bicategory_of_the_terminal():
    EI = arrow_bicategory(fix_1())
    assert len(EI.obs) == len(EI.one_cells) == len(EI.two_cells) == 1


def test_arrow_bicategory_of_sq_is_the_arrow_category():
    EI = arrow_bicategory(fix_sq())
    arr = arrow_category(underlying_category(fix_sq()))
    assert {X[2] for X in EI.obs} == set(arr.objects)
    # (X, Y, s, t, alpha) with X = (., ., u), Y = (., ., v) against (u, v, s, t)
    assert {(u[0][2], u[1][2], u[2], u[3]) for u in EI.one_cells} == set(arr.morphisms)
    assert all(a == b for a, b in EI.two_cells.values())


def test_arrow_bicategory_of_the_walking_2cell_is_coherent():
    EI = arrow_bicategory(fix_2cell())
    assert len(EI.obs) == len(fix_2cell().one_cells)
    assert validate_bicategory(EI).ok


# p^L

@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_p_L_is_a_valid_strict_functor_over_p(name):
    p = FIBRATIONS[name]()
    pL = p_L(p)
    EI, Bp = pL.source, pL.target
    assert pL.strict and validate_functor(pL).ok
    d0 = Bp.d0
    for X in EI.obs:
        assert d0.ob[pL.ob[X]] == p.ob[X[0]]
    for u in EI.one_cells:
        assert d0.map1[pL.map1[u]] == p.map1[u[2]]


def test_p_L_of_identity_sends_an_arrow_to_itself():
    pL = p_L(fix_id_sq())
    assert all(pL.ob[X] == X for X in pL.source.obs)


def test_p_L_requires_a_strict_functor():
    p = fix_cod()
    lax = type(p)(p.source, p.target, p.ob, p.map1, p.map2, p.unit, p.comp, variance="lax", strict=False)
    with pytest.raises(PreconditionError):
        p_L(lax)


# 2-rari-universal objects

def test_every_object_is_2rari_for_an_identity():
    q = identity_functor(fix_2cell())
    assert all(is_2rari_universal(q, e) for e in q.source.obs)


@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_2rari_objects_of_p_L_are_exactly_the_cartesian_arrows(name):
    p = FIBRATIONS[name]()
    pL = p_L(p)
    EI = pL.source
    rari = {X for X in EI.obs if is_2rari_universal(pL, X)}
    cart = {X for X in EI.obs if is_cartesian_1cell_def(p, X[2])}
    assert rari == cart
    assert (len(EI.obs), len(rari)) == RARI_OBJECTS[name]


def test_non_cartesian_arrow_fails_with_a_hom_witness():
    p = fix_cod()
    pL = p_L(p)
    bad = next(X for X in ordered(pL.source.obs) if not is_cartesian_1cell_strict(p, X[2]))
    v = is_2rari_universal(pL, bad)
    assert not v and {"source", "one_cell"} <= set(v.counterexample)


def test_2rari_respects_the_requested_base_object():
    p = fix_cod()
    pL = p_L(p)
    X = ordered(pL.source.obs)[0]
    other = next(Y for Y in pL.target.obs if Y != pL.ob[X])
    assert not is_2rari_universal(pL, X, other)


# sections and the two conditions

def test_identity_section_from_identity_choices():
    q = identity_functor(fix_2cell())
    s = build_lax_section(q, {e: e for e in q.source.obs})
    assert s.same_tables(identity_functor(fix_2cell()))
    assert is_section(q, s)


def test_section_rejects_missing_and_wrong_choices():
    pL = p_L(fix_cod())
    X = ordered(pL.target.obs)[0]
    with pytest.raises(PreconditionError):
        build_lax_section(pL, {X: next(iter(pL.source.obs))})
    choices = {Y: next(Z for Z in pL.source.obs if pL.ob[Z] == Y) for Y in pL.target.obs}
    bad = next(Z for Z in pL.source.obs if pL.ob[Z] != X)
    with pytest.raises(PreconditionError):
        build_lax_section(pL, {**choices, X: bad})


def test_a_non_fibration_leaves_comma_objects_without_a_2rari_lift():
    pL = p_L(cod_over_v())
    rari = [X for X in pL.source.obs if is_2rari_universal(pL, X)]
    missing = {Y for Y in pL.target.obs if not any(pL.ob[X] == Y for X in rari)}
    assert missing == {("b", "a<=1", "b<=1"), ("a", "b<=1", "a<=1")}
    choices = {pL.ob[X]: X for X in reversed(ordered(rari))}
    with pytest.raises(PreconditionError):
        build_lax_section(pL, choices)


def test_conditions_hold_for_an_identity():
    q = identity_functor(fix_2cell())
    assert check_identity_condition(q) and check_composition_condition(q)


@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_conditions_on_cartesian_objects(name):
    p = FIBRATIONS[name]()
    pL = p_L(p)
    cart = [X for X in pL.source.obs if is_cartesian_1cell_strict(p, X[2])]
    assert check_identity_condition(pL)
    assert check_composition_condition(pL, cart)


def test_unrestricted_composition_sweep_fails_through_a_non_cartesian_object():
    p = fix_proj2()
    pL = p_L(p)
    v = check_composition_condition(pL)
    assert not v
    f, g = v.counterexample["cells"]
    middle = pL.source.tgt1(f)
    assert middle == (("x", "x"), ("y", "x"), ("f", "1x"))
    assert not is_2rari_universal(pL, middle)
    assert check_composition_condition(p_L(fix_cod()))


# s^L

@pytest.mark.parametrize("name", sorted(FIBRATIONS))
@pytest.mark.parametrize("order", ["asc", "desc"])
def test_s_L_is_a_pseudo_section(name, order):
    p = FIBRATIONS[name]()
    pL = p_L(p)
    s = s_L(p, synthesize_cleavage(p, order), pL)
    assert s.pseudo
    assert compose_functors(s, pL).same_tables(identity_functor(pL.target))
    assert upgrade_section_to_pseudo(pL, s).ok
    assert validate_section(pL, s).ok


def test_s_L_of_identity_packs_identity_arrows():
    p = fix_id_sq()
    E = p.source
    s = s_L(p, synthesize_cleavage(p))
    for (b, e, f), Y in s.ob.items():
        assert Y == (b, e, f)
    assert {Y[2] for Y in s.ob.values()} >= set(E.id1.values())


def test_s_L_for_cod_chooses_pullback_squares():
    p = fix_cod()
    s = s_L(p, synthesize_cleavage(p))
    for X, Y in s.ob.items():
        square = Y[2]
        assert p.map1[square] == X[2] and p.source.tgt1(square) == X[1]
        assert is_cartesian_1cell_strict(p, square)
    assert s.ob[("a", "b<=1", "a<=1")][2] == ("0<=a", "b<=1", "0<=b", "a<=1")


def test_s_L_for_proj_chooses_invertible_first_components():
    p = fix_proj()
    E0 = p.source
    s = s_L(p, synthesize_cleavage(p))
    for X, Y in s.ob.items():
        u, f = Y[2]
        assert f == X[2]
        assert u.split("<=")[1] == X[1][0]
    # identity base arrows get identity lifts
    for X, Y in s.ob.items():
        if X[2] == p.target.id1[X[0]]:
            assert Y[2] == E0.id1[X[1]]


def test_s_L_rejects_a_non_fibration():
    p = cod_over_v()
    with pytest.raises(PreconditionError):
        s_L(p, None)


# uniqueness up to equivalence

def test_lift_equivalence_of_an_identity():
    q = fix_proj()
    B = q.target
    e = ("p", "0")
    eq = Equivalence("0<=0", "0<=0", B.id2["0<=0"], B.id2["0<=0"])
    out = lift_equivalence(q, e, e, eq)
    assert is_equivalence_data(q.source, out)
    assert q.map1[out.f] == "0<=0"


def test_lift_equivalence_across_the_iso_factor():
    q = fix_proj()
    B = q.target
    eq = Equivalence("0<=0", "0<=0", B.id2["0<=0"], B.id2["0<=0"])
    out = lift_equivalence(q, ("p", "0"), ("q", "0"), eq)
    assert out.f == ("p<=q", "0<=0") and out.g == ("q<=p", "0<=0")
    assert is_equivalence_data(q.source, out)


def test_lift_equivalence_between_two_lifts_of_the_same_comma_object():
    p = fix_proj()
    pL = p_L(p)
    Bp = pL.target
    X = next(X for X in ordered(Bp.obs) if X[2] != p.target.id1[X[0]])
    lifts = [Y for Y in ordered(pL.source.obs) if pL.ob[Y] == X and is_2rari_universal(pL, Y)]
    assert len(lifts) == 2
    one = Bp.id1[X]
    eq = Equivalence(one, one, Bp.id2[one], Bp.id2[one])
    out = lift_equivalence(pL, lifts[0], lifts[1], eq)
    assert is_equivalence_data(pL.source, out)


def test_lift_equivalence_rejects_non_2rari_objects():
    p = fix_cod()
    pL = p_L(p)
    bad = next(X for X in ordered(pL.source.obs) if not is_2rari_universal(pL, X))
    one = pL.target.id1[pL.ob[bad]]
    eq = Equivalence(one, one, pL.target.id2[one], pL.target.id2[one])
    with pytest.raises(PreconditionError):
        lift_equivalence(pL, bad, bad, eq)


def test_section_equivalence_of_a_section_with_itself_has_identity_components():
    p = fix_cod()
    pL = p_L(p)
    s = s_L(p, synthesize_cleavage(p), pL)
    tau, rep = section_equivalence(pL, s, s)
    assert rep.ok
    EI = pL.source
    assert all(c == EI.id1[s.ob[b]] for b, c in tau.comp1.items())


@pytest.mark.parametrize("name", sorted(FIBRATIONS))
def test_sections_from_opposite_orders_are_equivalent_over_the_identity(name):
    p = FIBRATIONS[name]()
    pL = p_L(p)
    s1 = s_L(p, synthesize_cleavage(p, "asc"), pL)
    s2 = s_L(p, synthesize_cleavage(p, "desc"), pL, order="desc")
    t1, rep1 = section_equivalence(pL, s1, s2, "asc")
    t2, rep2 = section_equivalence(pL, s1, s2, "desc")
    assert rep1.ok and rep2.ok
    assert validate_transformation(t1, mode="pseudo").ok
    assert compare_section_equivalences(pL, t1, t2)


# pack and unpack

def _comma_functors(p, limit=6):
    """Functors from the walking arrow into B/p, built from (F, G, tau)."""
    B, E = p.target, p.source
    C, _ = oplax_comma(p)
    out = []
    for F in arrow_diagrams(B):
        for G in arrow_diagrams(E):
            Gp = compose_functors(G, p)
            for tau in enumerate_transformations(F, Gp):
                out.append((F, G, tau))
                if len(out) >= limit * 4:
                    return C, out
    return C, out


@pytest.mark.parametrize("name", ["COD", "PROJ2"])
def test_unpack_then_pack_is_the_identity(name):
    p = FIBRATIONS[name]()
    C, triples = _comma_functors(p)
    conv = pack_unpack(C)
    assert triples
    for F, G, tau in triples:
        X = conv.pack(F, G, tau)
        assert validate_functor(X).ok
        F2, G2, tau2 = conv.unpack(X)
        assert F2.same_tables(F) and G2.same_tables(G) and tau2.same_components(tau)
        assert conv.pack(F2, G2, tau2).same_tables(X)


def test_unpack_of_a_constant_functor():
    p = fix_cod()
    C, _ = oplax_comma(p)
    X0 = ordered(C.obs)[0]
    X = constant_functor(shape_arrow(), C, X0)
    F, G, tau = unpack(C, X)
    assert set(F.ob.values()) == {X0[0]} and set(G.ob.values()) == {X0[1]}
    assert set(tau.comp1.values()) == {X0[2]}


def test_pack_rejects_mismatched_shapes():
    p = fix_cod()
    C, _ = oplax_comma(p)
    _, triples = _comma_functors(p, limit=1)
    F, G, tau = triples[0]
    with pytest.raises(StructuralError):
        pack(C, F, G, tau.__class__(G, tau.G, tau.comp1, tau.comp2))
    other = constant_functor(shape_terminal(), p.source, ordered(p.source.obs)[0])
    with pytest.raises(StructuralError):
        pack(C, F, other, tau)


def test_arrow_correspondence_round_trips():
    E = fix_2cell()
    EI = arrow_bicategory(E)
    conv = pack_unpack(EI)
    for Fb in arrow_diagrams(E):
        for G in arrow_diagrams(E):
            for tb in enumerate_transformations(Fb, G):
                Y = conv.pair_to_lift(Fb, tb)
                Fb2, tb2 = conv.lift_to_pair(Y)
                assert Fb2.same_tables(Fb) and tb2.same_components(tb)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_canonical_lifts_are_strict_over_their_inputs(data):
    p = fix_cod()
    cl = synthesize_cleavage(p)
    pL = p_L(p)
    C = pL.target
    F = data.draw(st.sampled_from(arrow_diagrams(p.target)))
    G = data.draw(st.sampled_from(arrow_diagrams(p.source)))
    taus = enumerate_transformations(F, compose_functors(G, p))
    if not taus:
        return
    tau = data.draw(st.sampled_from(taus))
    Fb, tb = canonical_lift(p, cl, F, G, tau)
    Y = pack_unpack(pL.source).pair_to_lift(Fb, tb)
    assert is_strict_lift(Y, pL, pack(C, F, G, tau))
    assert postwhisker(tb, p).comp1 == tau.comp1
