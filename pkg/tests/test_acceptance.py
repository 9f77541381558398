"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the lines are
printed even without ``-s``).
"""
from __future__ import annotations

import json
import time
from pathlib import Path

import pytest

from _support import (
    arrow_diagrams,
    empty_diagram,
    limit_agreement,
    mutations,
    product_diagrams,
    pullback_diagrams,
    terminal_diagrams,
    underlying_functor,
)
from bifib.cli import run_command
from bifib.core.bicategory import validate_bicategory
from bifib.core.classical import is_cartesian_morphism_1cat
from bifib.document import parse_document, serialize
from bifib.expfib import (
    canonical_lift,
    factor_through_cartesian,
    factorization_report,
    factorizations_by_enumeration,
    is_cartesian_transformation,
    is_pseudonatural,
)
from bifib.fibration import (
    is_cartesian_1cell_def,
    is_cartesian_1cell_strict,
    is_cartesian_2cell,
    is_fibration,
    is_locally_fibred,
    synthesize_cleavage,
)
from bifib.fixture_docs import cospan_diagram, fixture_documents, product_diagram
from bifib.fixtures import (
    all_bicategory_fixtures,
    delooping_z2,
    fix_cod,
    fix_id_sq,
    fix_nonpreserving,
    fix_proj,
    fix_proj2,
)
from bifib.functor import (
    compose_functors,
    enumerate_modifications,
    enumerate_transformations,
    identity_functor,
    postwhisker,
    validate_functor,
    validate_transformation,
    vcomp_transformations,
)
from bifib.groth import compare_section_equivalences, is_2rari_universal, oplax_comma, p_L, s_L, section_equivalence
from bifib.limits import find_limit, is_limit, lift_limit, limits_equivalent

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
STRICT_FIBRATIONS = {
    "FIX-COD": fix_cod,
    "FIX-PROJ": fix_proj,
    "FIX-PROJ2": fix_proj2,
    "id(FIX-SQ)": fix_id_sq,
    "FIX-NP": fix_nonpreserving,
}


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def _lift_inputs(p, limit):
    """Up to ``limit`` triples ``(F, G, tau : F => G.p)`` over walking-arrow diagrams."""
    out = []
    for F in arrow_diagrams(p.target):
        for G in arrow_diagrams(p.source):
            for tau in enumerate_transformations(F, compose_functors(G, p)):
                out.append((F, G, tau))
    step = max(1, len(out) // limit)
    return out[::step][:limit]


def _factorization_problems(p, cl, cases, pool):
    """``(tau_bar, sigma, kappa, alpha)`` with ``alpha`` invertible."""
    B = p.target
    for F, G, tau in cases:
        Fb, tb = canonical_lift(p, cl, F, G, tau)
        Fbp = compose_functors(Fb, p)
        tbp = postwhisker(tb, p, Fbp, None)
        for H in pool:
            Hp = compose_functors(H, p)
            for s in enumerate_transformations(H, G):
                sp = postwhisker(s, p, Hp, tbp.G)
                for k in enumerate_transformations(Hp, Fbp):
                    for al in enumerate_modifications(vcomp_transformations(k, tbp), sp):
                        if all(B.is_invertible(c) for c in al.comp.values()):
                            yield tb, s, k, al.comp


def test_criterion_1_coherence_soundness(report):
    t = time.perf_counter()
    fx = all_bicategory_fixtures()
    valid = [n for n, B in fx.items() if validate_bicategory(B).ok]
    pool = dict(fx, **{"B(Z/2)": delooping_z2()})
    ms = mutations(pool, per_fixture=12, seed=1)
    missed = []
    for m in ms:
        rep = validate_bicategory(m.apply(pool[m.fixture]))
        if rep.ok or not all(v.axiom for v in rep.violations):
            missed.append(m)
    dt = time.perf_counter() - t
    ok = len(valid) == len(fx) == 6 and len(ms) >= 50 and not missed and dt < 10
    report(1, ok, f"{len(valid)}/{len(fx)} fixtures valid, {len(ms) - len(missed)}/{len(ms)} mutations rejected, {dt:.1f}s")


def test_criterion_2_classical_agreement(report):
    t = time.perf_counter()
    cells = disagree = 0
    for name in ("FIX-COD", "FIX-PROJ", "id(FIX-SQ)", "FIX-NP"):
        p = STRICT_FIBRATIONS[name]()
        F = underlying_functor(p)
        for f in p.source.one_cells:
            cells += 1
            disagree += bool(is_cartesian_1cell_def(p, f)) != bool(is_cartesian_morphism_1cat(F, f))
    instances = bad = 0
    spaces = {n: STRICT_FIBRATIONS[n]().source for n in ("FIX-COD", "FIX-PROJ", "id(FIX-SQ)", "FIX-NP")}
    for E in spaces.values():
        diagrams = [empty_diagram(E), *terminal_diagrams(E), *product_diagrams(E), *pullback_diagrams(E)]
        for J in diagrams:
            ours, classical = limit_agreement(E, J)
            instances += 1
            bad += ours != classical
    dt = time.perf_counter() - t
    ok = disagree == 0 and bad == 0 and dt < 30
    report(2, ok, f"{cells - disagree}/{cells} 1-cells and {instances - bad}/{instances} limit instances agree, {dt:.1f}s")


def test_criterion_3_definition_matches_strict_form(report):
    total = disagree = 0
    for make in STRICT_FIBRATIONS.values():
        p = make()
        assert p.strict and is_locally_fibred(p)
        for f in p.source.one_cells:
            total += 1
            disagree += bool(is_cartesian_1cell_def(p, f)) != bool(is_cartesian_1cell_strict(p, f))
    report(3, disagree == 0, f"{disagree} disagreements over {total} 1-cells")


def test_criterion_4_comma_projection_is_a_fibration(report):
    verdicts = {}
    for name in ("id(FIX-SQ)", "FIX-COD", "FIX-PROJ"):
        _, d0 = oplax_comma(STRICT_FIBRATIONS[name]())
        verdicts[name] = bool(is_fibration(d0))
    report(4, all(verdicts.values()), ", ".join(f"{n}: {v}" for n, v in verdicts.items()))


def test_criterion_5_quasi_rari_section(report):
    problems = []
    for name in ("id(FIX-SQ)", "FIX-COD", "FIX-PROJ", "FIX-PROJ2"):
        p = STRICT_FIBRATIONS[name]()
        pL = p_L(p)
        E = p.source
        sections = {}
        for order in ("asc", "desc"):
            cl = synthesize_cleavage(p, order)
            for (e, _), c in cl.lift1.items():
                X = (E.src1(c), e, c)
                if not is_2rari_universal(pL, X):
                    problems.append((name, order, "2rari", X))
            s = s_L(p, cl, pL, order=order)
            if not (s.pseudo and validate_functor(s).ok):
                problems.append((name, order, "pseudo"))
            if not compose_functors(s, pL).same_tables(identity_functor(pL.target)):
                problems.append((name, order, "section"))
            sections[order] = s
        t, rep = section_equivalence(pL, sections["asc"], sections["desc"])
        if not rep.ok:
            problems.append((name, "equivalence", rep.axioms()))
        t2, _ = section_equivalence(pL, sections["asc"], sections["desc"], "desc")
        if not compare_section_equivalences(pL, t, t2):
            problems.append((name, "uniqueness"))
    report(5, not problems, f"problems: {problems}" if problems else "4 fibrations, both seed orders")


def test_criterion_6_exponential_fibration(report):
    problems = []
    lifts = agree = verdicts = factorizations = 0
    for make in (fix_cod, fix_proj, fix_proj2):
        p = make()
        cl = synthesize_cleavage(p)
        E = p.source
        pool = arrow_diagrams(E, limit=4)
        cases = _lift_inputs(p, 6)
        for F, G, tau in cases:
            Fb, tb = canonical_lift(p, cl, F, G, tau)
            lifts += 1
            exact = (
                compose_functors(Fb, p).same_tables(F)
                and {a: p.map1[c] for a, c in tb.comp1.items()} == tau.comp1
                and {f: p.map2[c] for f, c in tb.comp2.items()} == tau.comp2
            )
            cart = all(is_cartesian_1cell_strict(p, c) for c in tb.comp1.values()) and all(
                is_cartesian_2cell(p, c) for c in tb.comp2.values()
            )
            if not (exact and cart and validate_transformation(tb).ok):
                problems.append((p.name, "lift", F.name, G.name))
            for t in [tb, *enumerate_transformations(Fb, G)[:3]]:
                v = is_cartesian_transformation(p, t, pool, cleavage=cl)
                verdicts += 1
                agree += v.witness["pointwise"] == v.witness["direct"]
        for tb, s, k, alpha in _factorization_problems(p, cl, cases[:3], pool[:2]):
            kb, ab = factor_through_cartesian(p, cl, tb, s, k, alpha)
            found = factorizations_by_enumeration(p, tb, s, k, alpha)
            factorizations += 1
            if not (factorization_report(p, kb, ab, k, alpha).ok and len(found) == 1 and found[0][0].same_components(kb)):
                problems.append((p.name, "factorization"))
    ok = not problems and agree == verdicts and factorizations > 0
    report(
        6, ok,
        f"{lifts} exact Cartesian lifts, {agree}/{verdicts} verdicts agree, {factorizations} unique factorizations"
        + (f", problems: {problems[:3]}" if problems else ""),
    )


def _limit_instances():
    cod, proj = fix_cod(), fix_proj()
    return [
        ("FIX-PROJ product", proj, product_diagram(proj.source, ("p", "1"), ("q", "0"))),
        ("FIX-COD product", cod, product_diagram(cod.source, "a<=1", "b<=1")),
        ("FIX-COD pullback", cod, cospan_diagram(cod.source, "a<=1", "b<=1", "1<=1")),
    ]


def test_criterion_7_lifting_limits(report):
    lines = []
    ok = True
    for name, p, J in _limit_instances():
        t = time.perf_counter()
        res = lift_limit(p, synthesize_cleavage(p), J, check_hypotheses=True)
        E = p.source
        direct = find_limit(E, J)
        good = is_limit(E, J, res.apex, res.cone)[0] and direct is not None
        good = good and limits_equivalent(E, J, (res.apex, res.cone), direct[:2])
        dt = time.perf_counter() - t
        ok = ok and good and dt < 60
        lines.append(f"{name} apex {res.apex!r} {'ok' if good else 'bad'} {dt:.1f}s")
    report(7, ok, "; ".join(lines))


def test_criterion_8_pseudo_mode(report):
    problems = []
    checked = 0
    for make in (fix_cod, fix_proj, fix_proj2):
        p = make()
        cl = synthesize_cleavage(p)
        cases = [c for c in _lift_inputs(p, 12) if is_pseudonatural(c[2])]
        for F, G, tau in cases:
            _, tb = canonical_lift(p, cl, F, G, tau, mode="pseudo")
            checked += 1
            if not is_pseudonatural(tb):
                problems.append((p.name, "lift"))
        pool = arrow_diagrams(p.source, limit=2)
        for tb, s, k, alpha in _factorization_problems(p, cl, cases[:3], pool):
            if not (is_pseudonatural(s) and is_pseudonatural(k)):
                continue
            kb, _ = factor_through_cartesian(p, cl, tb, s, k, alpha)
            checked += 1
            if not is_pseudonatural(kb):
                problems.append((p.name, "factorization"))
    for name, p, J in _limit_instances():
        res = lift_limit(p, synthesize_cleavage(p), J, "pseudo")
        checked += 2
        if not (is_pseudonatural(res.lifted_cone) and is_pseudonatural(res.cone)):
            problems.append((name, "limit"))
    report(8, not problems and checked > 0, f"{checked} outputs checked" + (f", problems: {problems}" if problems else ""))


def _emitting_commands() -> list[list[str]]:
    f = lambda name: str(FIXTURES / name)  # noqa: E731
    pullback = json.dumps(["0<=a", "b<=1", "0<=b", "a<=1"], separators=(",", ":"))
    problem = json.dumps(["0<=0", json.dumps(["0<=0", "b<=1", "0<=b", "0<=1"], separators=(",", ":")), "0<=a", "1:0<=1"])
    cod = ["--in", f("fix_cod.json"), "--functor", "FIX-COD"]
    proj = ["--in", f("fix_proj.json"), "--functor", "FIX-PROJ"]
    return [
        *(["validate", "--in", f(n)] for n in sorted(fixture_documents())),
        ["check", "fibration", *cod],
        ["check", "locally-fibred", "--in", f("fix_proj2.json"), "--functor", "FIX-PROJ2"],
        ["check", "cartesian-1cell", *cod, "--cell", pullback],
        ["comma", *proj],
        ["arrow", "--in", f("fix_2cell.json"), "--bicategory", "FIX-2CELL"],
        ["section", *cod],
        ["section", *proj, "--seed-order", "desc"],
        ["lift", "triple", *cod, "--cell", pullback, "--problem", problem],
        ["lift", "cone", *proj, "--diagram", "product"],
        ["limit", "lift", *proj, "--diagram", "product"],
        ["limit", "lift", *cod, "--diagram", "pullback"],
        ["limit", "find", "--in", f("fix_proj.json"), "--bicategory", "FIX-LD(ISO)xFIX-LD(CHAIN)", "--diagram", "product"],
        ["reindex", *proj, "--diagram", "fiber-product", "--cell", "0<=1"],
    ]


def test_criterion_9_cli_round_trip_and_rechecks(report, tmp_path):
    unstable = []
    for path in sorted(FIXTURES.glob("*.json")):
        text = path.read_text(encoding="utf-8")
        if serialize(parse_document(text)) != text:
            unstable.append(path.name)
    failed = []
    cmds = _emitting_commands()
    for i, argv in enumerate(cmds):
        out = tmp_path / f"cert{i}.json"
        res = run_command([*argv, "--emit", str(out)])
        again = run_command(["check", "certificate", "--in", str(out)]) if res.code == 0 else res
        if res.code != 0 or again.code != 0:
            failed.append((" ".join(argv[:2]), res.code, again.code))
    n = len(list(FIXTURES.glob("*.json")))
    ok = not unstable and not failed
    report(9, ok, f"{n - len(unstable)}/{n} files round-trip, {len(cmds) - len(failed)}/{len(cmds)} certificates re-verify" + (f", failed: {failed}" if failed else ""))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
