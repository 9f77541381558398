"""Command line interface: ``bifib <command> --in doc.json [...]``.

Exit codes: 0 the property holds, 1 it fails (a counterexample is emitted),
2 invalid input, 3 a size guardrail was hit. With ``--emit`` the command
writes a document holding the entities it produced plus a "certificate"
entry; a successful certificate carries a "recheck" argument list that
``bifib check certificate --in <file>`` replays against the file itself.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .core.bicategory import Bicategory, validate_bicategory
from .core.category import Category, Functor1
from .core.report import CoherenceReport, Verdict, Violation
from .document import Document, DocumentBuilder, ParseError, decode_id, parse_document, serialize
from .errors import BifibError, HypothesisError, InconsistencyError, PreconditionError, SizeLimitError, StructuralError
from .expfib import canonical_lift, is_cartesian_transformation, is_pseudonatural, whiskered_components
from .fibration import (
    Cleavage,
    Lift,
    LiftProblem,
    is_cartesian_1cell_def,
    is_cartesian_2cell,
    is_fibration,
    is_locally_fibred,
    lift_triple_noninvertible,
    lift_triple_strict,
    synthesize_cleavage,
    validate_cleavage,
)
from .functor import (
    LaxFunctor,
    Modification,
    OplaxTransformation,
    compose_functors,
    validate_functor,
    validate_modification,
    validate_transformation,
)
from .groth import arrow_bicategory, is_2rari_universal, oplax_comma, p_L, s_L, validate_section
from .ids import encode_id
from .limits import MODES, find_limit, fiber, fiber_diagram_pair, is_limit, lift_limit, reindex_diagram, to_fiber_functor

__all__ = ["parse_document", "serialize", "run_command", "main", "CommandResult", "to_plain"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SIZE = 0, 1, 2, 3


@dataclass
class CommandResult:
    code: int
    artifact: dict | None = None
    message: str = ""


# plain JSON rendering of witnesses

def to_plain(x: Any) -> Any:
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, tuple):
        return encode_id(x)
    if isinstance(x, (list, set, frozenset)):
        items = [to_plain(v) for v in x]
        return sorted(items, key=json.dumps) if not isinstance(x, list) else items
    if isinstance(x, dict):
        return {_key(k): to_plain(v) for k, v in sorted(x.items(), key=lambda kv: _key(kv[0]))}
    if isinstance(x, Verdict):
        return {"holds": x.holds, "witness": to_plain(x.witness), "counterexample": to_plain(x.counterexample)}
    if isinstance(x, CoherenceReport):
        return {"ok": x.ok, "violations": [to_plain(v) for v in x.violations]}
    if isinstance(x, Violation):
        return {"axiom": x.axiom, "cells": [to_plain(c) for c in x.cells]}
    if isinstance(x, Functor1):
        return {"ob": to_plain(x.ob)}
    if isinstance(x, (Bicategory, Category, LaxFunctor, OplaxTransformation, Modification)):
        return x.name
    if dataclasses.is_dataclass(x):
        return {f.name: to_plain(getattr(x, f.name)) for f in dataclasses.fields(x)}
    return repr(x)


def _key(k: Any) -> str:
    return k if isinstance(k, str) else encode_id(k) if isinstance(k, (tuple, int)) else repr(k)


# argument handling

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", required=True, help="input document (JSON)")
    common.add_argument("--emit", help="write the resulting document/certificate here")
    common.add_argument("--mode", choices=MODES, help="pseudo or oplax")
    common.add_argument("--seed-order", choices=("asc", "desc"), default="asc", help="order for chosen lifts")
    common.add_argument("--pool", help="comma separated functor names for the direct Cartesian check")
    common.add_argument("--functor")
    common.add_argument("--bicategory")
    common.add_argument("--cleavage")
    common.add_argument("--cell")
    common.add_argument("--object")
    common.add_argument("--diagram")
    common.add_argument("--transformation")
    common.add_argument("--cone")
    common.add_argument("--section")
    common.add_argument("--problem", help='JSON array ["z", "g", "h", "alpha"]')
    common.add_argument("--lift", help='JSON array ["h_hat", "alpha_hat", "beta_hat"]')

    ap = argparse.ArgumentParser(prog="bifib", description="Finite bicategories, fibrations and limits.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="validate every entity of a document")
    chk = sub.add_parser("check", help="decide a property").add_subparsers(dest="what", required=True)
    for what in (
        "cartesian-1cell", "cartesian-2cell", "locally-fibred", "fibration", "2rari",
        "cartesian-transformation", "section", "lift-triple", "certificate",
    ):
        chk.add_parser(what, parents=[common])
    sub.add_parser("comma", parents=[common], help="oplax comma B/p with its projection")
    sub.add_parser("arrow", parents=[common], help="arrow bicategory of a bicategory")
    sub.add_parser("section", parents=[common], help="the pseudo section s^L of p^L")
    lift = sub.add_parser("lift", help="Cartesian lifts").add_subparsers(dest="what", required=True)
    for what in ("triple", "transformation", "cone"):
        lift.add_parser(what, parents=[common])
    lim = sub.add_parser("limit", help="limits").add_subparsers(dest="what", required=True)
    for what in ("find", "check", "lift"):
        lim.add_parser(what, parents=[common])
    sub.add_parser("reindex", parents=[common], help="reindex a fiber diagram along a base 1-cell")
    return ap


class _Ctx:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.path = Path(args.input)
        self.doc: Document = parse_document(self.path.read_text(encoding="utf-8"))

    def need(self, flag: str) -> str:
        v = getattr(self.args, flag.replace("-", "_"))
        if v is None:
            raise PreconditionError(f"--{flag} is required")
        return v

    def bicategory(self) -> Bicategory:
        return self.doc.lookup("bicategories", self.need("bicategory"))

    def functor(self, flag: str = "functor") -> LaxFunctor:
        return self.doc.functor(self.need(flag))

    def transformation(self, flag: str = "transformation") -> OplaxTransformation:
        return self.doc.lookup("transformations", self.need(flag))

    def cell(self, table: dict, flag: str = "cell"):
        c = decode_id(self.need(flag))
        if c not in table:
            raise PreconditionError(f"unknown cell {self.need(flag)!r}")
        return c

    def cleavage(self, p: LaxFunctor) -> Cleavage:
        if self.args.cleavage is None:
            return synthesize_cleavage(p, self.args.seed_order)
        cl = self.doc.lookup("cleavages", self.args.cleavage)
        if cl.p is not p:
            raise PreconditionError(f"cleavage {self.args.cleavage!r} belongs to another functor")
        rep = validate_cleavage(cl)
        if not rep.ok:
            raise PreconditionError(f"cleavage {self.args.cleavage!r} is invalid: {rep}")
        return cl

    def mode(self, default: str) -> str:
        return self.args.mode or default

    def ids(self, flag: str, n: int) -> list:
        raw = json.loads(self.need(flag))
        if not isinstance(raw, list) or len(raw) != n or not all(isinstance(s, str) for s in raw):
            raise PreconditionError(f"--{flag} must be a JSON array of {n} string ids")
        return [decode_id(s) for s in raw]


def _result(ok: bool, kind: str, builder: DocumentBuilder | None, recheck: list | None, evidence: Any = None, message: str = "") -> CommandResult:
    b = builder or DocumentBuilder()
    cert = {"kind": kind, "holds": ok}
    if ok and recheck is not None:
        cert["recheck"] = recheck
    if evidence is not None:
        cert["witness" if ok else "counterexample"] = to_plain(evidence)
    b.certificate = cert
    return CommandResult(EXIT_OK if ok else EXIT_FAIL, b.to_json(), message or f"{kind}: {'holds' if ok else 'fails'}")


def _with_mode(argv: list, mode: str | None) -> list:
    return argv + (["--mode", mode] if mode else [])


# commands

def cmd_validate(c: _Ctx) -> CommandResult:
    d = c.doc
    mode = c.mode("oplax")
    results, ok = {}, True
    checks = [("bicategories", validate_bicategory), ("functors", validate_functor), ("diagrams", validate_functor)]
    checks += [("transformations", lambda t: validate_transformation(t, mode)), ("modifications", validate_modification)]
    checks += [("cleavages", validate_cleavage)]
    for kind, fn in checks:
        for name, x in getattr(d, kind).items():
            rep = fn(x)
            results[f"{kind}.{name}"] = to_plain(rep)
            ok &= rep.ok
    b = DocumentBuilder()
    for kind in ("bicategories", "diagrams", "functors", "transformations", "modifications", "cleavages"):
        for name, x in getattr(d, kind).items():
            b.add(x, name=name, as_diagram=kind == "diagrams")
    return _result(ok, "validation", b, _with_mode(["validate"], c.args.mode), results)


def cmd_check(c: _Ctx) -> CommandResult:
    what = c.args.what
    if what == "certificate":
        cert = c.doc.certificate or {}
        argv = cert.get("recheck")
        if not argv:
            raise PreconditionError("document carries no re-checkable certificate")
        return run_command(list(argv) + ["--in", str(c.path)])
    if what == "lift-triple":
        return cmd_lift_triple(c, check_only=True)
    if what == "section":
        q, s = c.functor(), c.functor("section")
        rep = validate_section(q, s)
        exact = compose_functors(s, q).same_tables(_identity_tables(q.target))
        if not exact:
            rep.add("section-identity", s.name)
        b = DocumentBuilder()
        b.add(q, name=c.args.functor)
        b.add(s, name=c.args.section)
        return _result(rep.ok, "section", b, ["check", "section", "--functor", c.args.functor, "--section", c.args.section], rep)
    p = c.functor()
    argv = ["check", what, "--functor", c.args.functor]
    b = DocumentBuilder()
    b.add(p, name=c.args.functor)
    if what == "cartesian-1cell":
        f = c.cell(p.source.one_cells)
        v = is_cartesian_1cell_def(p, f)
        argv += ["--cell", c.args.cell]
    elif what == "cartesian-2cell":
        a = c.cell(p.source.two_cells)
        v = is_cartesian_2cell(p, a)
        argv += ["--cell", c.args.cell]
    elif what == "locally-fibred":
        v = is_locally_fibred(p, c.args.seed_order)
    elif what == "fibration":
        v = is_fibration(p, c.args.seed_order)
        if v.holds:
            cl = c.cleavage(p)
            name = b.add(cl, name=c.args.cleavage or "cleavage")
            argv += ["--cleavage", name]
    elif what == "2rari":
        e = c.cell(set(p.source.obs), "object")
        v = is_2rari_universal(p, e)
        argv += ["--object", c.args.object]
    elif what == "cartesian-transformation":
        t = c.transformation()
        b.add(t, name=c.args.transformation)
        pool = [c.doc.functor(n) for n in c.args.pool.split(",") if n] if c.args.pool else None
        for n, H in zip(c.args.pool.split(",") if c.args.pool else [], pool or []):
            b.add(H, name=n)
        cl = c.cleavage(p) if pool is not None else None
        if cl is not None and c.args.cleavage:
            b.add(cl, name=c.args.cleavage)
        v = is_cartesian_transformation(p, t, pool=pool, mode=c.mode("oplax"), cleavage=cl)
        argv += ["--transformation", c.args.transformation]
        if c.args.pool:
            argv += ["--pool", c.args.pool]
        if c.args.cleavage:
            argv += ["--cleavage", c.args.cleavage]
        argv = _with_mode(argv, c.args.mode)
    else:  # pragma: no cover - argparse restricts the choices
        raise PreconditionError(f"unknown check {what!r}")
    return _result(v.holds, what, b, argv, v.witness if v.holds else v.counterexample)


def _identity_tables(B: Bicategory) -> LaxFunctor:
    from .functor import identity_functor

    return identity_functor(B)


def cmd_comma(c: _Ctx) -> CommandResult:
    p = c.functor()
    C, d0 = oplax_comma(p)
    rep = validate_bicategory(C)
    rep.extend(validate_functor(d0), prefix="d0:")
    b = DocumentBuilder()
    b.add(d0, name=f"d0({c.args.functor})")
    return _result(rep.ok, "comma", b, ["validate"], rep)


def cmd_arrow(c: _Ctx) -> CommandResult:
    EI = arrow_bicategory(c.bicategory())
    rep = validate_bicategory(EI)
    b = DocumentBuilder()
    b.add(EI, name=f"{c.args.bicategory}^I")
    return _result(rep.ok, "arrow", b, ["validate"], rep)


def cmd_section(c: _Ctx) -> CommandResult:
    p = c.functor()
    cl = c.cleavage(p)
    pL = p_L(p)
    s = s_L(p, cl, pL, order=c.args.seed_order)
    b = DocumentBuilder()
    qn = b.add(pL, name=f"{c.args.functor}^L")
    sn = b.add(s, name=f"s^L({c.args.functor})")
    rep = validate_section(pL, s)
    return _result(rep.ok, "section", b, ["check", "section", "--functor", qn, "--section", sn], rep)


def _check_lift(p: LaxFunctor, f, prob: LiftProblem, lift: Lift) -> CoherenceReport:
    E, B = p.source, p.target
    rep = CoherenceReport()
    if E.one_cells.get(lift.h_hat) != (prob.z, E.src1(f)):
        rep.add("lift-boundary", lift.h_hat)
        return rep
    if E.two_cells.get(lift.alpha_hat) != (E.c1(lift.h_hat, f), prob.g):
        rep.add("lift-boundary", lift.alpha_hat)
        return rep
    if B.two_cells.get(lift.beta_hat) != (p.map1[lift.h_hat], prob.h) or not B.is_invertible(lift.beta_hat):
        rep.add("lift-beta", lift.beta_hat)
        return rep
    lhs = B.v(p.lax_comp(lift.h_hat, f), p.map2[lift.alpha_hat])
    if lhs != B.v(B.wr(lift.beta_hat, p.map1[f]), prob.alpha):
        rep.add("lift-equation", lift.h_hat, lift.alpha_hat, lift.beta_hat)
    return rep


def cmd_lift_triple(c: _Ctx, check_only: bool = False) -> CommandResult:
    p = c.functor()
    E, B = p.source, p.target
    f = c.cell(E.one_cells)
    z, g, h, alpha = c.ids("problem", 4)
    if z not in set(E.obs) or g not in E.one_cells or h not in B.one_cells or alpha not in B.two_cells:
        raise PreconditionError("lifting problem refers to unknown cells")
    if E.tgt1(g) != E.tgt1(f) or B.two_cells[alpha] != (B.c1(h, p.map1[f]), p.map1[g]):
        raise PreconditionError("ill-typed lifting problem")
    prob = LiftProblem(z, g, h, alpha)
    if check_only:
        lift = Lift(*c.ids("lift", 3))
    else:
        if not is_cartesian_1cell_def(p, f):
            return _result(False, "lift-triple", None, None, {"not_cartesian": f})
        cl = c.cleavage(p)
        lift = (lift_triple_strict if B.is_invertible(alpha) else lift_triple_noninvertible)(p, cl, f, prob)
    rep = _check_lift(p, f, prob, lift)
    argv = ["check", "lift-triple", "--functor", c.args.functor, "--cell", c.args.cell, "--problem", c.args.problem]
    argv += ["--lift", json.dumps([encode_id(lift.h_hat), encode_id(lift.alpha_hat), encode_id(lift.beta_hat)])]
    b = DocumentBuilder()
    b.add(p, name=c.args.functor)
    return _result(rep.ok, "lift-triple", b, argv, to_plain(lift) if rep.ok else rep)


def _transformation_lift(c: _Ctx, p: LaxFunctor, tau: OplaxTransformation, G: LaxFunctor, kind: str) -> CommandResult:
    cl = c.cleavage(p)
    mode = c.mode("pseudo" if is_pseudonatural(tau) and G.pseudo else "oplax")
    Fb, tb = canonical_lift(p, cl, tau.F, G, tau, mode="pseudo" if mode == "pseudo" else G.variance)
    rep = CoherenceReport()
    if not compose_functors(Fb, p).same_tables(tau.F):
        rep.add("lift-over-source", Fb.name)
    if whiskered_components(tb, p) != (tau.comp1, tau.comp2):
        rep.add("lift-over-transformation", tb.name)
    if mode == "pseudo" and not is_pseudonatural(tb):
        rep.add("pseudonaturality", tb.name)
    v = is_cartesian_transformation(p, tb, mode=mode)
    if not v.holds:
        rep.add("cartesian", to_plain(v.counterexample))
    b = DocumentBuilder()
    pn = b.add(p, name=c.args.functor)
    b.add(Fb, name="F_bar")
    tn = b.add(tb, name="tau_bar")
    argv = ["check", "cartesian-transformation", "--functor", pn, "--transformation", tn, "--mode", mode]
    return _result(rep.ok, kind, b, argv, rep)


def cmd_lift(c: _Ctx) -> CommandResult:
    if c.args.what == "triple":
        return cmd_lift_triple(c)
    p = c.functor()
    if c.args.what == "transformation":
        return _transformation_lift(c, p, c.transformation(), c.functor("diagram"), "lift-transformation")
    J = c.functor("diagram")
    Jp = compose_functors(J, p, name=f"{J.name};p")
    if c.args.cone:
        tau = c.doc.lookup("transformations", c.args.cone)
        if not tau.G.same_tables(Jp):
            raise PreconditionError("cone does not end at the diagram followed by the functor")
        tau = OplaxTransformation(tau.F, Jp, tau.comp1, tau.comp2, name=tau.name)
    else:
        found = find_limit(p.target, Jp, c.mode("pseudo"))
        if found is None:
            return _result(False, "lift-cone", None, None, {"no_base_limit": Jp.name})
        tau = OplaxTransformation(found[1].F, Jp, found[1].comp1, found[1].comp2, name="base-cone")
    return _transformation_lift(c, p, tau, J, "lift-cone")


def _limit_artifact(E: Bicategory, En: str, J: LaxFunctor, Jn: str, L, cone: OplaxTransformation, cert, mode: str, kind: str) -> CommandResult:
    b = DocumentBuilder()
    b.add(E, name=En)
    b.add(J, name=Jn)
    cn = b.add(cone, name="cone")
    argv = ["limit", "check", "--bicategory", En, "--diagram", Jn, "--cone", cn, "--object", encode_id(L), "--mode", mode]
    witness = {"apex": L, "comparisons": {x: F.ob for x, F in cert.comparisons.items()}, "witnesses": cert.witnesses}
    return _result(True, kind, b, argv, witness, f"{kind}: {mode} limit at {encode_id(L)}")


def cmd_limit(c: _Ctx) -> CommandResult:
    mode = c.mode("pseudo")
    what = c.args.what
    if what == "lift":
        p = c.functor()
        J = c.functor("diagram")
        cl = c.cleavage(p)
        try:
            res = lift_limit(p, cl, J, mode)
        except HypothesisError as e:
            return _result(False, "limit-lift", None, None, {"hypothesis": e.hypothesis, "detail": e.detail}, str(e))
        En = p.source.name or "E"
        for name, B in c.doc.bicategories.items():
            if B is p.source:
                En = name
        return _limit_artifact(p.source, En, J, c.args.diagram, res.apex, res.cone, res.certificate, mode, "limit-lift")
    E = c.bicategory()
    J = c.functor("diagram")
    if J.target is not E:
        raise PreconditionError("diagram does not land in the bicategory")
    if what == "find":
        found = find_limit(E, J, mode)
        if found is None:
            return _result(False, "limit-find", None, None, {"no_limit": J.name})
        L, cone, cert = found
        return _limit_artifact(E, c.args.bicategory, J, c.args.diagram, L, cone, cert, mode, "limit-find")
    cone = c.transformation("cone")
    if cone.G is not J:
        raise PreconditionError("cone does not end at the diagram")
    apexes = set(cone.F.ob.values())
    if c.args.object is not None:
        L = c.cell(set(E.obs), "object")
    elif len(apexes) == 1:
        L = apexes.pop()
    else:
        raise PreconditionError("--object is required when the shape is empty")
    ok, cert = is_limit(E, J, L, cone, mode)
    if not ok:
        return _result(False, "limit-check", None, None, cert.counterexample)
    recorded = (c.doc.certificate or {}).get("witness")
    if recorded and recorded.get("apex") == encode_id(L):
        fresh = to_plain({"comparisons": {x: F.ob for x, F in cert.comparisons.items()}, "witnesses": cert.witnesses})
        if fresh["comparisons"] != recorded.get("comparisons") or fresh["witnesses"] != recorded.get("witnesses"):
            return _result(False, "limit-check", None, None, {"certificate": "recorded witnesses differ from recomputed ones"})
    argv = ["limit", "check", "--bicategory", c.args.bicategory, "--diagram", c.args.diagram, "--cone", c.args.cone]
    argv += ["--object", encode_id(L), "--mode", mode]
    b = DocumentBuilder()
    b.add(E, name=c.args.bicategory)
    b.add(J, name=c.args.diagram, as_diagram=c.args.diagram in c.doc.diagrams)
    b.add(cone, name=c.args.cone)
    return _result(True, "limit-check", b, argv, {"apex": L}, f"limit-check: {mode} limit at {encode_id(L)}")


def cmd_reindex(c: _Ctx) -> CommandResult:
    """Reindex a diagram lying strictly over the target of ``--cell`` along it."""
    p = c.functor()
    B = p.target
    f = c.cell(B.one_cells)
    F0 = c.functor("diagram")
    Fib = fiber(p, B.tgt1(f))
    F0fib = to_fiber_functor(Fib, F0)
    F0, rho = fiber_diagram_pair(Fib, F0fib)
    cl = c.cleavage(p)
    Fb, tb = reindex_diagram(p, cl, F0, rho, f)
    rep = CoherenceReport()
    if set(compose_functors(Fb, p).ob.values()) - {B.src1(f)}:
        rep.add("reindexed-fiber", Fb.name)
    to_fiber_functor(fiber(p, B.src1(f)), Fb)
    v = is_cartesian_transformation(p, tb, mode="pseudo" if is_pseudonatural(tb) else "oplax")
    if not v.holds:
        rep.add("cartesian", to_plain(v.counterexample))
    b = DocumentBuilder()
    pn = b.add(p, name=c.args.functor)
    b.add(Fb, name="reindexed")
    tn = b.add(tb, name="tau_bar")
    argv = ["check", "cartesian-transformation", "--functor", pn, "--transformation", tn]
    return _result(rep.ok, "reindex", b, argv, rep)


COMMANDS = {
    "validate": cmd_validate,
    "check": cmd_check,
    "comma": cmd_comma,
    "arrow": cmd_arrow,
    "section": cmd_section,
    "lift": cmd_lift,
    "limit": cmd_limit,
    "reindex": cmd_reindex,
}


def run_command(argv: list[str]) -> CommandResult:
    """Run one command; never raises for bad input, the exit code says what happened."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return CommandResult(EXIT_OK, None, "") if e.code == 0 else CommandResult(EXIT_INPUT, None, "usage error")
    try:
        res = COMMANDS[args.command](_Ctx(args))
    except SizeLimitError as e:
        return CommandResult(EXIT_SIZE, None, f"size limit: {e}")
    except HypothesisError as e:
        res = _result(False, args.command, None, None, {"hypothesis": e.hypothesis, "detail": e.detail}, str(e))
    except InconsistencyError as e:
        res = _result(False, args.command, None, None, {"inconsistency": str(e)}, f"inconsistent: {e}")
    except ParseError as e:
        return CommandResult(EXIT_INPUT, None, f"parse error: {e}")
    except (StructuralError, PreconditionError, BifibError, ValueError, KeyError, OSError) as e:
        return CommandResult(EXIT_INPUT, None, f"invalid input: {e}")
    if args.emit and res.artifact is not None:
        Path(args.emit).write_text(json.dumps(res.artifact, indent=1, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return res


def main(argv: list[str] | None = None) -> int:
    res = run_command(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if res.code in (EXIT_OK, EXIT_FAIL) else sys.stderr
    if res.message:
        print(res.message, file=stream)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
