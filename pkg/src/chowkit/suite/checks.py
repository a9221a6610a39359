"""Execution of scenario checks."""

from __future__ import annotations

import fnmatch
import time
from dataclasses import dataclass

from .. import __version__
from ..chowcalc import (
    ChowPresentation,
    PatchingProblem,
    class_consistency,
    nonzerodivisor,
    patching_relations,
    validate_ringmap,
)
from ..groebner import IdealPresentation, ideal_contains
from ..polyring import PolyError, Polynomial
from .scenario import CheckSpec, Scenario

PASS = "PASS"
FAIL = "FAIL"
REPORT = "REPORT"


@dataclass(frozen=True)
class CheckResult:
    name: str
    kind: str
    status: str
    witness: str | None = None
    ms: float = 0.0


@dataclass(frozen=True)
class Report:
    scenario: str
    version: str
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> int:
        return sum(r.status == PASS for r in self.results)

    @property
    def failed(self) -> int:
        return sum(r.status == FAIL for r in self.results)

    @property
    def reports(self) -> int:
        return sum(r.status == REPORT for r in self.results)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _first_outside(elements, pres: ChowPresentation):
    for g in elements:
        r = pres.reduce(g)
        if r:
            return g, r
    return None


def _ideal_diff(A: ChowPresentation, gens_a, B: ChowPresentation, gens_b) -> str | None:
    miss = _first_outside(gens_b, A)
    if miss:
        return f"{miss[0]} not in {A.name}; normal form {miss[1]}"
    miss = _first_outside(gens_a, B)
    if miss:
        return f"{miss[0]} not in {B.name}; normal form {miss[1]}"
    return None


def _apply(value: Polynomial, maps) -> Polynomial:
    for m in maps:
        value = m(value)
    return value


def _run_ideal_equal(a):
    R = a["ring"]
    if "other" in a:
        other = a["other"]
    else:
        other = ChowPresentation("expected", R.ring, IdealPresentation(R.ring, a["generators"]))
    diff = _ideal_diff(R, R.relations.generators, other, other.relations.generators)
    return (FAIL, diff) if diff else (PASS, None)


def _run_member(a, want: bool):
    R = a["ring"]
    for g in a["elements"]:
        r = R.reduce(g)
        if (not r) != want:
            if want:
                return FAIL, f"{g} not in {R.name}; normal form {r}"
            return FAIL, f"{g} lies in {R.name}"
    return PASS, None


def _run_patching(a):
    op, cl = a["open"], a["closed"]
    problem = PatchingProblem(op.source, op, cl, a["top_chern"])
    derived = IdealPresentation(op.source, patching_relations(problem).generators)
    got = ChowPresentation("derived", op.source, derived)
    want = ChowPresentation("expected", op.source, IdealPresentation(op.source, a["expected"]))
    diff = _ideal_diff(got, got.relations.generators, want, want.relations.generators)
    return (FAIL, diff) if diff else (PASS, None)


def _run_map_valid(a):
    v = validate_ringmap(a["map"], a["relations"].relations)
    if v.valid == a["expect"]:
        return PASS, None
    if v.valid:
        return FAIL, f"map {a['map'].name} unexpectedly valid"
    return FAIL, f"{v.relation} maps to {v.residue} modulo {a['map'].target.name}"


def _run_nzd(a):
    got = nonzerodivisor(a["ring"], a["element"])
    if got == a["expect"]:
        return PASS, None
    what = "a non-zero-divisor" if got else "a zero divisor"
    return FAIL, f"{a['element']} is {what} in {a['ring'].name}"


def _run_pushforward(a):
    op = a["operator"]
    v = op.validate()
    if not v:
        return FAIL, f"operator invalid: {v.problem}" + (f"; residue {v.witness}" if v.witness is not None else "")
    got = op.apply(a["input"])
    down = op.ambient if hasattr(op, "ambient") else op.down
    residue = down.reduce(got - a["expected"])
    if residue:
        return FAIL, f"push({a['input']}) = {got}; differs from expected by {residue}"
    return PASS, None


def _run_class_consistency(a):
    rep = class_consistency(a["class"], a["restrictions"])
    bad = rep.first_failure()
    if bad:
        return FAIL, f"restriction {bad.map_name} differs from {bad.expected} by {bad.residue}"
    return PASS, None


def _run_graded(a):
    R = a["ring"]
    if "other" in a:
        for d in a["degrees"]:
            x, y = R.graded_component(d), a["other"].graded_component(d)
            if x != y:
                return FAIL, f"degree {d}: {R.name} has {x}, {a['other'].name} has {y}"
        return PASS, None
    for d, free, tors in a["components"]:
        got = R.graded_component(d)
        if got.free_rank != free or got.torsion != tuple(sorted(tors)):
            return FAIL, f"degree {d}: got {got}"
    return PASS, None


def _run_identity(a):
    R = a["ring"]
    lhs = _apply(a["lhs"], a["lhs_maps"])
    rhs = _apply(a["rhs"], a["rhs_maps"])
    diff = lhs - rhs
    if a["modulo"]:
        diff = R.reduce(diff)
    if diff:
        return FAIL, f"lhs - rhs = {diff}"
    return PASS, None


def _run_containment(a):
    R = a["ring"]
    lines = []
    if "other" in a:
        O = a["other"]
        for src, dst in ((R, O), (O, R)):
            missing = [(g, dst.reduce(g)) for g in src.relations.generators]
            missing = [(g, r) for g, r in missing if r]
            if missing:
                lines += [f"{g} not in {dst.name} (normal form {r})" for g, r in missing]
            else:
                lines.append(f"{src.name} contained in {dst.name}")
        for g in a["external"]:
            where = [P.name for P in (R, O) if not P.reduce(g)]
            lines.append(f"externally sourced {g}: in {', '.join(where) if where else 'neither'}")
        return REPORT, "; ".join(lines)
    lhs = _apply(a["lhs"], a["lhs_maps"])
    for label, cand in a["candidates"].items():
        diff = lhs - cand
        if a["modulo"]:
            diff = R.reduce(diff)
        lines.append(f"{label}: match" if not diff else f"{label}: residue {diff}")
    return REPORT, "; ".join(lines)


_RUNNERS = {
    "IDEAL_EQUAL": _run_ideal_equal,
    "MEMBER": lambda a: _run_member(a, True),
    "NOT_MEMBER": lambda a: _run_member(a, False),
    "PATCHING_DERIVE": _run_patching,
    "MAP_VALID": _run_map_valid,
    "NZD": _run_nzd,
    "PUSHFORWARD_EQ": _run_pushforward,
    "CLASS_CONSISTENCY": _run_class_consistency,
    "GRADED_COMPONENT": _run_graded,
    "IDENTITY_EQ": _run_identity,
    "CONTAINMENT_REPORT": _run_containment,
}


def run_check(check: CheckSpec) -> CheckResult:
    start = time.perf_counter()
    try:
        status, witness = _RUNNERS[check.kind](check.args)
    except PolyError as e:
        status, witness = FAIL, f"{e.code}: {e}"
    ms = (time.perf_counter() - start) * 1000.0
    return CheckResult(check.name, check.kind, status, witness, round(ms, 3))


def select_checks(scenario: Scenario, pattern: str | None = None) -> list[CheckSpec]:
    if not pattern:
        return list(scenario.checks)
    return [c for c in scenario.checks if fnmatch.fnmatchcase(c.name, pattern)]


def run_checks(scenario: Scenario, pattern: str | None = None) -> Report:
    """Run the selected checks in declaration order."""
    results = tuple(run_check(c) for c in select_checks(scenario, pattern))
    return Report(scenario.id, __version__, results)
