"""The ten acceptance criteria, each reported as one PASS/FAIL line.

Criterion 8 cannot be met as stated: the class c''_* rho^* T does not lie in
the final ideal (it reduces to 96*th2^2), and excising it changes the graded
pieces in degrees 4 and 5. The full claim is an xfail(strict) test, so the
line prints FAIL while its attainable parts are checked separately.
"""

import random
import time
from math import gcd
from itertools import combinations

import pytest
from conftest import ACCEPTANCE_LINES
from oracles import graded_piece_oracle, lattice_member, random_combination, random_homogeneous, random_instance

from chowkit.chowcalc import (
    PatchingProblem,
    class_consistency,
    excise,
    nonzerodivisor,
    patching_relations,
    pushforward_apply,
    validate_ringmap,
)
from chowkit.groebner import IdealPresentation, groebner_basis, ideal_contains, ideal_equal, normal_form
from chowkit.suite import load_scenario, run_checks
from chowkit.suite.checks import PASS, REPORT
from chowkit.suite.cli import corpus_dir

FINAL = [
    "l2-th2-psi1*(l1-psi1)",
    "24*l1^2-48*l2",
    "th1*(l1+th1)",
    "20*l1*l2-4*l2*th1",
    "2*psi1*th2",
    "th2*(th1+l1-psi1)",
    "2*psi1*(l1+th1)*(7*psi1-l1)-24*psi1^3",
]
C2_SEVEN = [
    "l2-th2-psi1*(l1-psi1)",
    "(l1+th1)*(24*l1^2-48*l2)",
    "20*(l1+th1)*l1*l2",
    "th1*(l1+th1)",
    "2*psi1*th2",
    "th2*(th1+l1-psi1)",
    "psi1*th1*th2",
]
C2MT2_FOUR = ["l2-psi1*(l1-psi1)", "(l1+th1)*(24*l1^2-48*l2)", "20*(l1+th1)*l1*l2", "th1*(l1+th1)"]
CUSP = "2*psi1*(l1+th1)*(7*psi1-l1)-24*psi1^3"
BRIDGE = "24*(psi1^2*th1-l1*th2)"
RHO_T = "24*(psi1^2*(l1-psi1)*th1+2*l2*th2)"


@pytest.fixture(scope="module")
def m12():
    return load_scenario(corpus_dir() / "m12.scn")


@pytest.fixture(scope="module")
def m21():
    return load_scenario(corpus_dir() / "m21.scn")


@pytest.fixture(scope="module")
def m21_results(m21):
    return {r.name: r for r in run_checks(m21).results}


def record(n, ok, detail):
    ACCEPTANCE_LINES[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[n])


def patch(sc, open_map, closed_map, top):
    o, c = sc.maps[open_map], sc.maps[closed_map]
    return patching_relations(PatchingProblem(o.source, o, c, c.target(top)))


# -- 1 ------------------------------------------------------------------------------


def test_criterion_01_patching_genus_one(m12):
    t = time.perf_counter()
    out = patch(m12, "j", "p", "-l1")
    ok = ideal_equal(out, IdealPresentation.parse(out.ring, ["mu1*(l1+mu1)"]))
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 1.0
    record(1, ok, f"patched relations of the universal curve over M11 = (mu1*(l1+mu1)) in {elapsed * 1000:.0f} ms")
    assert ok


# -- 2 ------------------------------------------------------------------------------


def test_criterion_02_patching_curve_minus_theta2(m21):
    out = patch(m21, "open1", "closed1", "-l1")
    ok = ideal_equal(out, IdealPresentation.parse(out.ring, C2MT2_FOUR))
    record(2, ok, "patched relations of the curve minus theta2 equal the four stated generators")
    assert ok


# -- 3 ------------------------------------------------------------------------------


def test_criterion_03_patching_whole_curve(m21):
    out = patch(m21, "open2", "istar", "l2")
    ok_ideal = ideal_equal(out, IdealPresentation.parse(out.ring, C2_SEVEN))
    C2 = m21.rings["C2"]
    pushed = pushforward_apply(m21.operators["push_T2"], m21.rings["T2"]("xi1"))
    ok_eta = not C2.reduce(pushed - C2("psi1*th2"))
    ok = ok_ideal and ok_eta
    record(3, ok, f"seven stated generators reproduced: {ok_ideal}; push(xi1) = psi1*th2: {ok_eta}")
    assert ok


# -- 4 ------------------------------------------------------------------------------


def test_criterion_04_nonzerodivisors(m21):
    T1mT2, T2 = m21.rings["T1mT2"], m21.rings["T2"]
    a = nonzerodivisor(T1mT2, T1mT2("-l1"))
    b = nonzerodivisor(T2, T2("l2"))
    c = nonzerodivisor(T2, T2("xi1"))
    ok = a and b and not c
    record(4, ok, f"-l1 on theta1 minus theta2: {a}; l2 on theta2: {b}; xi1 on theta2: {c} (expected False)")
    assert ok


# -- 5 ------------------------------------------------------------------------------


def determinantal_invariants(M):
    """Invariant factors from gcds of k x k minors (independent of any elimination routine)."""
    rows, cols = len(M), len(M[0])

    def det(A):
        if len(A) == 1:
            return A[0][0]
        return sum((-1) ** j * A[0][j] * det([r[:j] + r[j + 1:] for r in A[1:]]) for j in range(len(A)))

    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, det([[M[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def test_criterion_05_genus_one_two_points(m12):
    M12bar = m12.rings["M12bar"]
    stated = IdealPresentation.parse(M12bar.ring, ["mu1*(l1+mu1)", "24*l1^2"])
    C11 = m12.rings["C11"]
    excised = excise(C11, [C11("24*l1^2"), C11("24*l1^2*mu1")], "excised")
    ok_eq = ideal_equal(excised.relations, stated) and ideal_equal(M12bar.relations, stated)
    d1 = M12bar.graded_component(1)
    d2 = M12bar.graded_component(2)
    # degree 2: rows mu1*(l1+mu1) and 24*l1^2 in the basis l1^2, l1*mu1, mu1^2
    matrix = [[0, 1, 1], [24, 0, 0]]
    independent = determinantal_invariants(matrix)
    ok_d1 = (d1.free_rank, d1.torsion) == (2, ())
    ok_d2 = (d2.free_rank, d2.torsion) == (1, (24,)) and independent == [1, 24]
    ok = ok_eq and ok_d1 and ok_d2
    record(5, ok, f"excision equals the stated ideal: {ok_eq}; d=1 {d1}; d=2 {d2}; minors give {independent}")
    assert ok


# -- 6 ------------------------------------------------------------------------------


def test_criterion_06_class_consistency(m21):
    C2 = m21.rings["C2"]
    maps = m21.maps
    cusp = class_consistency(
        C2(CUSP),
        [
            (maps["r_open1"], maps["r_open1"].target("-2*psi1*(l1-3*psi1)*(l1-4*psi1)")),
            (maps["open2"], maps["open2"].target(CUSP)),
            (maps["istar"], maps["istar"].target("0")),
        ],
    )
    bridge = class_consistency(
        C2(BRIDGE),
        [
            (maps["open2"], maps["open2"].target("24*th1*psi1^2")),
            (maps["istar"], maps["istar"].target("-24*l1*l2")),
        ],
    )
    rho = class_consistency(
        C2(RHO_T),
        [
            (maps["open2"], maps["open2"].target("24*th1*psi1^2*(l1-psi1)")),
            (maps["istar"], maps["istar"].target("48*l2^2")),
        ],
    )
    ok = cusp.ok and bridge.ok and rho.ok
    record(6, ok, f"cusp class 3/3, bridge class 2/2, rho class 2/2 restrictions: {cusp.ok}, {bridge.ok}, {rho.ok}")
    assert ok


# -- 7 ------------------------------------------------------------------------------


def test_criterion_07_transfer_outputs(m21):
    op = m21.operators["transfer"]
    T2, BT2 = m21.rings["T2"], m21.rings["BT2"]
    valid = op.validate()
    a = pushforward_apply(op, BT2("24*U^2*T"))
    b = pushforward_apply(op, BT2("24*(U*T)^2"))
    ok_a = not T2.reduce(a - T2("-24*l2*l1"))
    ok_b = not T2.reduce(b - T2("48*l2^2"))
    ok = bool(valid) and ok_a and ok_b
    record(7, ok, f"push(24*U^2*T) = {a}; push(24*(U*T)^2) = {b}")
    assert ok


# -- 8 ------------------------------------------------------------------------------


def criterion_08(m21):
    final = m21.rings["M21bar"]
    C2 = m21.rings["C2"]
    excised = m21.rings["M21exc"]
    forward = {t: final.contains(final(t)) for t in C2_SEVEN + [CUSP, BRIDGE, RHO_T]}
    converse = {t: excised.contains(excised(t)) for t in FINAL}
    graded = {d: (final.graded_component(d), excised.graded_component(d)) for d in range(6)}
    agree = {d: a == b for d, (a, b) in graded.items()}
    rho_nf = final.reduce(C2(RHO_T).change_ring(final.ring))
    return forward, converse, graded, agree, rho_nf


def test_criterion_08_final_redundancy(m21, m21_results):
    forward, converse, graded, agree, rho_nf = criterion_08(m21)
    ok = all(forward.values()) and all(converse.values()) and all(agree.values())
    misses = [t for t, v in forward.items() if not v]
    bad = [f"d={d}: {graded[d][0]} vs {graded[d][1]}" for d, v in agree.items() if not v]
    detail = (
        f"forward {sum(forward.values())}/{len(forward)}, converse {sum(converse.values())}/{len(converse)}, "
        f"graded agree for d in {[d for d, v in agree.items() if v]}"
    )
    if misses:
        detail += f"; c''_* rho^* T not in final ideal, normal form {rho_nf}; disagreement {'; '.join(bad)}"
    record(8, ok, detail)
    # the discrepancy must surface as a report, never as a silent pass
    assert m21_results["D11.rhoT_report"].status == REPORT
    assert m21_results["D11.containment"].status == REPORT
    if not ok:
        pytest.xfail("the stated class c''_* rho^* T is not in the final ideal; see module docstring")


def test_criterion_08_attainable_parts(m21):
    forward, converse, graded, agree, rho_nf = criterion_08(m21)
    assert all(v for t, v in forward.items() if t != RHO_T)
    assert all(converse.values())
    assert all(agree[d] for d in range(4))
    assert rho_nf == m21.rings["M21bar"]("96*th2^2")
    # with the residue added, the two quotients agree through degree 5
    residue = m21.rings["M21bar_res"]
    for d in range(6):
        assert residue.graded_component(d) == graded[d][1]


def test_criterion_08_residue_confirmed_by_lattice_oracle(m21):
    R = m21.rings["M21bar"].ring
    gens = [R(t) for t in FINAL]
    assert not lattice_member(R, gens, R(RHO_T))
    assert lattice_member(R, gens, R(RHO_T) - R("96*th2^2"))
    for d in range(6):
        piece = m21.rings["M21bar"].graded_component(d)
        assert (piece.free_rank, list(piece.torsion)) == graded_piece_oracle(R, gens, d)


@pytest.mark.xfail(strict=True, reason="c''_* rho^* T reduces to 96*th2^2 in the final ring, not to 0")
def test_criterion_08_stated_class_is_member(m21):
    final = m21.rings["M21bar"]
    assert final.contains(final(RHO_T))


# -- 9 ------------------------------------------------------------------------------


def test_criterion_09_faber_comparison(m21, m21_results):
    cor, faber = m21.rings["M21cor"], m21.rings["Faber"]
    maps = m21.maps
    well_defined = bool(validate_ringmap(maps["faber_to_cor"], faber.relations)) and bool(
        validate_ringmap(maps["cor_to_faber"], cor.relations)
    )
    exact = [m21_results[n].status == PASS for n in ("D13.gamma33", "D13.gamma34")]
    modulo = [m21_results[n].status == PASS for n in ("D13.gamma31", "D13.gamma32_modulo", "D13.gamma32_residue")]
    reported = m21_results["D13.gamma21_report"].status == REPORT and m21_results["D13.gamma32_report"].status == REPORT
    matched = m21_results["D13.gamma21"].status == PASS
    ok = well_defined and all(exact) and all(modulo) and reported and matched
    record(
        9,
        ok,
        f"maps well defined both ways: {well_defined}; 2*g33 and 2*g34 exact: {all(exact)}; "
        f"g31, g32 modulo the ideal with residue pinned: {all(modulo)}; g21 matches 10*alpha23: {matched}",
    )
    assert ok


# -- 10 -----------------------------------------------------------------------------


def test_criterion_10_random_engine_suite():
    rng = random.Random(20261016)
    t = time.perf_counter()
    n, agree, sound = 1200, 0, 0
    checks = 0
    for _ in range(n):
        ring, gens = random_instance(rng)
        I = IdealPresentation(ring, tuple(gens))
        G = groebner_basis(I)
        ok_inst = True
        for d in (2, 3):
            for f in (random_combination(rng, ring, gens, d), random_homogeneous(rng, ring, d)):
                checks += 1
                ok_inst &= ideal_contains(I, f) == lattice_member(ring, gens, f)
        agree += ok_inst
        combo = ring.zero()
        for g in gens:
            h = ring.zero()
            for d in range(3):
                h = h + random_homogeneous(rng, ring, d, 2)
            combo = combo + h * g
        sound += not normal_form(combo, G)
    elapsed = time.perf_counter() - t
    ok = agree == n and sound == n and elapsed < 30
    record(
        10,
        ok,
        f"{n} instances ({checks} membership queries): oracle agreement {agree}/{n}, "
        f"soundness {sound}/{n}, {elapsed:.1f} s",
    )
    assert ok
