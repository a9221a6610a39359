import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import graded_piece_oracle, lattice_member, random_combination, random_homogeneous, random_instance

from chowkit.groebner import (
    BudgetExceeded,
    IdealPresentation,
    InhomogeneousIdeal,
    eliminate,
    graded_component,
    groebner_basis,
    ideal_contains,
    ideal_equal,
    ideal_quotient_element,
    intersect,
    kernel_of_ringmap,
    minimize_generators,
    normal_form,
)
from chowkit.polyring import GradedRing, RingMismatch, elimination_order

C11 = GradedRing.parse("Z[l1:1,mu1:1]")
T2 = GradedRing.parse("Z[xi1:1,l1:1,l2:2]")
M21 = GradedRing.parse("Z[l1:1,l2:2,psi1:1,th1:1,th2:2]")
FINAL = [
    "l2-th2-psi1*(l1-psi1)",
    "24*l1^2-48*l2",
    "th1*(l1+th1)",
    "20*l1*l2-4*l2*th1",
    "2*psi1*th2",
    "th2*(th1+l1-psi1)",
    "2*psi1*(l1+th1)*(7*psi1-l1)-24*psi1^3",
]


def ideal(ring, *texts):
    return IdealPresentation.parse(ring, texts)


@pytest.fixture(scope="module")
def final():
    return IdealPresentation.parse(M21, FINAL)


# -- bases ---------------------------------------------------------------------


def test_principal_ideal_is_its_own_basis():
    G = groebner_basis(ideal(C11, "mu1*(l1+mu1)"))
    assert G.strength == "STRONG_Z"
    assert list(G.basis) == [C11("mu1^2+l1*mu1")]


def test_torsion_ideal_basis():
    I = ideal(T2, "2*xi1", "xi1^2-l1*xi1")
    G = groebner_basis(I)
    assert not normal_form(T2("xi1^3-l1^2*xi1"), G)
    for g in I.generators:
        assert not normal_form(g, G)


def test_gcd_closure():
    ring = GradedRing.parse("Z[x:1]")
    G = groebner_basis(ideal(ring, "2*x", "3*x"))
    assert ring("x") in G.basis


def test_rational_basis_is_reduced():
    ring = GradedRing.parse("Q[x:1,y:1]")
    G = groebner_basis(ideal(ring, "2*x^2+4*x*y", "3*x*y-6*y^2"))
    assert G.strength == "REDUCED_Q"
    for g in G.basis:
        assert g.leading_term()[1] == 1
    lead = [g.leading_term()[0] for g in G.basis]
    for g in G.basis:
        for e in g.terms:
            for m in lead:
                if m != g.leading_term()[0]:
                    assert not all(a >= b for a, b in zip(e, m))


def test_basis_is_deterministic():
    I = IdealPresentation.parse(M21, FINAL)
    J = IdealPresentation.parse(M21, list(reversed(FINAL)))
    assert [str(g) for g in groebner_basis(I).basis] == [str(g) for g in groebner_basis(I).basis]
    assert ideal_equal(I, J)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        groebner_basis(IdealPresentation.parse(M21, FINAL), budget=5)


# -- normal forms and membership ------------------------------------------------


def test_normal_form_examples(final):
    G = groebner_basis(ideal(T2, "2*xi1", "xi1^2-l1*xi1"))
    assert not normal_form(T2("-12*l1^2*xi1"), G)
    assert not normal_form(T2.zero(), G)
    assert not normal_form(M21("24*(psi1^2*th1-l1*th2)"), final.basis)


def test_normal_form_ring_mismatch():
    G = groebner_basis(ideal(C11, "mu1*(l1+mu1)"))
    with pytest.raises(RingMismatch):
        normal_form(T2("xi1"), G)


def test_membership_examples(final):
    assert ideal_contains(final, M21("psi1*th1*th2"))
    assert not ideal_contains(ideal(C11, "mu1*(l1+mu1)"), C11("l1"))
    assert ideal_contains(final, M21("20*(l1+th1)*l1*l2"))


@pytest.mark.parametrize("text", ["psi1*th1*th2", "20*(l1+th1)*l1*l2", "24*(psi1^2*th1-l1*th2)", "96*th2^2"])
def test_membership_agrees_with_lattice_oracle(final, text):
    f = M21(text)
    assert ideal_contains(final, f) == lattice_member(M21, final.generators, f)


def test_membership_negative_agrees_with_lattice_oracle(final):
    for text in ["th2^2", "48*th2^2", "psi1^4", "l1^2*th2"]:
        f = M21(text)
        assert ideal_contains(final, f) == lattice_member(M21, final.generators, f)


def test_ideal_equal_examples():
    assert ideal_equal(
        ideal(C11, "mu1*(l1+mu1)", "24*l1^2", "24*l1^2*mu1"),
        ideal(C11, "mu1*(l1+mu1)", "24*l1^2"),
    )
    I = ideal(T2, "2*xi1", "xi1^2-l1*xi1")
    assert ideal_equal(I, I)
    assert not ideal_equal(ideal(T2, "2*xi1"), ideal(T2, "xi1"))


# -- constructions ----------------------------------------------------------------


def test_eliminate_examples():
    ring = GradedRing.parse("Z[t:1,l1:1,mu1:1]")
    I = ideal(ring, "t*mu1", "(1-t)*(mu1+l1)")
    out = eliminate(I, ["l1", "mu1"])
    assert ideal_equal(out, ideal(C11, "mu1*(mu1+l1)"))
    xr = GradedRing.parse("Z[x:1,l1:1]")
    assert not eliminate(ideal(xr, "x-l1"), ["l1"]).generators
    assert ideal_equal(eliminate(ideal(xr, "x-l1", "x"), ["l1"]), ideal(xr.subring(["l1"]), "l1"))


def test_intersect_examples():
    assert ideal_equal(intersect(ideal(C11, "mu1"), ideal(C11, "mu1+l1")), ideal(C11, "mu1*(mu1+l1)"))
    I = ideal(T2, "2*xi1", "xi1^2-l1*xi1")
    assert ideal_equal(intersect(I, I), I)
    ring = GradedRing.parse("Z[x:1]")
    assert ideal_equal(intersect(ideal(ring, "2"), ideal(ring, "3")), ideal(ring, "6"))


def test_quotient_examples():
    I = ideal(T2, "2*xi1", "xi1^2-l1*xi1")
    assert ideal_equal(ideal_quotient_element(I, T2("l2")), I)
    assert ideal_equal(ideal_quotient_element(I, T2.one()), I)
    q = ideal_quotient_element(ideal(T2, "2*xi1"), T2("xi1"))
    assert ideal_equal(q, ideal(T2, "2"))


def test_kernel_examples():
    M11 = GradedRing.parse("Z[l1:1]")
    k = kernel_of_ringmap(C11, M11, IdealPresentation(M11, ()), [M11("l1"), M11("-l1")])
    assert ideal_equal(k, ideal(C11, "mu1+l1"))
    k = kernel_of_ringmap(C11, C11, IdealPresentation(C11, ()), C11.gens())
    assert not k.generators


def test_kernel_into_torsion_ring():
    src = GradedRing.parse("Z[psi1:1,th1:1,l1:1,l2:2]")
    rels = ideal(T2, "2*xi1", "xi1^2-l1*xi1")
    images = [T2("xi1"), T2("xi1-l1"), T2("l1"), T2("l2")]
    k = kernel_of_ringmap(src, T2, rels, images)
    from chowkit.polyring import substitute

    for g in k.generators:
        assert ideal_contains(rels, substitute(g, images, T2))
    for known in ["2*psi1", "psi1-th1-l1", "psi1*(psi1-l1)"]:
        assert ideal_contains(k, src(known))


def test_minimize_generators():
    I = ideal(C11, "mu1*(l1+mu1)", "24*l1^2", "24*l1^2*mu1")
    small = minimize_generators(I)
    assert len(small) == 2
    assert ideal_equal(small, I)


# -- graded pieces -------------------------------------------------------------------


def test_graded_component_examples():
    I = ideal(C11, "mu1*(l1+mu1)", "24*l1^2")
    assert str(graded_component(C11, I, 0)) == "Z"
    piece = graded_component(C11, I, 1)
    assert (piece.free_rank, piece.torsion) == (2, ())
    piece = graded_component(C11, I, 2)
    assert (piece.free_rank, piece.torsion) == (1, (24,))
    assert str(piece) == "Z + Z/24"


def test_graded_component_rejects_inhomogeneous():
    with pytest.raises(InhomogeneousIdeal):
        graded_component(C11, ideal(C11, "l1+l1^2"), 2)


@pytest.mark.parametrize("d", range(6))
def test_graded_component_matches_smith_oracle(final, d):
    piece = graded_component(M21, final, d)
    assert (piece.free_rank, list(piece.torsion)) == graded_piece_oracle(M21, final.generators, d)


def test_graded_component_invariant_under_equal_presentation(final):
    G = groebner_basis(final)
    other = IdealPresentation(M21, G.basis)
    assert ideal_equal(other, final)
    for d in range(5):
        assert graded_component(M21, other, d) == graded_component(M21, final, d)


def test_graded_component_over_rationals():
    Q = GradedRing.parse("Q[l1:1,mu1:1]")
    piece = graded_component(Q, IdealPresentation.parse(Q, ["mu1*(l1+mu1)", "24*l1^2"]), 2)
    assert (piece.free_rank, piece.torsion) == (1, ())


# -- properties on random small instances ------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_strong_basis_soundness(seed):
    rng = random.Random(seed)
    ring, gens = random_instance(rng)
    I = IdealPresentation(ring, tuple(gens))
    G = groebner_basis(I)
    for g in gens:
        assert not normal_form(g, G)
    for _ in range(3):
        f = ring.zero()
        for g in gens:
            h = ring.zero()
            for d in range(3):
                h = h + random_homogeneous(rng, ring, d, 2)
            f = f + h * g
        assert not normal_form(f, G)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_membership_agrees_with_lattice_oracle_random(seed):
    rng = random.Random(seed)
    ring, gens = random_instance(rng)
    I = IdealPresentation(ring, tuple(gens))
    for d in (2, 3):
        for f in (random_combination(rng, ring, gens, d), random_homogeneous(rng, ring, d)):
            assert ideal_contains(I, f) == lattice_member(ring, gens, f)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_ideal_equal_under_recombination(seed):
    rng = random.Random(seed)
    ring, gens = random_instance(rng)
    I = IdealPresentation(ring, tuple(gens))
    shuffled = list(gens)
    rng.shuffle(shuffled)
    assert ideal_equal(I, IdealPresentation(ring, tuple(shuffled)))
    # unimodular recombination: add a multiple of one generator to another of no smaller degree
    if len(gens) >= 2:
        a, b = sorted(gens[:2], key=lambda g: g.degree())
        k = rng.choice([-2, -1, 1, 2])
        m = random_homogeneous(rng, ring, b.degree() - a.degree(), 2)
        mixed = [a, b + m * a.scale(k)] + list(gens[2:])
        assert ideal_equal(I, IdealPresentation(ring, tuple(mixed)))
    assert ideal_equal(I, I)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_intersection_properties(seed):
    rng = random.Random(seed)
    ring, g1 = random_instance(rng)
    g2 = [random_homogeneous(rng, ring, rng.randint(1, 2)) for _ in range(2)]
    g2 = [g for g in g2 if g] or [ring.var(ring.names[0])]
    I, J = IdealPresentation(ring, tuple(g1)), IdealPresentation(ring, tuple(g2))
    K = intersect(I, J)
    for g in K.generators:
        assert ideal_contains(I, g) and ideal_contains(J, g)
    for a in g1:
        for b in g2:
            assert ideal_contains(K, a * b)


def test_elimination_order_basis_is_strong():
    ring = GradedRing.parse("Z[t:1,x:1,y:1]")
    I = ideal(ring, "t*x-2*y", "t^2-x", "3*x*y")
    G = groebner_basis(I, elimination_order(1))
    for g in I.generators:
        assert not normal_form(g, G)
