"""Strong Groebner bases over Z, reduced bases over Q, and ideal operations.

The engine is a plain Buchberger completion. Over Z every pair produces an
S-polynomial and, when neither leading coefficient divides the other, a
GCD-polynomial; that is enough for the basis to be *strong* (every leading
term of the ideal, coefficient included, is divisible by a leading term of
the basis). Pairs are processed by smallest weighted degree of the lcm
(normal strategy), ties broken by creation order.

Internally a polynomial is a list of ``(key, exponents, coefficient)``
triples sorted by decreasing key, where ``key`` is the linear sort key of the
monomial order.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .polyring import (
    GREVLEX,
    INTEGERS,
    GradedRing,
    MonomialOrder,
    Polynomial,
    PolyError,
    RingMismatch,
    elimination_order,
    substitute,
)
from .smith import invariant_factors, rational_rank

__all__ = [
    "BudgetExceeded",
    "DivisionFailure",
    "InhomogeneousIdeal",
    "DEFAULT_BUDGET",
    "IdealPresentation",
    "GroebnerBasis",
    "groebner_basis",
    "normal_form",
    "ideal_contains",
    "ideal_equal",
    "eliminate",
    "intersect",
    "ideal_quotient_element",
    "kernel_of_ringmap",
    "graded_component",
    "GradedPiece",
    "divide_exact",
    "minimize_generators",
    "monomials_of_degree",
]

DEFAULT_BUDGET = 10**7


class BudgetExceeded(PolyError):
    code = "BUDGET_EXCEEDED"


class DivisionFailure(PolyError):
    code = "DIVISION_FAILURE"


class InhomogeneousIdeal(PolyError):
    code = "INHOMOGENEOUS_IDEAL"


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True, eq=False)
class IdealPresentation:
    ring: GradedRing
    generators: tuple[Polynomial, ...] = ()

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if g.ring != self.ring:
                raise RingMismatch(f"generator {g} lives in {g.ring}, not {self.ring}")
            if g:
                gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def parse(cls, ring: GradedRing, texts: Iterable[str]) -> "IdealPresentation":
        return cls(ring, tuple(ring(t) for t in texts))

    @property
    def homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    @cached_property
    def basis(self) -> "GroebnerBasis":
        # memo of the default-order basis; recomputation is harmless if raced
        return groebner_basis(self)

    def contains(self, f: Polynomial) -> bool:
        return ideal_contains(self, f)

    def reduce(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.basis)

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return f"IdealPresentation({self} in {self.ring})"


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    ideal: IdealPresentation
    order: MonomialOrder
    basis: tuple[Polynomial, ...]
    strength: str
    steps: int = 0
    _internal: list = field(default_factory=list, repr=False)

    @property
    def ring(self) -> GradedRing:
        return self.ideal.ring

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)

    def leading_terms(self):
        return [g.leading_term(self.order) for g in self.basis]


# ---------------------------------------------------------------------------
# internal polynomial representation


class _Ctx:
    """Coefficient arithmetic and monomial keys for one computation."""

    def __init__(self, ring: GradedRing, order: MonomialOrder, budget: int):
        self.ring = ring
        self.order = order
        self.over_z = ring.domain == INTEGERS
        self.key = order.key_function(ring.weights)
        self.budget = budget
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(f"more than {self.budget} reduction steps")

    def to_internal(self, p: Polynomial) -> list:
        key = self.key
        return sorted(((key(e), e, c) for e, c in p.terms.items()), reverse=True)

    def to_poly(self, f: list) -> Polynomial:
        return Polynomial._raw(self.ring, {e: c for _, e, c in f})


def _addk(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _sube(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _axpy(f: list, c, mkey, mexp, g: list) -> list:
    """Return ``f + c * x^m * g`` (both sorted by decreasing key)."""
    out = []
    i, n = 0, len(f)
    for k, e, d in g:
        k2 = _addk(k, mkey)
        while i < n and f[i][0] > k2:
            out.append(f[i])
            i += 1
        if i < n and f[i][0] == k2:
            v = f[i][2] + c * d
            if v:
                out.append((k2, f[i][1], v))
            i += 1
        else:
            out.append((k2, _addk(e, mexp), c * d))
    out.extend(f[i:])
    return out


def _scale(f: list, c) -> list:
    return [(k, e, c * d) for k, e, d in f]


def _divmod(ctx: _Ctx, c, d):
    """Return ``(q, r)`` with ``c = q*d + r``; over Z the remainder lies in [0, |d|)."""
    if ctx.over_z:
        if d < 0:
            q, r = divmod(c, -d)
            return -q, r
        return divmod(c, d)
    return Fraction(c) / d, 0


def _reduce(ctx: _Ctx, f: list, G: list, full: bool = True, skip: int | None = None) -> list:
    """Reduce ``f`` by the basis ``G`` (list of internal polys).

    Each term is reduced by the divisor of smallest absolute leading
    coefficient (Euclidean coefficient reduction over Z). With ``full`` the
    whole polynomial is reduced, otherwise only the leading term.
    """
    leads = [(g[0][1], g[0][2], idx) for idx, g in enumerate(G) if idx != skip]
    rest = []
    while f:
        k, e, c = f[0]
        best = None
        for le, lc, idx in leads:
            if _divides(le, e) and (best is None or abs(lc) < abs(best[1])):
                best = (le, lc, idx)
        reduced = False
        if best is not None:
            le, lc, idx = best
            q, r = _divmod(ctx, c, lc)
            if q:
                ctx.tick()
                m = _sube(e, le)
                f = _axpy(f, -q, ctx.key(m), m, G[idx])
                reduced = True
        if f and f[0][0] == k and (not reduced or f[0][2] != 0):
            # leading term is now irreducible
            if not full:
                return rest + f
            rest.append(f[0])
            f = f[1:]
    return rest


def _normalize_sign(ctx: _Ctx, f: list) -> list:
    if ctx.over_z:
        if f[0][2] < 0:
            return _scale(f, -1)
        return f
    lc = f[0][2]
    if lc != 1:
        inv = 1 / Fraction(lc)
        return [(k, e, c * inv) for k, e, c in f]
    return f


def _xgcd(a: int, b: int):
    """Return ``(g, s, t)`` with ``s*a + t*b = g = gcd(a, b) > 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _strongly_divides(ctx: _Ctx, f: list, g: list) -> bool:
    """Leading term of ``f`` divides that of ``g`` (coefficient included over Z)."""
    return _divides(f[0][1], g[0][1]) and (not ctx.over_z or g[0][2] % f[0][2] == 0)


def _buchberger(ctx: _Ctx, inputs: list[list]) -> list[list]:
    # G holds every element ever added; retired ones are set to None. An element
    # is retired once a newer one strongly divides its leading term; its
    # remainder is queued again, so the generated ideal never changes.
    G: list = []
    heap: list = []
    queue: list[list] = []
    counter = itertools.count()
    wdeg = ctx.ring.mdeg

    def active():
        return [g for g in G if g is not None]

    def add(h):
        h = _normalize_sign(ctx, h)
        n = len(G)
        he, hc = h[0][1], h[0][2]
        for i, g in enumerate(G):
            if g is None:
                continue
            if _strongly_divides(ctx, h, g):
                G[i] = None
                queue.append(g)
                continue
            ge, gc = g[0][1], g[0][2]
            lcm = _lcm(ge, he)
            d = wdeg(lcm)
            coprime_m = all(not (x and y) for x, y in zip(ge, he))
            if ctx.over_z:
                if gc % hc and hc % gc:
                    heapq.heappush(heap, (d, next(counter), "G", i, n))
                if not (coprime_m and gcd(gc, hc) == 1):
                    heapq.heappush(heap, (d, next(counter), "S", i, n))
            elif not coprime_m:
                heapq.heappush(heap, (d, next(counter), "S", i, n))
        G.append(h)

    def settle(f):
        queue.append(f)
        while queue:
            r = _reduce(ctx, queue.pop(), active())
            if r:
                add(r)

    for f in inputs:
        settle(f)

    while heap:
        _, _, kind, i, j = heapq.heappop(heap)
        f, g = G[i], G[j]
        if f is None or g is None:
            continue
        fe, fc = f[0][1], f[0][2]
        ge, gc = g[0][1], g[0][2]
        lcm = _lcm(fe, ge)
        mf, mg = _sube(lcm, fe), _sube(lcm, ge)
        if kind == "S":
            if ctx.over_z:
                L = fc * gc // gcd(fc, gc)
                a, b = L // fc, L // gc
            else:
                a, b = 1 / Fraction(fc), 1 / Fraction(gc)
            s = _axpy(_scale(_mul_mono(ctx, f, mf), a), -b, ctx.key(mg), mg, g)
        else:
            _, sa, sb = _xgcd(fc, gc)
            s = _axpy(_scale(_mul_mono(ctx, f, mf), sa), sb, ctx.key(mg), mg, g)
        ctx.tick()
        settle(s)
    return active()


def _mul_mono(ctx: _Ctx, f: list, m) -> list:
    if not any(m):
        return f
    mk = ctx.key(m)
    return [(_addk(k, mk), _addk(e, m), c) for k, e, c in f]


def _interreduce(ctx: _Ctx, G: list[list]) -> list[list]:
    # drop elements whose leading term is divisible by another's
    keep = []
    for i, g in enumerate(G):
        ge, gc = g[0][1], g[0][2]
        redundant = False
        for j, h in enumerate(G):
            if i == j:
                continue
            he, hc = h[0][1], h[0][2]
            if _divides(he, ge) and (not ctx.over_z or gc % hc == 0):
                same = he == ge and (not ctx.over_z or abs(hc) == abs(gc))
                if not same or j < i:
                    redundant = True
                    break
        if not redundant:
            keep.append(g)
    # tail reduction against the other elements
    out = []
    for i, g in enumerate(keep):
        others = [h for j, h in enumerate(keep) if j != i]
        tail = _reduce(ctx, g[1:], others)
        out.append(_normalize_sign(ctx, [g[0]] + tail))
    out.sort(key=lambda g: g[0][0])
    return out


def groebner_basis(
    ideal: IdealPresentation,
    order: MonomialOrder = GREVLEX,
    budget: int = DEFAULT_BUDGET,
) -> GroebnerBasis:
    """Strong Groebner basis over Z (reduced basis over Q) of ``ideal``."""
    ctx = _Ctx(ideal.ring, order, budget)
    inputs = [ctx.to_internal(g) for g in ideal.generators]
    G = _interreduce(ctx, _buchberger(ctx, inputs))
    strength = "STRONG_Z" if ctx.over_z else "REDUCED_Q"
    return GroebnerBasis(ideal, order, tuple(ctx.to_poly(g) for g in G), strength, ctx.steps, G)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Fully reduced remainder of ``f`` modulo the basis ``G``."""
    if f.ring != G.ring:
        raise RingMismatch(f"{f.ring} vs {G.ring}")
    ctx = _Ctx(G.ring, G.order, DEFAULT_BUDGET)
    return ctx.to_poly(_reduce(ctx, ctx.to_internal(f), G._internal))


def ideal_contains(I: IdealPresentation, f: Polynomial) -> bool:
    if f.ring != I.ring:
        raise RingMismatch(f"{f.ring} vs {I.ring}")
    if not f:
        return True
    return not normal_form(f, I.basis)


def ideal_equal(I: IdealPresentation, J: IdealPresentation) -> bool:
    if I.ring != J.ring:
        raise RingMismatch(f"{I.ring} vs {J.ring}")
    return all(ideal_contains(I, g) for g in J.generators) and all(
        ideal_contains(J, g) for g in I.generators
    )


# ---------------------------------------------------------------------------
# elimination, intersection, quotients, kernels


def _fresh(name: str, taken: set[str]) -> str:
    candidate = name
    n = 0
    while candidate in taken:
        n += 1
        candidate = f"{name}{n}"
    taken.add(candidate)
    return candidate


def eliminate(I: IdealPresentation, keep: Sequence[str], budget: int = DEFAULT_BUDGET) -> IdealPresentation:
    """Generators of ``I`` intersected with the subring on ``keep``.

    The result lives in the subring (variables in their original order).
    """
    ring = I.ring
    keep = [n for n in ring.names if n in set(keep)]
    drop = [n for n in ring.names if n not in set(keep)]
    work = ring.subring(drop + keep)
    sub = ring.subring(keep)
    G = groebner_basis(
        IdealPresentation(work, tuple(g.change_ring(work) for g in I.generators)),
        elimination_order(len(drop)),
        budget,
    )
    dropped = set(drop)
    gens = [g.change_ring(sub) for g in G.basis if not (g.variables() & dropped)]
    return IdealPresentation(sub, tuple(gens))


def intersect(I: IdealPresentation, J: IdealPresentation, budget: int = DEFAULT_BUDGET) -> IdealPresentation:
    """``I ∩ J`` by eliminating ``t`` from ``t*I + (1-t)*J``."""
    if I.ring != J.ring:
        raise RingMismatch(f"{I.ring} vs {J.ring}")
    ring = I.ring
    t_name = _fresh("t", set(ring.names))
    big = GradedRing(ring.domain, (t_name,) + ring.names, (1,) + ring.weights)
    t = big.var(t_name)
    gens = [t * g.change_ring(big) for g in I.generators]
    gens += [(1 - t) * g.change_ring(big) for g in J.generators]
    out = eliminate(IdealPresentation(big, tuple(gens)), ring.names, budget)
    return IdealPresentation(ring, tuple(g.change_ring(ring) for g in out.generators))


def divide_exact(f: Polynomial, c: Polynomial) -> Polynomial:
    """Exact quotient ``f / c``; raises :class:`DivisionFailure` if ``c`` does not divide ``f``."""
    if f.ring != c.ring:
        raise RingMismatch(f"{f.ring} vs {c.ring}")
    if not c:
        raise DivisionFailure("division by zero polynomial")
    ctx = _Ctx(f.ring, GREVLEX, DEFAULT_BUDGET)
    rem = ctx.to_internal(f)
    cc = ctx.to_internal(c)
    ce, clc = cc[0][1], cc[0][2]
    quotient = {}
    while rem:
        k, e, a = rem[0]
        if not _divides(ce, e):
            raise DivisionFailure(f"{c} does not divide {f}")
        q, r = _divmod(ctx, a, clc)
        if r:
            raise DivisionFailure(f"{c} does not divide {f}")
        m = _sube(e, ce)
        quotient[m] = q
        rem = _axpy(rem, -q, ctx.key(m), m, cc)
    return Polynomial(f.ring, quotient)


def ideal_quotient_element(I: IdealPresentation, c: Polynomial, budget: int = DEFAULT_BUDGET) -> IdealPresentation:
    """``(I : c)``, computed as ``(I ∩ (c)) / c``."""
    if c.ring != I.ring:
        raise RingMismatch(f"{c.ring} vs {I.ring}")
    if not c:
        raise ValueError("quotient by the zero element")
    meet = intersect(I, IdealPresentation(I.ring, (c,)), budget)
    return IdealPresentation(I.ring, tuple(divide_exact(g, c) for g in meet.generators))


def kernel_of_ringmap(
    source: GradedRing,
    target_ring: GradedRing,
    target_relations: IdealPresentation,
    images: Sequence[Polynomial],
    budget: int = DEFAULT_BUDGET,
) -> IdealPresentation:
    """Kernel of ``source -> target_ring/target_relations`` sending variables to ``images``.

    Computed by eliminating the target variables from the graph ideal
    ``J + (x_k - image_k)``. Every emitted generator is re-checked to map to 0.
    """
    taken = set(source.names)
    renamed = [_fresh(f"y_{n}", taken) for n in target_ring.names]
    domain = source.domain if source.domain == target_ring.domain else "Q"
    big = GradedRing(domain, tuple(renamed) + source.names, target_ring.weights + source.weights)
    tgt_in_big = [big.var(n) for n in renamed]

    def lift(p: Polynomial) -> Polynomial:
        return substitute(p.change_ring(target_ring), tgt_in_big, big, check_degrees=False)

    gens = [lift(r) for r in target_relations.generators]
    for name, img in zip(source.names, images):
        gens.append(big.var(name) - lift(img))
    out = eliminate(IdealPresentation(big, tuple(gens)), source.names, budget)
    kernel = IdealPresentation(source.with_domain(domain), tuple(g.change_ring(source.with_domain(domain)) for g in out.generators))
    if domain != source.domain:
        kernel = IdealPresentation(source, tuple(g.change_ring(source) for g in kernel.generators))
    for g in kernel.generators:
        image = substitute(g, list(images), target_ring, check_degrees=False)
        if not ideal_contains(target_relations, image):
            raise DivisionFailure(f"kernel generator {g} does not map to zero")
    return kernel


def minimize_generators(I: IdealPresentation) -> IdealPresentation:
    """Greedily drop generators that lie in the ideal of the remaining ones."""
    gens = sorted(I.generators, key=lambda g: (g.degree(), len(g), str(g)))
    keep = list(gens)
    for g in reversed(gens):
        others = [h for h in keep if h is not g]
        if len(others) < len(keep) and ideal_contains(IdealPresentation(I.ring, tuple(others)), g):
            keep = others
    return IdealPresentation(I.ring, tuple(keep))


# ---------------------------------------------------------------------------
# graded pieces


@dataclass(frozen=True)
class GradedPiece:
    degree: int
    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def monomials_of_degree(weights: Sequence[int], d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of weighted degree ``d``, in a fixed order."""
    out = []
    n = len(weights)

    def rec(i, left, acc):
        if i == n:
            if left == 0:
                out.append(tuple(acc))
            return
        w = weights[i]
        for k in range(left // w, -1, -1):
            acc.append(k)
            rec(i + 1, left - k * w, acc)
            acc.pop()

    if d >= 0:
        rec(0, d, [])
    return out


def graded_component(ring: GradedRing, relations: IdealPresentation, d: int) -> GradedPiece:
    """Abelian-group structure of the degree-``d`` piece of ``ring / relations``.

    The degree-``d`` part of a homogeneous ideal is spanned by the products
    ``m*g`` of generators with monomials of complementary degree; the piece is
    the cokernel of that matrix in the monomial basis.
    """
    if relations.ring != ring:
        raise RingMismatch(f"{relations.ring} vs {ring}")
    if not relations.homogeneous:
        raise InhomogeneousIdeal("graded components need homogeneous relations")
    if d < 0:
        raise ValueError("degree must be nonnegative")
    basis = monomials_of_degree(ring.weights, d)
    index = {m: i for i, m in enumerate(basis)}
    rows = []
    for g in relations.generators:
        e = g.degree()
        if e > d:
            continue
        for m in monomials_of_degree(ring.weights, d - e):
            row = [0] * len(basis)
            for ge, c in g.terms.items():
                row[index[_addk(ge, m)]] = c
            rows.append(row)
    if ring.domain == INTEGERS:
        factors = invariant_factors(rows, len(basis))
        rank = len(factors)
        torsion = tuple(f for f in factors if f != 1)
        return GradedPiece(d, len(basis) - rank, torsion)
    return GradedPiece(d, len(basis) - rational_rank(rows, len(basis)), ())
