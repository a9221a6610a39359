"""Graded quotient presentations and the calculus built on top of them.

A presentation is a weighted polynomial ring modulo a homogeneous ideal. Ring
maps into a presentation are validated by reducing the images of the source
relations; relations of a space glued from an open part and a closed part are
obtained as the intersection of the two restriction kernels, provided the top
Chern class of the normal bundle is a non-zero-divisor on the closed part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .groebner import (
    GradedPiece,
    IdealPresentation,
    graded_component,
    ideal_contains,
    ideal_equal,
    ideal_quotient_element,
    intersect,
    kernel_of_ringmap,
    normal_form,
)
from .polyring import (
    DegreeMismatch,
    GradedRing,
    Polynomial,
    PolyError,
    RingMismatch,
    substitute,
)

__all__ = [
    "ChowPresentation",
    "RingMap",
    "MapValidation",
    "validate_ringmap",
    "nonzerodivisor",
    "PatchingProblem",
    "PreconditionNZD",
    "patching_relations",
    "excise",
    "SurjectivePullback",
    "QuadraticTransfer",
    "OperatorValidation",
    "NotReducible",
    "LiftFailure",
    "pushforward_apply",
    "weight_class",
    "projective_bundle_presentation",
    "RestrictionOutcome",
    "ConsistencyReport",
    "class_consistency",
]


class PreconditionNZD(PolyError):
    code = "PRECONDITION_NZD"


class NotReducible(PolyError):
    code = "NOT_REDUCIBLE"


class LiftFailure(PolyError):
    code = "LIFT_FAILURE"


@dataclass(frozen=True, eq=False)
class ChowPresentation:
    name: str
    ring: GradedRing
    relations: IdealPresentation
    generator_docs: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.relations.ring != self.ring:
            raise RingMismatch(f"relations of {self.name} live in {self.relations.ring}")
        if not self.relations.homogeneous:
            raise DegreeMismatch(f"relations of {self.name} are not homogeneous")

    @classmethod
    def build(cls, name: str, ring: GradedRing | str, relations: Sequence[str | Polynomial] = ()) -> "ChowPresentation":
        if isinstance(ring, str):
            ring = GradedRing.parse(ring)
        gens = tuple(ring(r) if isinstance(r, str) else r for r in relations)
        return cls(name, ring, IdealPresentation(ring, gens))

    @classmethod
    def free(cls, name: str, ring: GradedRing | str) -> "ChowPresentation":
        return cls.build(name, ring, ())

    def __call__(self, text: str) -> Polynomial:
        return self.ring(text)

    @cached_property
    def _basis(self):
        return self.relations.basis

    def contains(self, f: Polynomial) -> bool:
        return not f or not normal_form(f, self._basis)

    def reduce(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self._basis)

    def graded_component(self, d: int) -> GradedPiece:
        return graded_component(self.ring, self.relations, d)

    def __str__(self):
        return f"{self.name} = {self.ring}/{self.relations}"


@dataclass(frozen=True, eq=False)
class RingMap:
    """Ring map from a free graded ring into a presentation, given on variables."""

    source: GradedRing
    target: ChowPresentation
    images: tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.images) != self.source.nvars:
            raise ValueError(f"{len(self.images)} images for {self.source.nvars} variables")
        for var, w, img in zip(self.source.names, self.source.weights, self.images):
            if img.ring != self.target.ring:
                raise RingMismatch(f"image of {var} is not in {self.target.ring}")
            if img and not (img.is_homogeneous() and img.degree() == w):
                raise DegreeMismatch(f"image {img} of {var} is not homogeneous of degree {w}")

    @classmethod
    def from_mapping(
        cls,
        source: GradedRing,
        target: ChowPresentation,
        mapping: Mapping[str, str | Polynomial],
        name: str = "",
    ) -> "RingMap":
        """Images by variable name; unnamed variables go to the same-named target variable."""
        unknown = set(mapping) - set(source.names)
        if unknown:
            raise ValueError(f"no source variable(s) {sorted(unknown)}")
        images = []
        for var in source.names:
            if var in mapping:
                img = mapping[var]
                images.append(target.ring(img) if isinstance(img, str) else img)
            elif var in target.ring.names:
                images.append(target.ring.var(var))
            else:
                raise ValueError(f"no image for {var} and no variable of that name in {target.name}")
        return cls(source, target, tuple(images), name)

    @classmethod
    def identity(cls, presentation: ChowPresentation) -> "RingMap":
        return cls(presentation.ring, presentation, tuple(presentation.ring.gens()), "id")

    def __call__(self, p: Polynomial) -> Polynomial:
        if p.ring != self.source:
            p = p.change_ring(self.source)
        return substitute(p, list(self.images), self.target.ring)

    @cached_property
    def kernel(self) -> IdealPresentation:
        return kernel_of_ringmap(self.source, self.target.ring, self.target.relations, list(self.images))


@dataclass(frozen=True)
class MapValidation:
    valid: bool
    relation: Polynomial | None = None
    residue: Polynomial | None = None

    def __bool__(self):
        return self.valid


def validate_ringmap(m: RingMap, source_relations: IdealPresentation) -> MapValidation:
    """Check that every source relation maps into the target relations."""
    for rel in source_relations.generators:
        residue = m.target.reduce(m(rel))
        if residue:
            return MapValidation(False, rel, residue)
    return MapValidation(True)


def nonzerodivisor(A: ChowPresentation, c: Polynomial) -> bool:
    if not c:
        return False
    quotient = ideal_quotient_element(A.relations, c)
    return ideal_equal(quotient, A.relations)


@dataclass(frozen=True, eq=False)
class PatchingProblem:
    generators: GradedRing
    restriction_open: RingMap
    restriction_closed: RingMap
    top_chern: Polynomial

    def __post_init__(self):
        for m in (self.restriction_open, self.restriction_closed):
            if m.source != self.generators:
                raise RingMismatch(f"restriction {m.name or '?'} does not start at {self.generators}")
        if self.top_chern.ring != self.restriction_closed.target.ring:
            raise RingMismatch("top Chern class must live on the closed stratum")
        if self.top_chern and not self.top_chern.is_homogeneous():
            raise DegreeMismatch("top Chern class must be homogeneous")


def patching_relations(p: PatchingProblem) -> IdealPresentation:
    """Relations among the candidate generators: ker(open) ∩ ker(closed)."""
    closed = p.restriction_closed.target
    if not nonzerodivisor(closed, p.top_chern):
        raise PreconditionNZD(f"{p.top_chern} is a zero divisor in {closed.name}")
    out = intersect(p.restriction_open.kernel, p.restriction_closed.kernel)
    for g in out.generators:
        for m in (p.restriction_open, p.restriction_closed):
            if not m.target.contains(m(g)):
                raise PolyError(f"patched relation {g} survives restriction {m.name}")
    return out


def excise(A: ChowPresentation, classes: Sequence[Polynomial], new_name: str) -> ChowPresentation:
    for c in classes:
        if c.ring != A.ring:
            raise RingMismatch(f"class {c} is not in {A.ring}")
        if not c.is_homogeneous():
            raise DegreeMismatch(f"class {c} is not homogeneous")
    gens = A.relations.generators + tuple(classes)
    return ChowPresentation(new_name, A.ring, IdealPresentation(A.ring, gens), A.generator_docs)


# ---------------------------------------------------------------------------
# pushforwards


@dataclass(frozen=True)
class OperatorValidation:
    valid: bool
    problem: str = ""
    witness: Polynomial | None = None

    def __bool__(self):
        return self.valid


@dataclass(frozen=True, eq=False)
class SurjectivePullback:
    """Pushforward along a closed embedding whose pullback is surjective.

    ``pullback`` goes from the ambient presentation ``ambient`` to the closed
    stratum; ``preimages`` lifts every variable of the stratum. A class ``x``
    on the stratum pushes forward to ``lift(x) * unit_image``.
    """

    ambient: ChowPresentation
    pullback: RingMap
    unit_image: Polynomial
    preimages: Mapping[str, Polynomial]

    @property
    def stratum(self) -> ChowPresentation:
        return self.pullback.target

    def lift(self, x: Polynomial) -> Polynomial:
        stratum = self.stratum.ring
        missing = [v for v in stratum.names if v not in self.preimages]
        if missing:
            raise LiftFailure(f"no preimage declared for {missing}")
        if x.ring != stratum:
            x = x.change_ring(stratum)
        return substitute(x, [self.preimages[v] for v in stratum.names], self.ambient.ring)

    def validate(self) -> OperatorValidation:
        stratum = self.stratum
        for v in stratum.ring.names:
            if v not in self.preimages:
                return OperatorValidation(False, f"no preimage for {v}")
            back = self.pullback(self.preimages[v]) - stratum.ring.var(v)
            residue = stratum.reduce(back)
            if residue:
                return OperatorValidation(False, f"preimage of {v} does not pull back to {v}", residue)
        for k in self.pullback.kernel.generators:
            residue = self.ambient.reduce(k.change_ring(self.ambient.ring) * self.unit_image)
            if residue:
                return OperatorValidation(False, f"kernel element {k} times the unit class survives", residue)
        return OperatorValidation(True)

    def apply(self, x: Polynomial) -> Polynomial:
        return self.ambient.reduce(self.lift(x) * self.unit_image)


@dataclass(frozen=True, eq=False)
class QuadraticTransfer:
    """Pushforward for a degree-two extension generated by one element ``tau``.

    Every upstairs class is written as ``pullback(a) + pullback(b)*tau`` using
    ``tau^2 = pullback(p)*tau + pullback(q)`` and the declared expressions of
    the other upstairs variables (``cogenerators``, each a pair ``(a, b)``);
    the pushforward is then ``a*push_unit + b*push_tau``.
    """

    down: ChowPresentation
    pullback: RingMap
    tau: str
    tau_relation: tuple[Polynomial, Polynomial]
    cogenerators: Mapping[str, tuple[Polynomial, Polynomial]]
    push_unit: Polynomial
    push_tau: Polynomial

    def __post_init__(self):
        if self.pullback.source != self.down.ring:
            raise RingMismatch("pullback must start at the downstairs ring")
        if self.tau not in self.up.ring.names:
            raise ValueError(f"{self.tau} is not an upstairs variable")

    @property
    def up(self) -> ChowPresentation:
        return self.pullback.target

    def _pair(self, var: str):
        R = self.down.ring
        if var == self.tau:
            return (R.zero(), R.one())
        if var in self.cogenerators:
            return self.cogenerators[var]
        raise NotReducible(f"upstairs variable {var} has no expression in terms of {self.tau}")

    def _mul(self, x, y):
        p, q = self.tau_relation
        a1, b1 = x
        a2, b2 = y
        bb = b1 * b2
        return (a1 * a2 + bb * q, a1 * b2 + a2 * b1 + bb * p)

    def canonical_form(self, x: Polynomial) -> tuple[Polynomial, Polynomial]:
        """``(a, b)`` with ``x = pullback(a) + pullback(b)*tau``."""
        R = self.down.ring
        up = self.up.ring
        if x.ring != up:
            x = x.change_ring(up)
        pairs = [self._pair(v) if any(e[i] for e in x.terms) else None for i, v in enumerate(up.names)]
        a_tot, b_tot = R.zero(), R.zero()
        for exps, c in x.terms.items():
            acc = (R.one(), R.zero())
            for i, k in enumerate(exps):
                for _ in range(k):
                    acc = self._mul(acc, pairs[i])
            a_tot = a_tot + acc[0].scale(c)
            b_tot = b_tot + acc[1].scale(c)
        return a_tot, b_tot

    def validate(self) -> OperatorValidation:
        up = self.up
        p, q = self.tau_relation
        t = up.ring.var(self.tau)
        residue = up.reduce(t * t - self.pullback(p) * t - self.pullback(q))
        if residue:
            return OperatorValidation(False, f"{self.tau}^2 relation fails upstairs", residue)
        for v in up.ring.names:
            if v == self.tau:
                continue
            if v not in self.cogenerators:
                return OperatorValidation(False, f"no expression for {v}")
            a, b = self.cogenerators[v]
            residue = up.reduce(self.pullback(a) + self.pullback(b) * t - up.ring.var(v))
            if residue:
                return OperatorValidation(False, f"declared expression of {v} is wrong", residue)
        return OperatorValidation(True)

    def apply(self, x: Polynomial) -> Polynomial:
        a, b = self.canonical_form(x)
        return self.down.reduce(a * self.push_unit + b * self.push_tau)


def pushforward_apply(op: SurjectivePullback | QuadraticTransfer, x: Polynomial) -> Polynomial:
    return op.apply(x)


# ---------------------------------------------------------------------------
# classes


def weight_class(characters: Sequence[Polynomial], ring: GradedRing | None = None) -> Polynomial:
    """Product of the character classes cutting out a torus-invariant subspace."""
    if not characters:
        if ring is None:
            raise ValueError("empty product needs a ring")
        return ring.one()
    out = characters[0]
    for ch in characters[1:]:
        out = out * ch
    return out


def projective_bundle_presentation(
    base: ChowPresentation, chern_classes: Sequence[Polynomial], h_name: str = "h", name: str = ""
) -> ChowPresentation:
    """Presentation of the projective bundle of a rank-r bundle with the given Chern classes.

    Adds ``h`` of weight 1 and the relation ``h^r + c_1 h^(r-1) + ... + c_r``.
    """
    for i, c in enumerate(chern_classes, start=1):
        if c.ring != base.ring:
            raise RingMismatch(f"c_{i} is not in {base.ring}")
        if c and not (c.is_homogeneous() and c.degree() == i):
            raise DegreeMismatch(f"c_{i} = {c} is not homogeneous of degree {i}")
    if h_name in base.ring.names:
        raise ValueError(f"{h_name} already names a variable of {base.name}")
    ring = GradedRing(base.ring.domain, base.ring.names + (h_name,), base.ring.weights + (1,))
    h = ring.var(h_name)
    r = len(chern_classes)
    rel = h**r
    for i, c in enumerate(chern_classes, start=1):
        rel = rel + c.change_ring(ring) * h ** (r - i)
    gens = tuple(g.change_ring(ring) for g in base.relations.generators) + (rel,)
    return ChowPresentation(name or f"P({base.name})", ring, IdealPresentation(ring, gens))


@dataclass(frozen=True)
class RestrictionOutcome:
    map_name: str
    expected: Polynomial
    residue: Polynomial

    @property
    def ok(self) -> bool:
        return not self.residue


@dataclass(frozen=True)
class ConsistencyReport:
    outcomes: tuple[RestrictionOutcome, ...]

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    def first_failure(self) -> RestrictionOutcome | None:
        return next((o for o in self.outcomes if not o.ok), None)


def class_consistency(cls: Polynomial, restrictions: Sequence[tuple[RingMap, Polynomial]]) -> ConsistencyReport:
    """Compare the restrictions of ``cls`` with their expected values."""
    outcomes = []
    for m, expected in restrictions:
        residue = m.target.reduce(m(cls) - expected)
        outcomes.append(RestrictionOutcome(m.name, expected, residue))
    return ConsistencyReport(tuple(outcomes))
