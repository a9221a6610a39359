"""Exact multivariate polynomials over Z and Q with a weighted grading.

Polynomials are immutable. Terms are stored in a dict keyed by exponent
tuples; the ordering of terms only matters for printing and for Groebner
computations, which take a :class:`MonomialOrder` explicitly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

__all__ = [
    "INTEGERS",
    "RATIONALS",
    "PolyError",
    "RingMismatch",
    "DegreeMismatch",
    "ParseError",
    "UnknownVariable",
    "RationalInIntegerRing",
    "GradedRing",
    "MonomialOrder",
    "GREVLEX",
    "elimination_order",
    "Polynomial",
    "Degree",
    "poly_arith",
    "weighted_degree",
    "homogeneous_components",
    "parse_poly",
    "substitute",
]

INTEGERS = "Z"
RATIONALS = "Q"

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class PolyError(Exception):
    """Base class for errors raised by the polynomial layer."""

    code = "POLY_ERROR"


class RingMismatch(PolyError):
    code = "RING_MISMATCH"


class DegreeMismatch(PolyError):
    code = "DEGREE_MISMATCH"


class ParseError(PolyError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownVariable(ParseError):
    code = "UNKNOWN_VARIABLE"


class RationalInIntegerRing(ParseError):
    code = "RATIONAL_IN_INTEGER_RING"


# ---------------------------------------------------------------------------
# rings and orders


@dataclass(frozen=True)
class GradedRing:
    """Polynomial ring over Z or Q with positive integer variable weights."""

    domain: str
    names: tuple[str, ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        if self.domain not in (INTEGERS, RATIONALS):
            raise ValueError(f"unknown coefficient domain {self.domain!r}")
        if len(self.names) != len(self.weights):
            raise ValueError("names and weights differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        for name, w in zip(self.names, self.weights):
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
            if not isinstance(w, int) or w < 1:
                raise ValueError(f"weight of {name} must be a positive integer")

    @classmethod
    def of(cls, domain: str, variables: Iterable[tuple[str, int] | str]) -> "GradedRing":
        names, weights = [], []
        for v in variables:
            if isinstance(v, str):
                v = (v, 1)
            names.append(v[0])
            weights.append(int(v[1]))
        return cls(domain, tuple(names), tuple(weights))

    @classmethod
    def parse(cls, text: str) -> "GradedRing":
        """Parse ``Z[name:weight,...]`` or ``Q[...]``; a missing weight means 1."""
        m = re.fullmatch(r"\s*([ZQ])\s*\[(.*)\]\s*", text)
        if not m:
            raise ParseError(f"bad ring spec {text!r}", 0)
        domain, body = m.groups()
        variables = []
        if body.strip():
            for item in body.split(","):
                name, _, weight = item.strip().partition(":")
                name = name.strip()
                try:
                    w = int(weight) if weight.strip() else 1
                except ValueError:
                    raise ParseError(f"bad weight {weight!r} in ring spec {text!r}") from None
                variables.append((name, w))
        try:
            return cls.of(domain, variables)
        except ValueError as exc:
            raise ParseError(f"{exc} in ring spec {text!r}") from None

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def coerce(self, c) -> int | Fraction:
        if self.domain == RATIONALS:
            return Fraction(c)
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise RationalInIntegerRing(f"non-integral coefficient {c} over Z")
            return int(c.numerator)
        return int(c)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Polynomial":
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.var(n) for n in self.names]

    def __call__(self, text: str) -> "Polynomial":
        return parse_poly(text, self)

    def with_domain(self, domain: str) -> "GradedRing":
        return GradedRing(domain, self.names, self.weights)

    def subring(self, names: Sequence[str]) -> "GradedRing":
        return GradedRing(self.domain, tuple(names), tuple(self.weights[self.index(n)] for n in names))

    def mdeg(self, exps: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.weights, exps))

    def __str__(self):
        inner = ",".join(f"{n}:{w}" for n, w in zip(self.names, self.weights))
        return f"{self.domain}[{inner}]"


@dataclass(frozen=True)
class MonomialOrder:
    """Weighted degree-reverse-lexicographic order, or a block (elimination) order.

    ``BLOCK`` compares the first ``split`` variables with ``outer`` and
    breaks ties with ``inner`` on the remaining variables.
    """

    kind: str = "WEIGHTED_DEGREVLEX"
    split: int = 0
    outer: "MonomialOrder | None" = None
    inner: "MonomialOrder | None" = None

    def key_function(self, weights: Sequence[int]) -> Callable[[tuple], tuple]:
        """Return ``key`` with ``key(a) > key(b)`` iff ``a > b``.

        Keys are linear in the exponent vector, so ``key(a+b)`` is the
        componentwise sum of ``key(a)`` and ``key(b)``.
        """
        weights = tuple(weights)
        if self.kind == "WEIGHTED_DEGREVLEX":
            def key(e, _w=weights):
                return (sum(w * x for w, x in zip(_w, e)),) + tuple(-x for x in reversed(e))
            return key
        if self.kind == "BLOCK":
            k = self.split
            ko = self.outer.key_function(weights[:k])
            ki = self.inner.key_function(weights[k:])

            def key(e):
                return ko(e[:k]) + ki(e[k:])
            return key
        raise ValueError(f"unknown order kind {self.kind!r}")

    def __str__(self):
        if self.kind == "BLOCK":
            return f"elim:{self.split}"
        return "grevlex"


GREVLEX = MonomialOrder()


def elimination_order(k: int) -> MonomialOrder:
    """Block order eliminating the first ``k`` variables."""
    return MonomialOrder("BLOCK", k, GREVLEX, GREVLEX)


# ---------------------------------------------------------------------------
# polynomials


def _fmt_coeff(c) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"
    return str(c)


@dataclass(frozen=True, eq=False)
class Polynomial:
    ring: GradedRing
    terms: Mapping[tuple, int | Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        n = self.ring.nvars
        for e, c in self.terms.items():
            if len(e) != n:
                raise ValueError(f"exponent {e} has wrong length for {self.ring}")
            c = self.ring.coerce(c)
            if c:
                clean[tuple(e)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, ring: GradedRing, terms: dict) -> "Polynomial":
        # trusted constructor: coefficients already coerced, no zeros
        p = object.__new__(cls)
        object.__setattr__(p, "ring", ring)
        object.__setattr__(p, "terms", terms)
        return p

    # -- basic protocol --------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def _check(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        return self * self.ring.const(c)

    # -- grading ---------------------------------------------------------

    def degree(self) -> int | None:
        if not self.terms:
            return None
        return max(self.ring.mdeg(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.mdeg(e) for e in self.terms}) <= 1

    def components(self) -> list[tuple[int, "Polynomial"]]:
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(self.ring.mdeg(e), {})[e] = c
        return [(d, Polynomial._raw(self.ring, parts[d])) for d in sorted(parts)]

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            used.update(n for n, x in zip(self.ring.names, e) if x)
        return used

    def content(self):
        """gcd of the coefficients over Z (sign of the leading term not applied)."""
        from math import gcd
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c)) if self.ring.domain == INTEGERS else 1
        return g

    # -- orders ----------------------------------------------------------

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list[tuple[tuple, int | Fraction]]:
        key = order.key_function(self.ring.weights)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = GREVLEX):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.key_function(self.ring.weights)
        e = max(self.terms, key=key)
        return e, self.terms[e]

    # -- conversion ------------------------------------------------------

    def change_ring(self, ring: GradedRing) -> "Polynomial":
        """Move to ``ring`` matching variables by name; unused variables may vanish."""
        if ring == self.ring:
            return self
        pos = []
        for name in self.ring.names:
            pos.append(ring.names.index(name) if name in ring.names else None)
        out = {}
        for e, c in self.terms.items():
            new = [0] * ring.nvars
            for i, x in enumerate(e):
                if x:
                    if pos[i] is None:
                        raise RingMismatch(f"variable {self.ring.names[i]} missing from {ring}")
                    new[pos[i]] = x
            out[tuple(new)] = c
        return Polynomial(ring, out)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                name if x == 1 else f"{name}^{x}"
                for name, x in zip(self.ring.names, e) if x
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = _fmt_coeff(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_coeff(a)}*{mono}"
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({str(self)!r} in {self.ring})"


# ---------------------------------------------------------------------------
# degree helpers


@dataclass(frozen=True)
class Degree:
    degree: int | None
    homogeneous: bool


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if op == "ADD":
        return a + b
    if op == "SUB":
        return a - b
    if op == "MUL":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def weighted_degree(p: Polynomial) -> Degree:
    """Weighted degree and homogeneity; the zero polynomial reports ``(None, True)``."""
    return Degree(p.degree(), p.is_homogeneous())


def homogeneous_components(p: Polynomial) -> list[tuple[int, Polynomial]]:
    return p.components()


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN_RE.match(text, pos)
        start = m.start(m.lastindex)
        num, name, sym = m.groups()
        if num is not None:
            tokens.append(("NUM", int(num), start))
        elif name is not None:
            tokens.append(("NAME", name, start))
        else:
            if sym not in "+-*^()/":
                raise ParseError(f"unexpected character {sym!r}", start)
            tokens.append((sym, sym, start))
        pos = m.end()
    tokens.append(("END", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: GradedRing):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1] if tok[1] is not None else 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.expr()
        tok = self.peek()
        if tok[0] != "END":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.unary()
        return p

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        p = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("NUM")
            p = p ** tok[1]
        return p

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "NUM":
            self.take()
            if self.peek()[0] == "/":
                self.take()
                den = self.take("NUM")
                if den[1] == 0:
                    raise ParseError("division by zero", den[2])
                value = Fraction(value, den[1])
                if self.ring.domain == INTEGERS and value.denominator != 1:
                    raise RationalInIntegerRing(f"non-integral coefficient {value} over Z", pos)
            return self.ring.const(value)
        if kind == "NAME":
            self.take()
            if value not in self.ring.names:
                raise UnknownVariable(f"unknown variable {value!r}", pos)
            return self.ring.var(value)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        raise ParseError(f"unexpected {value if value is not None else 'end of input'!r}", pos)


def parse_poly(text: str, ring: GradedRing) -> Polynomial:
    """Parse ``text`` in the polynomial grammar into an element of ``ring``."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text, ring).parse()


# ---------------------------------------------------------------------------
# substitution


def substitute(
    p: Polynomial,
    images: Sequence[Polynomial] | Mapping[str, Polynomial],
    target: GradedRing | None = None,
    check_degrees: bool = True,
) -> Polynomial:
    """Apply the ring homomorphism sending the i-th variable to ``images[i]``.

    ``images`` may be a mapping by variable name; missing names map to the
    variable of the same name in ``target``.
    """
    source = p.ring
    if isinstance(images, Mapping):
        if target is None:
            raise ValueError("target ring required for name-based images")
        images = [images[n] if n in images else target.var(n) for n in source.names]
    images = list(images)
    if len(images) != source.nvars:
        raise RingMismatch(f"{len(images)} images for {source.nvars} variables")
    if target is None:
        target = images[0].ring if images else source
    for name, w, img in zip(source.names, source.weights, images):
        if img.ring != target:
            raise RingMismatch(f"image of {name} lives in {img.ring}, not {target}")
        if check_degrees and img and (not img.is_homogeneous() or img.degree() != w):
            raise DegreeMismatch(f"image of {name} (weight {w}) is {img}")
    powers: list[dict[int, Polynomial]] = [{0: target.one(), 1: img} for img in images]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = power(i, k - 1) * images[i]
        return cache[k]

    out = target.zero()
    for e, c in p.terms.items():
        t = target.const(c)
        for i, k in enumerate(e):
            if k:
                t = t * power(i, k)
        out = out + t
    return out
