"""Univariate polynomials over a Field: gcd, factor profiles, root finding.

Coefficients are stored little-endian with no trailing zeros; the zero
polynomial has degree -1.  Root extraction is deterministic given a seed
(the equal-degree splitting draws from a derived RNG), which keeps every
downstream report reproducible.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import Iterable, Sequence

from .errors import InputError
from .field import SCAN_ORDER_LIMIT, Fe, Field, derive_rng


class UniPoly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Iterable = ()):
        cs = [field.elt(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # -- basics --------------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, UniPoly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c!r}*t^{i}" if i else f"{c!r}")
        return "Poly(" + " + ".join(terms) + ")"

    def __getitem__(self, i: int) -> Fe:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def leading(self) -> Fe:
        if self.is_zero():
            raise InputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @classmethod
    def x(cls, field: Field) -> "UniPoly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: Field, c) -> "UniPoly":
        return cls(field, (c,))

    @classmethod
    def from_roots(cls, field: Field, roots: Sequence) -> "UniPoly":
        out = cls.const(field, 1)
        for r in roots:
            out = out * cls(field, (-field.elt(r), field.one))
        return out

    def map_field(self, target: Field) -> "UniPoly":
        """Lift base-field coefficients into an extension field."""
        return UniPoly(target, [target.elt(c.lift()) for c in self.coeffs])

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.field, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.field, [self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return UniPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (Fe, int)):
            c = self.field.elt(other)
            return UniPoly(self.field, [a * c for a in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return UniPoly(self.field, out)

    __rmul__ = __mul__

    def __divmod__(self, other: "UniPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.degree
        q = [self.field.zero] * max(len(r) - d, 0)
        inv = other.leading().inverse()
        while len(r) - 1 >= d:
            if not r[-1]:
                r.pop()
                continue
            f = r[-1] * inv
            shift = len(r) - 1 - d
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                r[shift + i] = r[shift + i] - f * c
            r.pop()
        return UniPoly(self.field, q), UniPoly(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return UniPoly(self.field, [c * inv for c in self.coeffs])

    def derivative(self) -> "UniPoly":
        return UniPoly(self.field, [self.coeffs[i] * i for i in range(1, len(self.coeffs))])

    def __call__(self, x) -> Fe:
        x = self.field.elt(x)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a) -> "UniPoly":
        """The polynomial f(t + a)."""
        a = self.field.elt(a)
        out = UniPoly(self.field)
        t_plus_a = UniPoly(self.field, (a, self.field.one))
        for c in reversed(self.coeffs):
            out = out * t_plus_a + UniPoly.const(self.field, c)
        return out


def gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def powmod(base: UniPoly, e: int, mod: UniPoly) -> UniPoly:
    result = UniPoly.const(base.field, 1) % mod
    acc = base % mod
    while e:
        if e & 1:
            result = (result * acc) % mod
        acc = (acc * acc) % mod
        e >>= 1
    return result


def lagrange(field: Field, xs: Sequence, ys: Sequence) -> UniPoly:
    """Interpolating polynomial through distinct nodes xs."""
    xs = [field.elt(x) for x in xs]
    ys = [field.elt(y) for y in ys]
    out = UniPoly(field)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        num = UniPoly.const(field, 1)
        den = field.one
        for j, xj in enumerate(xs):
            if j != i:
                num = num * UniPoly(field, (-xj, field.one))
                den = den * (xi - xj)
        out = out + num * (yi / den)
    return out


def squarefree_part(f: UniPoly) -> UniPoly:
    """f / gcd(f, f') made monic.

    In characteristic p a vanishing derivative means f is a p-th power; that
    cannot happen for the degrees (<= 10) and primes (>= 107) this workbench
    scans, but the recursion handles it anyway.
    """
    if f.is_zero():
        raise InputError("zero polynomial has no squarefree part")
    if f.degree == 0:
        return UniPoly.const(f.field, 1)
    d = f.derivative()
    if d.is_zero():
        p = f.field.p
        # f = g(x^p); strip the inner power and recurse
        g = UniPoly(f.field, [f.coeffs[i] for i in range(0, len(f.coeffs), p)])
        return squarefree_part(g)
    return (f // gcd(f, d)).monic()


def distinct_degree_profile(squarefree: UniPoly) -> list[int]:
    """Multiset of irreducible factor degrees of a squarefree polynomial."""
    f = squarefree.monic()
    q = f.field.order
    profile: list[int] = []
    x = UniPoly.x(f.field)
    d = 0
    h = x
    while f.degree > 0:
        d += 1
        if 2 * d > f.degree:
            profile.append(f.degree)
            break
        h = powmod(h, q, f)
        g = gcd(h - x, f)
        if g.degree > 0:
            profile.extend([d] * (g.degree // d))
            f = (f // g).monic()
            h = h % f
    return sorted(profile)


def factor_profile(f: UniPoly) -> list[int]:
    """Degrees of all irreducible factors, counted with multiplicity."""
    if f.is_zero():
        raise InputError("zero polynomial has no factor profile")
    profile: list[int] = []
    g = f.monic()
    while g.degree > 0:
        sf = squarefree_part(g)
        profile.extend(distinct_degree_profile(sf))
        g = (g // sf).monic()
    return sorted(profile)


def roots(f: UniPoly, seed: int = 0) -> list[Fe]:
    """All roots of f in its coefficient field (each listed once).

    Small fields are scanned exhaustively; larger ones go through
    gcd(f, x^q - x) followed by seeded equal-degree splitting.
    """
    if f.is_zero():
        raise InputError("zero polynomial has every element as a root")
    if f.degree == 0:
        return []
    field = f.field
    if field.order <= SCAN_ORDER_LIMIT:
        return [x for x in field.elements() if not f(x)]
    return roots_by_gcd(f, seed)


def roots_by_gcd(f: UniPoly, seed: int = 0) -> list[Fe]:
    """Root finding via the field polynomial x^q - x (any field size)."""
    field = f.field
    q = field.order
    x = UniPoly.x(field)
    lin = gcd(powmod(x, q, f) - x, f)
    out: list[Fe] = []
    _split_linear(lin, derive_rng("edf", seed, q), out)
    return sorted(out, key=lambda e: e.c)


def _split_linear(h: UniPoly, rng: random.Random, out: list[Fe]) -> None:
    """Equal-degree splitting of a product of distinct linear factors."""
    if h.degree <= 0:
        return
    if h.degree == 1:
        h = h.monic()
        out.append(-h.coeffs[0])
        return
    field = h.field
    e = (field.order - 1) // 2
    while True:
        a = field.random(rng)
        g = powmod(UniPoly(field, (a, field.one)), e, h) - UniPoly.const(field, 1)
        g = gcd(g, h)
        if 0 < g.degree < h.degree:
            _split_linear(g, rng, out)
            _split_linear((h // g).monic(), rng, out)
            return


def roots_in_extension(f: UniPoly, ext: Field, seed: int = 0) -> list[Fe]:
    """Roots of a base-field polynomial in the given extension field."""
    if f.field.k != 1 or f.field.p != ext.p:
        raise InputError("expected a base-field polynomial and a matching extension")
    return roots_by_gcd(f.map_field(ext), seed)


def uni_factor_profile(f: UniPoly, seed: int = 0) -> tuple[UniPoly, set[Fe], Counter]:
    """(squarefree part, roots in the coefficient field, factor-degree multiset).

    The degree multiset is taken from the squarefree part, so a double root
    contributes one degree-1 entry; reducedness checks compare degrees of f
    and its squarefree part instead.
    """
    if f.is_zero():
        raise InputError("zero polynomial")
    sf = squarefree_part(f)
    return sf, set(roots(sf, seed)), Counter(distinct_degree_profile(sf))
