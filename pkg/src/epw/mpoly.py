"""Sparse multivariate polynomials in 6 variables and form interpolation.

A MultiPoly maps exponent vectors (length 6) to nonzero field elements.
Interpolation recovers the unique degree-d form through a point cloud as the
nullspace of the evaluation matrix on all degree-d monomials; monomials are
ordered lexicographically by descending exponent vector and the recovered
form is scaled so its first nonzero coefficient in that order is 1.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import InputError, InterpolationAmbiguous, InterpolationNoForm
from .field import Fe, Field, normalize_proj
from .poly import UniPoly

NVARS = 6
DEFAULT_MARGIN = 40


@lru_cache(maxsize=None)
def monomials_of_degree(d: int, nvars: int = NVARS) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree d, lexicographically descending."""

    def gen(rem: int, slots: int):
        if slots == 1:
            yield (rem,)
            return
        for e in range(rem, -1, -1):
            for tail in gen(rem - e, slots - 1):
                yield (e,) + tail

    return tuple(gen(d, nvars))


class MultiPoly:
    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: dict[tuple[int, ...], Fe] | Iterable = ()):
        self.field = field
        t: dict[tuple[int, ...], Fe] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != NVARS or any(e < 0 for e in exp):
                raise InputError("exponent vectors must have 6 nonnegative entries")
            c = field.elt(c)
            if c:
                t[exp] = t[exp] + c if exp in t else c
                if not t[exp]:
                    del t[exp]
        self.terms = t

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.field == other.field
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for exp in sorted(self.terms, reverse=True):
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exp) if e)
            parts.append(f"{self.terms[exp]!r}*{mono}" if mono else f"{self.terms[exp]!r}")
        return "MultiPoly(" + " + ".join(parts) + ")"

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, self.field.zero) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return MultiPoly(self.field, out)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + other * (-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fe)):
            c = self.field.elt(other)
            if not c:
                return MultiPoly(self.field)
            return MultiPoly(self.field, {e: v * c for e, v in self.terms.items()})
        out: dict[tuple[int, ...], Fe] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, self.field.zero) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(self.field, out)

    __rmul__ = __mul__

    def partial(self, i: int) -> "MultiPoly":
        out = {}
        for exp, c in self.terms.items():
            if exp[i]:
                e = list(exp)
                cc = c * e[i]
                e[i] -= 1
                if cc:
                    out[tuple(e)] = cc
        return MultiPoly(self.field, out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.partial(i) for i in range(NVARS)]

    def evaluate(self, point: Sequence) -> Fe:
        field = self.field
        pt = [field.elt(c) for c in point]
        maxe = [0] * NVARS
        for exp in self.terms:
            for i, e in enumerate(exp):
                maxe[i] = max(maxe[i], e)
        pows = []
        for i in range(NVARS):
            row = [field.one]
            for _ in range(maxe[i]):
                row.append(row[-1] * pt[i])
            pows.append(row)
        acc = field.zero
        for exp, c in self.terms.items():
            m = c
            for i, e in enumerate(exp):
                if e:
                    m = m * pows[i][e]
            acc = acc + m
        return acc

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Values at many points (rows); prime field only, vectorized."""
        if self.field.k != 1:
            raise InputError("vectorized evaluation requires a prime field")
        p = self.field.p
        pts = np.mod(np.asarray(points, dtype=np.int64), p)
        npts = pts.shape[0]
        d = self.total_degree()
        pows = _power_tables(pts, d, p)
        acc = np.zeros(npts, dtype=np.int64)
        for exp, c in self.terms.items():
            col = np.full(npts, c.lift(), dtype=np.int64)
            for i, e in enumerate(exp):
                if e:
                    col = col * pows[i][e] % p
            acc = (acc + col) % p
        return acc

    def restrict_to_pencil(self, d0: Sequence, d1: Sequence) -> UniPoly:
        """The univariate f(d0 + t*d1); for homogeneous f, f(d1) governs t=inf."""
        field = self.field
        a = [field.elt(c) for c in d0]
        b = [field.elt(c) for c in d1]
        deg = self.total_degree()
        out = [field.zero] * (deg + 1)
        for exp, c in self.terms.items():
            conv = [c]
            for i, e in enumerate(exp):
                for _ in range(e):
                    # multiply the t-polynomial by (a_i + t b_i)
                    nxt = [field.zero] * (len(conv) + 1)
                    for j, cj in enumerate(conv):
                        if cj:
                            nxt[j] = nxt[j] + cj * a[i]
                            nxt[j + 1] = nxt[j + 1] + cj * b[i]
                    conv = nxt
            for j, cj in enumerate(conv):
                out[j] = out[j] + cj
        return UniPoly(field, out)

    def map_field(self, target: Field) -> "MultiPoly":
        """Lift base-field coefficients into an extension field."""
        return MultiPoly(target, {e: target.elt(c.lift()) for e, c in self.terms.items()})

    def normalized(self) -> "MultiPoly":
        """Scale so the first nonzero coefficient in descending lex order is 1."""
        if not self.terms:
            raise InputError("cannot normalize the zero polynomial")
        lead = max(self.terms)
        inv = self.terms[lead].inverse()
        return self * inv

    def to_json_obj(self) -> dict:
        return {
            "vars": NVARS,
            "terms": [
                {"exp": list(exp), "c": self.terms[exp].lift()}
                for exp in sorted(self.terms, reverse=True)
            ],
        }

    @classmethod
    def from_json_obj(cls, field: Field, obj: dict) -> "MultiPoly":
        if obj.get("vars") != NVARS:
            raise InputError("polynomial JSON must have vars = 6")
        return cls(field, [(tuple(t["exp"]), t["c"]) for t in obj["terms"]])


def _power_tables(pts: np.ndarray, maxdeg: int, p: int) -> list[list[np.ndarray]]:
    npts = pts.shape[0]
    tables = []
    for i in range(pts.shape[1]):
        row = [np.ones(npts, dtype=np.int64)]
        for _ in range(maxdeg):
            row.append(row[-1] * pts[:, i] % p)
        tables.append(row)
    return tables


def evaluation_matrix(points: np.ndarray, d: int, p: int) -> np.ndarray:
    """Rows = points, columns = degree-d monomials in descending lex order."""
    pts = np.mod(np.asarray(points, dtype=np.int64), p)
    monos = monomials_of_degree(d)
    pows = _power_tables(pts, d, p)
    cols = []
    for exp in monos:
        col = np.ones(pts.shape[0], dtype=np.int64)
        for i, e in enumerate(exp):
            if e:
                col = col * pows[i][e] % p
        cols.append(col)
    return np.stack(cols, axis=1)


def interpolate_form(points: Sequence, d: int, field: Field, margin: int = DEFAULT_MARGIN) -> MultiPoly:
    """The unique-up-to-scale degree-d form vanishing on all the points.

    Raises InterpolationNoForm when the evaluation matrix has full column
    rank and InterpolationAmbiguous when its nullity is 2 or more.
    """
    if field.k != 1:
        raise InputError("interpolation is implemented over prime fields")
    monos = monomials_of_degree(d)
    need = len(monos) + margin
    pts = []
    for pt in points:
        row = [field.elt(c).lift() for c in pt]
        if not any(row):
            raise InputError("points must be nonzero")
        pts.append(row)
    if len(pts) < need:
        raise InputError(f"need at least {need} points for degree {d} (margin {margin})")
    M = evaluation_matrix(np.array(pts, dtype=np.int64), d, field.p)
    ns = linalg.nullspace_mod(M, field.p)
    if ns.shape[0] == 0:
        raise InterpolationNoForm(f"no degree-{d} form vanishes on the sample")
    if ns.shape[0] > 1:
        raise InterpolationAmbiguous(
            f"nullity {ns.shape[0]}: points do not determine a unique degree-{d} form"
        )
    coeffs = ns[0]
    poly = MultiPoly(field, {exp: int(c) for exp, c in zip(monos, coeffs) if c % field.p})
    return poly.normalized()
