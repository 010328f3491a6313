"""Exterior algebra of a fixed 6-dimensional space W.

Coordinates of a grade-k multivector are indexed by the sorted k-subsets of
{0,...,5} in lexicographic order (grade 3 has 20 coordinates).  The volume
form is fixed once and for all as e_0^...^e_5 -> 1; the symplectic form on
grade 3 and the identification of grade-5 vectors with covectors are signed
complement-index tables derived from that choice, so every duality is
bit-exact and reproducible.
"""

from __future__ import annotations

import itertools
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import InputError, InternalError
from .field import Fe, Field, normalize_proj

N = 6

SUBSETS: dict[int, tuple[tuple[int, ...], ...]] = {
    k: tuple(itertools.combinations(range(N), k)) for k in range(N + 1)
}
POS: dict[int, dict[tuple[int, ...], int]] = {
    k: {s: i for i, s in enumerate(SUBSETS[k])} for k in range(N + 1)
}
DIM = {k: len(SUBSETS[k]) for k in range(N + 1)}


def complement(s: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(set(range(N)) - set(s)))


def merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[int, ...] | None, int]:
    """Sorted union and permutation sign of concatenating two sorted tuples."""
    if set(a) & set(b):
        return None, 0
    inv = sum(1 for x in a for y in b if x > y)
    return tuple(sorted(a + b)), -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def wedge_table(j: int, k: int) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    """For each grade-j basis index: tuples (b_index, out_index, sign)."""
    out = []
    for a in SUBSETS[j]:
        row = []
        for bi, b in enumerate(SUBSETS[k]):
            merged, sign = merge_sign(a, b)
            if merged is not None:
                row.append((bi, POS[j + k][merged], sign))
        out.append(tuple(row))
    return tuple(out)


def _omega3_table() -> tuple[tuple[int, int], ...]:
    # omega(e_I, e_J) = sign iff J is the complement of I
    out = []
    for I in SUBSETS[3]:
        c = complement(I)
        _, sign = merge_sign(I, c)
        out.append((POS[3][c], sign))
    return tuple(out)


OMEGA3 = _omega3_table()

J20 = np.zeros((20, 20), dtype=np.int64)
for _i, (_j, _s) in enumerate(OMEGA3):
    J20[_i, _j] = _s

# grade-5 <-> covector table: covector_i = sign * coefficient on complement of {i}
DUAL5: tuple[tuple[int, int], ...] = tuple(
    (POS[5][complement((i,))], merge_sign(complement((i,)), (i,))[1]) for i in range(N)
)


class OrbitType(Enum):
    ZERO = "zero"
    DECOMPOSABLE = "decomposable"
    OMEGA_OPEN = "omega_open"
    GENERIC = "generic"


class MultiVector:
    """Element of the grade-k part of the exterior algebra of W."""

    __slots__ = ("field", "grade", "coeffs")

    def __init__(self, field: Field, grade: int, coeffs: Iterable):
        if not 0 <= grade <= N:
            raise InputError(f"grade must be in [0, {N}]")
        cs = tuple(field.elt(c) for c in coeffs)
        if len(cs) != DIM[grade]:
            raise InputError(f"grade {grade} needs {DIM[grade]} coordinates, got {len(cs)}")
        self.field = field
        self.grade = grade
        self.coeffs = cs

    @classmethod
    def zero(cls, field: Field, grade: int) -> "MultiVector":
        return cls(field, grade, (0,) * DIM[grade])

    @classmethod
    def basis(cls, field: Field, indices: Sequence[int]) -> "MultiVector":
        """e_{i1} ^ ... ^ e_{ik} for strictly increasing 0-based indices."""
        idx = tuple(indices)
        k = len(idx)
        if idx not in POS[k]:
            raise InputError("basis indices must be strictly increasing in [0, 5]")
        coeffs = [0] * DIM[k]
        coeffs[POS[k][idx]] = 1
        return cls(field, k, coeffs)

    @classmethod
    def from_vector(cls, field: Field, v: Sequence) -> "MultiVector":
        return cls(field, 1, v)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, MultiVector)
            and self.field == other.field
            and self.grade == other.grade
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.grade, self.coeffs))

    def __repr__(self):
        terms = []
        for s, c in zip(SUBSETS[self.grade], self.coeffs):
            if c:
                terms.append(f"{c!r}*e{''.join(str(i) for i in s)}")
        return " + ".join(terms) if terms else "0"

    def __add__(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        return MultiVector(self.field, self.grade, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        return MultiVector(self.field, self.grade, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return MultiVector(self.field, self.grade, [-a for a in self.coeffs])

    def __mul__(self, scalar) -> "MultiVector":
        c = self.field.elt(scalar)
        return MultiVector(self.field, self.grade, [a * c for a in self.coeffs])

    __rmul__ = __mul__

    def _check(self, other: "MultiVector"):
        if self.field != other.field or self.grade != other.grade:
            raise InputError("grade or field mismatch")

    def wedge(self, other: "MultiVector") -> "MultiVector":
        if self.field != other.field:
            raise InputError("field mismatch")
        g = self.grade + other.grade
        if g > N:
            raise InputError(f"grade overflow: {self.grade} + {other.grade} > {N}")
        out = [self.field.zero] * DIM[g]
        table = wedge_table(self.grade, other.grade)
        for ai, a in enumerate(self.coeffs):
            if a:
                for bi, oi, sign in table[ai]:
                    b = other.coeffs[bi]
                    if b:
                        out[oi] = out[oi] + a * b if sign > 0 else out[oi] - a * b
        return MultiVector(self.field, g, out)

    def normalized(self) -> "MultiVector":
        return MultiVector(self.field, self.grade, normalize_proj(self.coeffs))

    def ints(self) -> tuple[int, ...]:
        """Residue coordinates (base field only); used for JSON and hashing."""
        return tuple(c.lift() for c in self.coeffs)


def wedge(a: MultiVector, b: MultiVector) -> MultiVector:
    return a.wedge(b)


def omega(a: MultiVector, b: MultiVector) -> Fe:
    """Volume coefficient of a^b for two grade-3 multivectors."""
    if a.grade != 3 or b.grade != 3:
        raise InputError("omega is defined on grade-3 multivectors")
    if a.field != b.field:
        raise InputError("field mismatch")
    acc = a.field.zero
    for i, (j, s) in enumerate(OMEGA3):
        ai = a.coeffs[i]
        if ai:
            bj = b.coeffs[j]
            if bj:
                acc = acc + ai * bj if s > 0 else acc - ai * bj
    return acc


def omega_rows(rows: Sequence[Sequence[Fe]], field: Field) -> list[list[Fe]]:
    """Apply the symplectic pairing matrix on the right: row -> row . J."""
    out = []
    for r in rows:
        new = [field.zero] * DIM[3]
        for i, (j, s) in enumerate(OMEGA3):
            if r[i]:
                new[j] = r[i] if s > 0 else -r[i]
        out.append(new)
    return out


def covector_of_5form(w: MultiVector) -> tuple[Fe, ...]:
    """The element of W* with xi(x) = vol(w ^ x), for w of grade 5."""
    if w.grade != 5:
        raise InputError("expected a grade-5 multivector")
    return tuple(w.coeffs[pos] * s for pos, s in DUAL5)


# ---------------------------------------------------------------------------
# Subspaces of coordinate spaces


class Subspace:
    """Row space in canonical reduced echelon form over a Field."""

    __slots__ = ("field", "ambient", "rows", "pivots", "_np")

    def __init__(self, field: Field, ambient: int, rows: Sequence[Sequence]):
        self.field = field
        self.ambient = ambient
        mat = [[field.elt(c) for c in r] for r in rows]
        for r in mat:
            if len(r) != ambient:
                raise InputError("row length does not match ambient dimension")
        if field.k == 1 and mat:
            R, piv = linalg.rref_mod(
                np.array([[c.lift() for c in r] for r in mat], dtype=np.int64), field.p
            )
            self.rows = tuple(tuple(field.elt(int(x)) for x in row) for row in R)
            self.pivots = tuple(piv)
        else:
            R, piv = linalg.rref_ff(mat, field) if mat else ([], [])
            self.rows = tuple(tuple(r) for r in R)
            self.pivots = tuple(piv)
        self._np = None

    @property
    def dim(self) -> int:
        return len(self.rows)

    def np_rows(self) -> np.ndarray:
        if self._np is None:
            if self.field.k != 1:
                raise InputError("integer rows only exist over prime fields")
            self._np = np.array(
                [[c.lift() for c in r] for r in self.rows], dtype=np.int64
            ).reshape(self.dim, self.ambient)
        return self._np

    def key(self) -> tuple:
        return tuple(tuple(c.c for c in r) for r in self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.field == other.field
            and self.ambient == other.ambient
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field, self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient})"

    def reduce_vector(self, v: Sequence) -> tuple[Fe, ...]:
        """Remainder of v after elimination against the basis rows."""
        w = [self.field.elt(c) for c in v]
        for row, piv in zip(self.rows, self.pivots):
            f = w[piv]
            if f:
                w = [a - f * b for a, b in zip(w, row)]
        return tuple(w)

    def contains_vector(self, v: Sequence) -> bool:
        return not any(self.reduce_vector(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.rows)

    def member_coords(self, v: Sequence):
        """Coefficients of v over the basis rows, or None if v is outside."""
        w = [self.field.elt(c) for c in v]
        coords = []
        for row, piv in zip(self.rows, self.pivots):
            f = w[piv]
            coords.append(f)
            if f:
                w = [a - f * b for a, b in zip(w, row)]
        if any(w):
            return None
        return tuple(coords)

    def sum(self, other: "Subspace") -> "Subspace":
        self._compat(other)
        return Subspace(self.field, self.ambient, list(self.rows) + list(other.rows))

    def perp(self) -> "Subspace":
        """Orthogonal complement under the standard dot product."""
        if self.dim == 0:
            return Subspace(self.field, self.ambient, np.eye(self.ambient, dtype=np.int64).tolist())
        if self.field.k == 1:
            ns = linalg.nullspace_mod(self.np_rows(), self.field.p)
            return Subspace(self.field, self.ambient, ns.tolist())
        ns = linalg.nullspace_ff([list(r) for r in self.rows], self.field, self.ambient)
        return Subspace(self.field, self.ambient, ns)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._compat(other)
        return self.perp().sum(other.perp()).perp()

    def random_vector(self, rng) -> tuple[Fe, ...]:
        while True:
            cs = [self.field.random(rng) for _ in range(self.dim)]
            if any(cs):
                break
        out = [self.field.zero] * self.ambient
        for c, row in zip(cs, self.rows):
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return tuple(out)

    def map_field(self, target: Field) -> "Subspace":
        rows = [[target.elt(c.lift()) for c in r] for r in self.rows]
        return Subspace(target, self.ambient, rows)

    def _compat(self, other: "Subspace"):
        if self.field != other.field or self.ambient != other.ambient:
            raise InputError("ambient mismatch")


# ---------------------------------------------------------------------------
# The three Lagrangian families


def f_rows(v: Sequence[Fe], field: Field) -> list[list[Fe]]:
    """Coordinates of v ^ e_P for the 15 pair-subsets P; spans F_v = v ^ L2 W."""
    rows = [[field.zero] * DIM[3] for _ in range(DIM[2])]
    table = wedge_table(1, 2)
    for i, vi in enumerate(v):
        if vi:
            for bi, oi, sign in table[i]:
                rows[bi][oi] = rows[bi][oi] + vi if sign > 0 else rows[bi][oi] - vi
    return rows


def dual_cut_rows(h: Sequence[Fe], field: Field) -> list[list[Fe]]:
    """Covector rows h ^ e*_P cutting F'_h out of the grade-3 space.

    Same signed-index combinatorics as f_rows, read against the dual basis:
    x lies in F'_h exactly when every row pairs to zero with x.
    """
    return f_rows(h, field)


def t_rows(u_basis: Sequence[Sequence[Fe]], field: Field) -> list[list[Fe]]:
    """Coordinates of (u_a ^ u_b) ^ e_c spanning T_U = L2 U ^ W (18 rows)."""
    mvs = [MultiVector.from_vector(field, u) for u in u_basis]
    bivs = [mvs[0].wedge(mvs[1]), mvs[0].wedge(mvs[2]), mvs[1].wedge(mvs[2])]
    table = wedge_table(2, 1)
    rows: list[list[Fe]] = []
    for biv in bivs:
        crows = [[field.zero] * DIM[3] for _ in range(N)]
        for P_idx, bP in enumerate(biv.coeffs):
            if bP:
                for c, oi, sign in table[P_idx]:
                    crows[c][oi] = crows[c][oi] + bP if sign > 0 else crows[c][oi] - bP
        rows.extend(crows)
    return rows


def family_subspace(kind: str, datum, field: Field | None = None) -> Subspace:
    """Fiber of one of the three families as a 10-dimensional subspace.

    kind "F": datum is a nonzero vector of W (sequence or grade-1
    MultiVector); kind "Fdual": datum is a nonzero covector; kind "T": datum
    is a 3-dimensional Subspace of W.
    """
    if kind == "T":
        U: Subspace = datum
        if not isinstance(U, Subspace) or U.dim != 3 or U.ambient != N:
            raise InputError("T expects a 3-dimensional subspace of W")
        sub = Subspace(U.field, DIM[3], t_rows(U.rows, U.field))
        if sub.dim != 10:
            raise InternalError("T_U must have dimension 10")
        return sub
    if isinstance(datum, MultiVector):
        if datum.grade != 1:
            raise InputError("expected a grade-1 multivector")
        field = datum.field
        coords = datum.coeffs
    else:
        if field is None:
            raise InputError("field required when datum is a plain sequence")
        coords = tuple(field.elt(c) for c in datum)
    if not any(coords):
        raise InputError("zero datum")
    if kind == "F":
        sub = Subspace(field, DIM[3], f_rows(coords, field))
    elif kind == "Fdual":
        cut = dual_cut_rows(coords, field)
        if field.k == 1:
            m = np.array([[c.lift() for c in r] for r in cut], dtype=np.int64)
            ns = linalg.nullspace_mod(m, field.p)
            sub = Subspace(field, DIM[3], ns.tolist())
        else:
            ns = linalg.nullspace_ff(cut, field, DIM[3])
            sub = Subspace(field, DIM[3], ns)
    else:
        raise InputError(f"unknown family kind {kind!r}")
    if sub.dim != 10:
        raise InternalError(f"family fiber must have dimension 10, got {sub.dim}")
    return sub


# ---------------------------------------------------------------------------
# Orbit classification of 3-forms and the two fibrations


def _wedge1_matrix_rows(alpha: MultiVector) -> list[list[Fe]]:
    """Row i = coordinates of e_i ^ alpha on the grade-4 basis."""
    field = alpha.field
    table = wedge_table(1, 3)
    rows = []
    for i in range(N):
        row = [field.zero] * DIM[4]
        for bi, oi, sign in table[i]:
            c = alpha.coeffs[bi]
            if c:
                row[oi] = row[oi] + c if sign > 0 else row[oi] - c
        rows.append(row)
    return rows


def kernel_subspace(alpha: MultiVector) -> Subspace:
    """{w in W : w ^ alpha = 0} via the 6 x 15 wedge matrix."""
    if alpha.grade != 3:
        raise InputError("expected a grade-3 multivector")
    field = alpha.field
    rows = _wedge1_matrix_rows(alpha)
    # left kernel of the 6 x 15 matrix = right kernel of its transpose
    if field.k == 1:
        m = np.array([[c.lift() for c in r] for r in rows], dtype=np.int64).T
        ns = linalg.nullspace_mod(m, field.p)
        return Subspace(field, N, ns.tolist())
    mat_t = [list(col) for col in zip(*rows)]
    ns = linalg.nullspace_ff(mat_t, field, N)
    return Subspace(field, N, ns)


def classify(alpha: MultiVector) -> OrbitType:
    """GL-orbit type from the kernel dimension of w -> w ^ alpha."""
    if alpha.is_zero():
        return OrbitType.ZERO
    d = kernel_subspace(alpha).dim
    if d == 0:
        return OrbitType.GENERIC
    if d == 1:
        return OrbitType.OMEGA_OPEN
    if d == 3:
        return OrbitType.DECOMPOSABLE
    raise InternalError(f"impossible wedge-kernel dimension {d} (arithmetic bug)")


def solve_v_wedge(v: Sequence[Fe], target: MultiVector) -> MultiVector:
    """Some bivector beta with v ^ beta = target; raises if none exists."""
    field = target.field
    vv = tuple(field.elt(c) for c in v)
    cols = f_rows(vv, field)  # row P = coordinates of v ^ e_P
    if field.k == 1:
        m = np.array([[c.lift() for c in r] for r in cols], dtype=np.int64).T
        b = np.array([c.lift() for c in target.coeffs], dtype=np.int64)
        sol = linalg.solve_mod(m, b, field.p)
        if sol is None:
            raise InternalError("no bivector solves v ^ beta = alpha")
        return MultiVector(field, 2, [int(x) for x in sol])
    mat = [list(col) for col in zip(*cols)]
    sol = linalg.solve_ff(mat, list(target.coeffs), field)
    if sol is None:
        raise InternalError("no bivector solves v ^ beta = alpha")
    return MultiVector(field, 2, sol)


def phi_pair(alpha: MultiVector) -> tuple[tuple[Fe, ...], tuple[Fe, ...]]:
    """The two fibration images ([v], [H]) of a middle-orbit 3-form.

    v spans the wedge kernel; H is the covector of v ^ beta ^ beta for any
    solution beta of v ^ beta = alpha (the class does not depend on beta).
    Both are scaled so their first nonzero coordinate is 1.
    """
    ker = kernel_subspace(alpha)
    if alpha.is_zero() or ker.dim != 1:
        raise InputError("phi_pair needs a middle-orbit (OmegaOpen) form")
    v = ker.rows[0]
    beta = solve_v_wedge(v, alpha)
    w5 = alpha.wedge(beta)
    if w5.is_zero():
        raise InternalError("degenerate 5-form for an OmegaOpen input")
    return normalize_proj(v), normalize_proj(covector_of_5form(w5))


def gl_action_matrix(g_rows: Sequence[Sequence], field: Field, grade: int = 3) -> list[list[Fe]]:
    """Matrix of the induced action of g on grade-k coordinates.

    Convention: result[out][in]; apply to coordinate columns with
    apply_matrix.  g_rows is the matrix of g on W (rows = equations,
    columns = images of basis vectors read down the columns).
    """
    g = [[field.elt(c) for c in row] for row in g_rows]
    imgs = [MultiVector.from_vector(field, [g[r][i] for r in range(N)]) for i in range(N)]
    cols = []
    for T in SUBSETS[grade]:
        mv = imgs[T[0]]
        for i in T[1:]:
            mv = mv.wedge(imgs[i])
        cols.append(list(mv.coeffs))
    return [list(row) for row in zip(*cols)]


def apply_matrix(mat: Sequence[Sequence[Fe]], vec: Sequence[Fe], field: Field) -> tuple[Fe, ...]:
    out = []
    for row in mat:
        acc = field.zero
        for a, b in zip(row, vec):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return tuple(out)
