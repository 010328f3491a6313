"""Exact linear algebra over finite fields.

Two parallel implementations: a vectorized numpy path for prime fields
(entries are int64 residues in [0, p); p < 2^20 so products never overflow)
and a generic path over Fe entries that also covers extension fields.  All
reductions are plain Gauss-Jordan with first-nonzero pivoting, so echelon
forms are canonical and equal subspaces get identical bases.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .field import Fe, Field

# ---------------------------------------------------------------------------
# numpy / prime-field path


def as_np(rows, p: int) -> np.ndarray:
    a = np.asarray(rows, dtype=np.int64)
    return np.mod(a, p)


def rref_mod(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns, in place on a copy."""
    A = np.mod(np.asarray(M, dtype=np.int64), p).copy()
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = A[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = A[r] * inv % p
        rows = np.nonzero(A[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            A[rows] = (A[rows] - np.outer(A[rows, c], A[r])) % p
        pivots.append(c)
        r += 1
    return A[: len(pivots)], pivots

def rank_mod(M: np.ndarray, p: int) -> int:
    return len(rref_mod(M, p)[1])


def batch_rank_mod(stack: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a (B, m, n) stack of matrices, eliminated in lockstep."""
    A = np.mod(np.asarray(stack, dtype=np.int64), p).copy()
    B, m, n = A.shape
    r = np.zeros(B, dtype=np.int64)
    rows_idx = np.arange(m)
    for c in range(n):
        col = A[:, :, c]
        eligible = (col != 0) & (rows_idx[None, :] >= r[:, None])
        has = eligible.any(axis=1)
        if not has.any():
            continue
        piv = np.where(eligible, rows_idx[None, :], m).min(axis=1)
        bs = np.nonzero(has)[0]
        pb = piv[bs]
        rb = r[bs]
        # swap pivot row into position r
        tmp = A[bs, rb].copy()
        A[bs, rb] = A[bs, pb]
        A[bs, pb] = tmp
        pivvals = A[bs, rb, c]
        invs = np.array([pow(int(v), p - 2, p) for v in pivvals], dtype=np.int64)
        A[bs, rb] = A[bs, rb] * invs[:, None] % p
        # eliminate the column everywhere except the pivot row
        factors = A[bs, :, c].copy()
        factors[np.arange(len(bs)), rb] = 0
        A[bs] = (A[bs] - factors[:, :, None] * A[bs, rb][:, None, :]) % p
        r[bs] += 1
        if (r == m).all():
            break
    return r


def batch_det_mod(stack: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a (B, n, n) stack, eliminated in lockstep."""
    A = np.mod(np.asarray(stack, dtype=np.int64), p).copy()
    B, n, _ = A.shape
    det = np.ones(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    rows_idx = np.arange(n)
    for c in range(n):
        col = A[:, :, c]
        eligible = (col != 0) & (rows_idx[None, :] >= c) & alive[:, None]
        has = eligible.any(axis=1)
        det[alive & ~has] = 0
        alive &= has
        if not alive.any():
            break
        piv = np.where(eligible, rows_idx[None, :], n).min(axis=1)
        bs = np.nonzero(alive)[0]
        pb = piv[bs]
        swap = pb != c
        det[bs[swap]] = (-det[bs[swap]]) % p
        tmp = A[bs, c].copy()
        A[bs, c] = A[bs, pb]
        A[bs, pb] = tmp
        pivvals = A[bs, c, c]
        det[bs] = det[bs] * pivvals % p
        invs = np.array([pow(int(v), p - 2, p) for v in pivvals], dtype=np.int64)
        below = A[bs, c + 1 :, c] * invs[:, None] % p
        A[bs, c + 1 :, :] = (A[bs, c + 1 :, :] - below[:, :, None] * A[bs, c][:, None, :]) % p
    return det % p


def vandermonde_inv_mod(npts: int, p: int) -> np.ndarray:
    """Inverse of the Vandermonde matrix on nodes 0..npts-1 over GF(p)."""
    V = np.array([[pow(i, j, p) for j in range(npts)] for i in range(npts)], dtype=np.int64)
    return inv_mod_matrix(V, p)


def nullspace_mod(M: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of the right kernel {x : M x = 0}."""
    A = np.mod(np.asarray(M, dtype=np.int64), p)
    m, n = A.shape
    R, pivots = rref_mod(A, p)
    free = [c for c in range(n) if c not in pivots]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for i, pc in enumerate(pivots):
            out[k, pc] = (-int(R[i, fc])) % p
    return out


def solve_mod(M: np.ndarray, b: np.ndarray, p: int):
    """One particular solution of M x = b, or None if inconsistent."""
    A = np.mod(np.asarray(M, dtype=np.int64), p)
    bb = np.mod(np.asarray(b, dtype=np.int64), p).reshape(-1, 1)
    aug = np.hstack([A, bb])
    R, pivots = rref_mod(aug, p)
    n = A.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n]
    return x


def det_mod(M: np.ndarray, p: int) -> int:
    A = np.mod(np.asarray(M, dtype=np.int64), p).copy()
    n = A.shape[0]
    if A.shape != (n, n):
        raise InputError("determinant needs a square matrix")
    det = 1
    for c in range(n):
        nz = np.nonzero(A[c:, c])[0]
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            A[[c, i]] = A[[i, c]]
            det = -det
        piv = int(A[c, c])
        det = det * piv % p
        inv = pow(piv, p - 2, p)
        rows = np.nonzero(A[c + 1 :, c])[0] + c + 1
        if rows.size:
            factors = A[rows, c] * inv % p
            A[rows] = (A[rows] - np.outer(factors, A[c])) % p
    return det % p


def inv_mod_matrix(M: np.ndarray, p: int) -> np.ndarray:
    A = np.mod(np.asarray(M, dtype=np.int64), p)
    n = A.shape[0]
    aug = np.hstack([A, np.eye(n, dtype=np.int64)])
    R, pivots = rref_mod(aug, p)
    if pivots != list(range(n)):
        raise InputError("matrix is singular")
    return R[:, n:]


# ---------------------------------------------------------------------------
# generic Fe path


def rref_ff(rows: list[list[Fe]], field: Field) -> tuple[list[list[Fe]], list[int]]:
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
        inv = A[r][c].inverse()
        A[r] = [inv * x for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[: len(pivots)], pivots


def rank_ff(rows: list[list[Fe]], field: Field) -> int:
    return len(rref_ff(rows, field)[1])


def nullspace_ff(rows: list[list[Fe]], field: Field, ncols: int) -> list[list[Fe]]:
    R, pivots = rref_ff(rows, field) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        v = [field.zero] * ncols
        v[fc] = field.one
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        out.append(v)
    return out


def solve_ff(rows: list[list[Fe]], b: list[Fe], field: Field):
    n = len(rows[0])
    aug = [list(r) + [bb] for r, bb in zip(rows, b)]
    R, pivots = rref_ff(aug, field)
    if n in pivots:
        return None
    x = [field.zero] * n
    for i, pc in enumerate(pivots):
        x[pc] = R[i][n]
    return x


def det_ff(rows: list[list[Fe]], field: Field) -> Fe:
    A = [list(r) for r in rows]
    n = len(A)
    det = field.one
    for c in range(n):
        piv = None
        for i in range(c, n):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            return field.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        inv = A[c][c].inverse()
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det
