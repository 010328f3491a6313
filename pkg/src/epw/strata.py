"""Rank oracles, stratum classification and pencil scans for the families.

Membership in a degeneracy stratum is always decided by exact rank.  Along a
pencil the same data is packaged as a matrix with entries linear in the
parameter: the gcd of random corank minors (a univariate "secancy
polynomial") locates the deeper stratum, every root is re-verified by the
rank oracle, and on small fields an exhaustive pointwise scan provides a
fully independent cross-check.  The point at infinity is tracked separately
via the degree defect of the minors, so length counts are projective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DegeneracyError, InputError, InternalError
from .exterior import (
    DIM,
    J20,
    MultiVector,
    Subspace,
    family_subspace,
    f_rows,
    t_rows,
    dual_cut_rows,
    wedge_table,
)
from .field import SCAN_ORDER_LIMIT, Fe, Field, derive_rng, derive_seed, normalize_proj
from .lagrangian import AMBIENT, Lagrangian
from .poly import UniPoly, factor_profile, gcd as poly_gcd, lagrange, roots_by_gcd, squarefree_part

INF = "inf"

FAMILY_TARGETS = {"F": 3, "Fdual": 3, "T": 4}  # deep strata excluded for generic A


def _tensor_w21() -> np.ndarray:
    T = np.zeros((DIM[2], 6, DIM[3]), dtype=np.int64)
    for i in range(6):
        for P_idx, T_idx, s in wedge_table(1, 2)[i]:
            T[P_idx, i, T_idx] = s
    return T


def _tensor_w12() -> np.ndarray:
    T = np.zeros((DIM[2], 6, DIM[3]), dtype=np.int64)
    for P_idx in range(DIM[2]):
        for c, T_idx, s in wedge_table(2, 1)[P_idx]:
            T[P_idx, c, T_idx] = s
    return T


def _tensor_w11() -> np.ndarray:
    T = np.zeros((6, 6, DIM[2]), dtype=np.int64)
    for i in range(6):
        for j, P_idx, s in wedge_table(1, 1)[i]:
            T[i, j, P_idx] = s
    return T


_W21 = _tensor_w21()
_W12 = _tensor_w12()
_W11 = _tensor_w11()

_VAND_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _vand_inv(npts: int, p: int) -> np.ndarray:
    key = (npts, p)
    if key not in _VAND_CACHE:
        _VAND_CACHE[key] = linalg.vandermonde_inv_mod(npts, p)
    return _VAND_CACHE[key]


def _np_vec(v: Sequence[Fe]) -> np.ndarray:
    return np.array([c.lift() for c in v], dtype=np.int64)


def fast_roots(g: UniPoly) -> list[int]:
    """Roots of a prime-field polynomial by vectorized evaluation scan."""
    field = g.field
    if field.k != 1 or field.order > SCAN_ORDER_LIMIT:
        return [int(r) for r in roots_by_gcd(g)]
    p = field.p
    ts = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(g.coeffs):
        acc = (acc * ts + c.lift()) % p
    return [int(t) for t in np.nonzero(acc == 0)[0]]


def family_fiber(field: Field, kind: str, datum) -> Subspace:
    """family_subspace with plain-sequence data allowed for F / Fdual."""
    if kind == "T":
        return family_subspace("T", datum)
    return family_subspace(kind, datum, field)


# ---------------------------------------------------------------------------
# Point operations


@dataclass
class StratumReport:
    kind: str
    datum: object
    k: int

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, "k": self.k}


def intersect_dim(S1: Subspace, S2: Subspace) -> int:
    """dim S1 + dim S2 - rank of the stacked bases."""
    if S1.ambient != S2.ambient or S1.field != S2.field:
        raise InputError("ambient mismatch")
    field = S1.field
    rows = list(S1.rows) + list(S2.rows)
    if not rows:
        return 0
    if field.k == 1:
        m = np.array([[c.lift() for c in r] for r in rows], dtype=np.int64)
        r = linalg.rank_mod(m, field.p)
    else:
        r = linalg.rank_ff([list(x) for x in rows], field)
    return S1.dim + S2.dim - r


def stratum(A: Lagrangian | Subspace, kind: str, datum) -> StratumReport:
    """k = dim(family fiber at datum meet A), by stacked-basis rank."""
    space = A.space if isinstance(A, Lagrangian) else A
    fiber = family_fiber(space.field, kind, datum)
    return StratumReport(kind, datum, intersect_dim(space, fiber))


# ---------------------------------------------------------------------------
# Flag lines in G(3, W)


class GLine:
    """The pencil of 3-spaces {U : V subset U subset P}, dim V = 2, dim P = 4."""

    def __init__(self, V: Subspace, P: Subspace):
        if V.ambient != 6 or P.ambient != 6 or V.dim != 2 or P.dim != 4:
            raise InputError("flag line needs dim-2 V inside dim-4 P in W")
        if not P.contains_subspace(V):
            raise InputError("V must be contained in P")
        self.V = V
        self.P = P
        comp = []
        cur = V
        for row in P.rows:
            if not cur.contains_vector(row):
                comp.append(row)
                cur = cur.sum(Subspace(V.field, 6, [row]))
        if len(comp) != 2:
            raise InternalError("failed to complete V inside P")
        self.p0, self.p1 = comp

    @property
    def field(self) -> Field:
        return self.V.field

    def U_at(self, t) -> Subspace:
        if t == INF:
            extra = self.p1
        else:
            tt = self.field.elt(t)
            extra = tuple(a + tt * b for a, b in zip(self.p0, self.p1))
        return Subspace(self.field, 6, list(self.V.rows) + [extra])

    def key(self) -> tuple:
        return (self.V.key(), self.P.key())


def random_pencil(field: Field, kind: str, rng):
    """A random scan datum: vector/covector pencil or a random flag line."""
    if kind in ("F", "Fdual"):
        while True:
            d0 = tuple(field.random(rng) for _ in range(6))
            d1 = tuple(field.random(rng) for _ in range(6))
            m = Subspace(field, 6, [d0, d1])
            if m.dim == 2:
                return (d0, d1)
    if kind == "T":
        while True:
            rows = [tuple(field.random(rng) for _ in range(6)) for _ in range(4)]
            V = Subspace(field, 6, rows[:2])
            P = Subspace(field, 6, rows)
            if V.dim == 2 and P.dim == 4:
                return GLine(V, P)
    raise InputError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# Pencil pairing matrices (prime fields; entries linear in the parameter)


class PencilPairing:
    """M(t) with dim(fiber(t) meet A) = 10 - rank M(t).

    For F and T the rows are omega-pairings of a fiber spanning set against
    a basis of A (fibers are Lagrangian, so pairing to zero with all of A
    characterizes membership in A); for Fdual the rows are the dual-basis
    cut equations of the fiber paired against A directly.
    """

    def __init__(self, A: Lagrangian | Subspace, kind: str, pencil):
        space = A.space if isinstance(A, Lagrangian) else A
        if space.field.k != 1:
            raise InputError("pencil scans run over prime fields")
        if space.ambient != AMBIENT or space.dim != 10:
            raise InputError("scan needs a 10-dimensional subspace of the grade-3 space")
        self.field = space.field
        self.p = space.field.p
        self.kind = kind
        self.pencil = pencil
        At = space.np_rows().T  # 20 x 10
        p = self.p
        if kind in ("F", "Fdual"):
            d0, d1 = pencil
            R0 = np.einsum("pit,i->pt", _W21, _np_vec(d0)) % p
            R1 = np.einsum("pit,i->pt", _W21, _np_vec(d1)) % p
            # fully linear rows: the chart around infinity just swaps endpoints
            R0r, R1r = R1, R0
        elif kind == "T":
            gl: GLine = pencil
            w1, w2 = (_np_vec(r) for r in gl.V.rows)
            u0, u1 = _np_vec(gl.p0), _np_vec(gl.p1)
            b12 = np.einsum("ijp,i,j->p", _W11, w1, w2) % p
            b1u0 = np.einsum("ijp,i,j->p", _W11, w1, u0) % p
            b1u1 = np.einsum("ijp,i,j->p", _W11, w1, u1) % p
            b2u0 = np.einsum("ijp,i,j->p", _W11, w2, u0) % p
            b2u1 = np.einsum("ijp,i,j->p", _W11, w2, u1) % p
            zero = np.zeros(DIM[2], dtype=np.int64)

            def rows_of(bivs):
                return np.concatenate(
                    [np.einsum("pct,p->ct", _W12, b) % p for b in bivs], axis=0
                )

            # the w1^w2 block is constant in the parameter, so the pencil of
            # matrices is not homogeneous: infinity needs its own chart with
            # the roles of the two completion vectors swapped
            R0 = rows_of([b12, b1u0, b2u0])
            R1 = rows_of([zero, b1u1, b2u1])
            R0r = rows_of([b12, b1u1, b2u1])
            R1r = rows_of([zero, b1u0, b2u0])
        else:
            raise InputError(f"unknown family kind {kind!r}")
        if kind == "Fdual":
            self.M0, self.M1 = R0 @ At % p, R1 @ At % p
            self.M0r, self.M1r = R0r @ At % p, R1r @ At % p
        else:
            self.M0 = R0 @ J20 % p @ At % p
            self.M1 = R1 @ J20 % p @ At % p
            self.M0r = R0r @ J20 % p @ At % p
            self.M1r = R1r @ J20 % p @ At % p
        self.R0, self.R1, self.R0r, self.R1r = R0, R1, R0r, R1r
        self.nrows = self.M0.shape[0]

    def matrix_at(self, t) -> np.ndarray:
        if t == INF:
            return self.M0r
        return (self.M0 + int(t) * self.M1) % self.p

    def corank_at(self, t) -> int:
        return 10 - linalg.rank_mod(self.matrix_at(t), self.p)

    def datum_at(self, t):
        if self.kind in ("F", "Fdual"):
            d0, d1 = self.pencil
            if t == INF:
                return tuple(d1)
            tt = self.field.elt(t)
            return tuple(a + tt * b for a, b in zip(d0, d1))
        return self.pencil.U_at(t)

    def minor_upoly(self, rng) -> tuple[UniPoly, int] | None:
        """One compressed s x s corank minor as (affine poly, inf multiplicity).

        det(G M(t) H) for random compressions G, H is a random linear
        combination of all s x s minors (Cauchy-Binet), so it avoids the
        structured row dependencies of normal-form pencils while still being
        divisible by the stratum divisor.  The affine part is interpolated on
        the finite chart; the multiplicity at infinity is the order of
        vanishing at the origin in the chart around infinity.  Returns None
        when the compression vanishes identically along the pencil.
        """
        s = self._minor_size
        p = self.p
        G = np.array([[rng.randrange(p) for _ in range(self.nrows)] for _ in range(s)], dtype=np.int64)
        H = np.array([[rng.randrange(p) for _ in range(s)] for _ in range(10)], dtype=np.int64)
        npts = s + 1
        ts = np.arange(npts, dtype=np.int64)
        C0 = G @ self.M0 % p @ H % p
        C1 = G @ self.M1 % p @ H % p
        stack = (C0[None, :, :] + ts[:, None, None] * C1[None, :, :]) % p
        vals = linalg.batch_det_mod(stack, p)
        if not vals.any():
            return None
        coeffs = _vand_inv(npts, p) @ vals % p
        g = UniPoly(self.field, [int(c) for c in coeffs])
        C0r = G @ self.M0r % p @ H % p
        C1r = G @ self.M1r % p @ H % p
        stack_r = (C0r[None, :, :] + ts[:, None, None] * C1r[None, :, :]) % p
        vals_r = linalg.batch_det_mod(stack_r, p)
        coeffs_r = _vand_inv(npts, p) @ vals_r % p
        gr = UniPoly(self.field, [int(c) for c in coeffs_r])
        if gr.is_zero():
            raise InternalError("compression vanishes at infinity chart but not affinely")
        val0 = next(i for i, c in enumerate(gr.coeffs) if c)
        return g, val0

    def set_minor_size(self, target_k: int):
        self._minor_size = 11 - target_k
        if not 1 <= self._minor_size <= min(self.nrows, 10):
            raise InputError("target corank out of range for this family")


# ---------------------------------------------------------------------------
# Line scans


@dataclass
class LineScan:
    kind: str
    target_k: int
    pencil: object
    secancy: UniPoly
    inf_mult: int
    identically_zero: bool
    hits: dict
    profile: list
    squarefree: bool
    points_strata: dict | None
    consistent: bool
    minors_used: int

    @property
    def projective_degree(self) -> int | None:
        if self.identically_zero:
            return None
        return self.secancy.degree + self.inf_mult

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "target_k": self.target_k,
            "identically_zero": self.identically_zero,
            "secancy_coeffs": [c.lift() for c in self.secancy.coeffs],
            "inf_mult": self.inf_mult,
            "projective_degree": self.projective_degree,
            "profile": list(self.profile),
            "squarefree": self.squarefree,
            "hits": {str(t): k for t, k in sorted(self.hits.items(), key=lambda kv: str(kv[0]))},
            "consistent": self.consistent,
        }


def _pointwise_scan(A, kind: str, pencil, pp: PencilPairing) -> dict:
    """Official rank-oracle strata at every t in GF(p) and infinity."""
    space = A.space if isinstance(A, Lagrangian) else A
    p = space.field.p
    out: dict = {}
    if kind == "Fdual":
        for t in list(range(p)) + [INF]:
            out[t] = stratum(space, kind, pp.datum_at(t)).k
        return out
    ts = np.arange(p, dtype=np.int64)
    R = (pp.R0[None, :, :] + ts[:, None, None] * pp.R1[None, :, :]) % p
    Rinf = pp.R0r[None, :, :]
    R = np.concatenate([R, Rinf], axis=0)
    # fibers have dimension 10 for every valid pencil datum; spot-check it
    for probe in (0, R.shape[0] - 1):
        if linalg.rank_mod(R[probe], p) != 10:
            raise InternalError("family spanning rows do not span a 10-space")
    Astack = np.broadcast_to(space.np_rows()[None, :, :], (R.shape[0], 10, AMBIENT))
    stacked = np.concatenate([R, Astack], axis=1)
    tot_ranks = linalg.batch_rank_mod(stacked, p)
    for i in range(p):
        out[i] = int(20 - tot_ranks[i])
    out[INF] = int(20 - tot_ranks[p])
    return out


def line_scan(
    A: Lagrangian | Subspace,
    kind: str,
    pencil,
    target_k: int,
    *,
    minors: int = 6,
    retries: int = 4,
    seed=0,
    exhaustive: bool | None = None,
) -> LineScan:
    """Locate the stratum >= target_k points of a pencil.

    The secancy polynomial is the gcd of random corank minors along the
    pencil, grown until it stabilizes; its base-field roots (and the point at
    infinity, when the degree defect says so) are verified against the rank
    oracle, with fresh minors drawn on any mismatch.  On fields of order
    <= 2^16 an exhaustive pointwise scan is stored and compared unless
    disabled.
    """
    space = A.space if isinstance(A, Lagrangian) else A
    field = space.field
    pp = PencilPairing(A, kind, pencil)
    pp.set_minor_size(target_k)
    if exhaustive is None:
        exhaustive = field.order <= SCAN_ORDER_LIMIT
    points_strata = _pointwise_scan(A, kind, pencil, pp) if exhaustive else None

    last_error = "no attempt"
    for attempt in range(retries):
        rng = derive_rng("linescan", seed, attempt)
        g = None
        inf_mult = None
        stable = 0
        drawn = 0
        zero_draws = 0
        while drawn < minors or (stable < 3 and drawn < 4 * minors):
            res = pp.minor_upoly(rng)
            if res is None:
                zero_draws += 1
                if zero_draws >= 3 * minors:
                    break
                continue
            drawn += 1
            m, defect = res
            if g is None:
                g, inf_mult = m.monic(), defect
                stable = 0
                continue
            ng = poly_gcd(g, m)
            ninf = min(inf_mult, defect)
            if ng == g and ninf == inf_mult:
                stable += 1
            else:
                stable = 0
            g, inf_mult = ng, ninf
            if g.degree == 0 and inf_mult == 0:
                break
        if g is None:
            # every sampled minor vanished: the whole pencil sits in the stratum
            probe_ts = [t % field.p for t in range(7)] + [INF]
            if all(pp.corank_at(t) >= target_k for t in probe_ts):
                scan = LineScan(
                    kind, target_k, pencil, UniPoly(field), 0, True, {}, [], False,
                    points_strata, True, drawn,
                )
                if points_strata is not None and any(v < target_k for v in points_strata.values()):
                    raise DegeneracyError("zero secancy but pointwise scan found a shallow point")
                return scan
            last_error = "minors vanish but probes disagree"
            continue
        hits: dict = {}
        ok = True
        if g.degree > 0:
            for r in fast_roots(g):
                k = stratum(space, kind, pp.datum_at(r)).k
                if k >= target_k:
                    hits[r] = k
                else:
                    ok = False
                    break
        if ok and inf_mult > 0:
            k = stratum(space, kind, pp.datum_at(INF)).k
            if k >= target_k:
                hits[INF] = k
            else:
                ok = False
        if ok and points_strata is not None:
            expect = {t for t, k in points_strata.items() if k >= target_k}
            if expect != set(hits):
                ok = False
                last_error = "pointwise scan disagrees with secancy roots"
        if ok:
            sf = squarefree_part(g) if g.degree > 0 else g
            profile = (factor_profile(g) if g.degree > 0 else []) + [1] * inf_mult
            return LineScan(
                kind,
                target_k,
                pencil,
                g,
                inf_mult,
                False,
                hits,
                profile,
                (g.degree == sf.degree) and inf_mult <= 1,
                points_strata,
                True,
                drawn,
            )
        last_error = last_error if last_error != "no attempt" else "root failed rank verification"
    raise DegeneracyError(f"secancy polynomial inconsistent after {retries} attempts: {last_error}")


# ---------------------------------------------------------------------------
# Sampling the rank-1 stratum of the F family


def sample_points_on_X(
    A: Lagrangian,
    count: int,
    seed=0,
    max_pencils: int = 4000,
    skip: int = 0,
) -> list[tuple[tuple[Fe, ...], int]]:
    """Distinct projective points with stratum >= 1, scanned off random pencils.

    Returns (point, k) pairs in discovery order; `skip` discards the first
    matches so disjoint batches can be drawn from one deterministic stream.
    """
    field = A.field
    rng = derive_rng("sampleX", field.p, seed)
    found: list[tuple[tuple[Fe, ...], int]] = []
    seen: set[tuple[int, ...]] = set()
    kept = 0
    for _ in range(max_pencils):
        if len(found) >= count:
            return found
        pencil = random_pencil(field, "F", rng)
        pp = PencilPairing(A, "F", pencil)
        pp.set_minor_size(1)
        res = pp.minor_upoly(rng)
        if res is None:
            continue
        g, defect = res
        cands: list = []
        if g.degree > 0:
            cands.extend(fast_roots(g))
        if defect > 0:
            cands.append(INF)
        for t in cands:
            k = pp.corank_at(t)
            if k < 1:
                continue
            pt = normalize_proj(pp.datum_at(t))
            key = tuple(c.lift() for c in pt)
            if key in seen:
                continue
            seen.add(key)
            kept += 1
            if kept <= skip:
                continue
            found.append((pt, k))
            if len(found) >= count:
                return found
    raise DegeneracyError(f"pencil budget exhausted after {max_pencils} pencils")


def sample_on_X(A: Lagrangian, seed=0, budget: int = 500) -> StratumReport:
    """One sampled point of the F-degeneracy hypersurface, smooth preferred."""
    pts = sample_points_on_X(A, 40, seed=seed, max_pencils=budget)
    for pt, k in pts:
        if k == 1:
            return StratumReport("F", pt, 1)
    pt, k = pts[0]
    return StratumReport("F", pt, k)


# ---------------------------------------------------------------------------
# Interpolated equation of the rank-1 hypersurface


def sextic_interpolate(
    A: Lagrangian,
    seed=0,
    *,
    margin: int = 40,
    validate: int = 1000,
    d2_points: Sequence | None = None,
):
    """Degree-6 form of the rank->=1 locus by nullspace interpolation.

    Every sample point is certified by the rank oracle before being used;
    the form is re-validated on fresh oracle-certified points, and its
    gradient is checked to vanish at any supplied rank-2 points (the sampled
    singular surface).
    """
    from .mpoly import interpolate_form, monomials_of_degree

    field = A.field
    if field.k != 1:
        raise InputError("interpolation runs over prime fields")
    n_monos = len(monomials_of_degree(6))
    need = n_monos + margin
    pts = sample_points_on_X(A, need + validate, seed=seed)
    sample = [pt for pt, _ in pts[:need]]
    f = interpolate_form(sample, 6, field, margin=margin)
    if validate:
        fresh = np.array([[c.lift() for c in pt] for pt, _ in pts[need:]], dtype=np.int64)
        vals = f.evaluate_many(fresh)
        if np.any(vals % field.p):
            raise InternalError("interpolated sextic fails on fresh oracle points")
    for pt in d2_points or []:
        grad = gradient_at(f, pt)
        if any(grad):
            raise DegeneracyError("gradient does not vanish at a supplied rank-2 point")
    return f


def gradient_at(f, point: Sequence[Fe]) -> tuple[Fe, ...]:
    """The gradient covector of f at a point (any field extending f's)."""
    pf = point[0].field if isinstance(point[0], Fe) else f.field
    poly = f if pf == f.field else f.map_field(pf)
    return tuple(poly.partial(i).evaluate(point) for i in range(6))


# ---------------------------------------------------------------------------
# Tangent planes to the rank-2 surface


def tangent_plane_D2(A: Lagrangian, f, point: Sequence[Fe]) -> Subspace:
    """Affine tangent 3-space to the rank-2 surface at an ordinary point.

    Primary route: kernel of the Hessian of the interpolated sextic, which
    must have rank exactly 3.  Cross-check: directions w with
    omega(w ^ gamma_i, kappa_j) = 0 for kappa_i = point ^ gamma_i spanning
    the rank-2 fiber intersection.  The two planes must agree exactly.
    """
    pf: Field = point[0].field
    space = A.space if pf == A.field else A.space.map_field(pf)
    rep = intersect_dim(space, family_fiber(pf, "F", point))
    if rep != 2:
        raise InputError(f"tangent planes need a rank-2 point, got rank {rep}")
    poly = f if pf == f.field else f.map_field(pf)
    grad = tuple(poly.partial(i).evaluate(point) for i in range(6))
    if any(grad):
        raise InputError("gradient must vanish at a rank-2 point")
    hess = [[poly.partial(i).partial(j).evaluate(point) for j in range(6)] for i in range(6)]
    if pf.k == 1:
        m = np.array([[c.lift() for c in row] for row in hess], dtype=np.int64)
        if linalg.rank_mod(m, pf.p) != 3:
            raise DegeneracyError("Hessian rank is not 3: not an ordinary rank-2 point")
        ker = linalg.nullspace_mod(m, pf.p).tolist()
    else:
        if linalg.rank_ff(hess, pf) != 3:
            raise DegeneracyError("Hessian rank is not 3: not an ordinary rank-2 point")
        ker = linalg.nullspace_ff(hess, pf, 6)
    plane = Subspace(pf, 6, ker)
    if not plane.contains_vector(point):
        raise InternalError("Hessian kernel does not contain the base point")
    pairing_plane = _tangent_plane_pairing(space, pf, point)
    if plane != pairing_plane:
        raise InternalError("Hessian-kernel and pairing tangent planes disagree")
    return plane


def _tangent_plane_pairing(space: Subspace, pf: Field, point: Sequence[Fe]) -> Subspace:
    from .exterior import omega as omega3, solve_v_wedge

    fiber = family_fiber(pf, "F", point)
    inter = space.intersect(fiber)
    if inter.dim != 2:
        raise InternalError("rank-2 fiber intersection expected")
    kappas = [MultiVector(pf, 3, r) for r in inter.rows]
    gammas = [solve_v_wedge(point, k) for k in kappas]
    rows = []
    for i in range(2):
        for j in range(i, 2):
            row = []
            for w in range(6):
                ew = MultiVector.basis(pf, (w,))
                row.append(omega3(ew.wedge(gammas[i]), kappas[j]))
            rows.append(row)
    ker = (
        linalg.nullspace_mod(np.array([[c.lift() for c in r] for r in rows], dtype=np.int64), pf.p).tolist()
        if pf.k == 1
        else linalg.nullspace_ff(rows, pf, 6)
    )
    return Subspace(pf, 6, ker)
