"""The incidence correspondence between the two degeneracy loci.

For a 3-space U, the chart of T_U by a 3x3 matrix plus a cone coordinate
realizes the rank-2 secant cubic as a determinant; the pencil P(A) n P(T_U)
meets it in the 3:1 fiber.  Over a smooth point [v] of the rank-1
hypersurface, the unique point p of P(A) n P(F_v) cuts a quadric threefold
Q_p of 3-spaces inside a G(2,4), and the fiber surface is its quartic
section by the rank-2 family locus; lines inside Q_p are scanned for it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DegeneracyError, InputError, InternalError
from .exterior import (
    MultiVector,
    OrbitType,
    Subspace,
    classify,
    family_subspace,
    kernel_subspace,
    phi_pair,
)
from .field import Fe, Field, build_extension, derive_rng, normalize_proj
from .lagrangian import Lagrangian
from .poly import UniPoly, factor_profile, roots_in_extension, squarefree_part
from .strata import GLine, INF, fast_roots, intersect_dim, line_scan, stratum

QPAIRS = tuple(itertools.combinations(range(4), 2))


class CubeModel:
    """Linear chart T_U ~ (3x3 matrices) + (cone coordinate).

    Writing hat(u_i) for the signed complementary bivectors of a basis of U
    and (w_1, w_2, w_3) for a complement basis of W, a general element is
    sum m_ij hat(u_i)^w_j + c u_1^u_2^u_3; the rank-2 locus is det m = 0 and
    the cone coordinate c never enters.
    """

    def __init__(self, U: Subspace, complement_rows: Sequence[Sequence] | None = None):
        if U.ambient != 6 or U.dim != 3:
            raise InputError("chart needs a 3-dimensional subspace of W")
        field = U.field
        self.field = field
        self.U = U
        if complement_rows is None:
            comp = [tuple(field.one if j == c else field.zero for j in range(6))
                    for c in range(6) if c not in U.pivots]
        else:
            comp = [tuple(field.elt(c) for c in r) for r in complement_rows]
        if Subspace(field, 6, list(U.rows) + list(comp)).dim != 6:
            raise InputError("complement rows do not complete U to a basis of W")
        self.complement = comp
        u = [MultiVector.from_vector(field, r) for r in U.rows]
        w = [MultiVector.from_vector(field, r) for r in comp]
        hats = [u[1].wedge(u[2]), u[2].wedge(u[0]), u[0].wedge(u[1])]
        self.basis: list[MultiVector] = []
        for i in range(3):
            for j in range(3):
                self.basis.append(hats[i].wedge(w[j]))
        self.cone = u[0].wedge(u[1]).wedge(u[2])
        self.basis.append(self.cone)
        cols = [list(mv.coeffs) for mv in self.basis]
        self._solve_cols = [list(col) for col in zip(*cols)]  # 20 x 10

    def chart(self, alpha: MultiVector) -> tuple[list[list[Fe]], Fe]:
        """(3x3 matrix, cone coordinate) of a trivector of T_U."""
        field = self.field
        if field.k == 1:
            m = np.array([[c.lift() for c in row] for row in self._solve_cols], dtype=np.int64)
            b = np.array([c.lift() for c in alpha.coeffs], dtype=np.int64)
            sol = linalg.solve_mod(m, b, field.p)
            coords = None if sol is None else [field.elt(int(x)) for x in sol]
        else:
            coords = linalg.solve_ff(self._solve_cols, list(alpha.coeffs), field)
        if coords is None:
            raise InputError("trivector is not in T_U")
        mat = [[coords[3 * i + j] for j in range(3)] for i in range(3)]
        return mat, coords[9]

    def ru_det(self, alpha: MultiVector) -> Fe:
        mat, _ = self.chart(alpha)
        return linalg.det_ff(mat, self.field)


def ru_det(model: CubeModel, alpha: MultiVector) -> Fe:
    return model.ru_det(alpha)


def l_UA(A: Lagrangian, U: Subspace) -> tuple[MultiVector, MultiVector]:
    """Basis of the pencil P(A) n P(T_U); requires the stratum to be exactly 2."""
    fiber = family_subspace("T", U)
    inter = A.space.intersect(fiber)
    if inter.dim != 2:
        raise InputError(f"l_UA needs stratum exactly 2, got {inter.dim}")
    return (MultiVector(A.field, 3, inter.rows[0]), MultiVector(A.field, 3, inter.rows[1]))


@dataclass
class FiberPoint:
    t_kind: str  # "base", "inf", or "ext<d>"
    point_coeffs: tuple
    orbit: OrbitType


@dataclass
class FiberReport:
    cubic: UniPoly
    inf_mult: int
    profile: list
    squarefree: bool
    points: list

    @property
    def projective_degree(self) -> int:
        return self.cubic.degree + self.inf_mult

    def all_middle_orbit(self) -> bool:
        return all(pt.orbit == OrbitType.OMEGA_OPEN for pt in self.points)

    def to_json_obj(self) -> dict:
        return {
            "cubic_coeffs": [c.lift() for c in self.cubic.coeffs],
            "inf_mult": self.inf_mult,
            "degree": self.projective_degree,
            "profile": list(self.profile),
            "squarefree": self.squarefree,
            "points": [
                {"where": pt.t_kind, "orbit": pt.orbit.value} for pt in self.points
            ],
        }


def pi1_fiber(A: Lagrangian, U: Subspace, max_point_ext: int = 3) -> FiberReport:
    """Restriction of the determinant cubic to l_{U,A} and its scheme of roots.

    The factor profile is always reported; explicit fiber points are
    materialized for roots in the base field and in extensions of degree up
    to max_point_ext, and each is orbit-classified (middle orbit expected
    for generic A).
    """
    field = A.field
    b0, b1 = l_UA(A, U)
    model = CubeModel(U)
    m0, _ = model.chart(b0)
    m1, _ = model.chart(b1)
    nodes = [field.elt(t) for t in range(4)]
    vals = []
    for t in nodes:
        mt = [[a + t * b for a, b in zip(ra, rb)] for ra, rb in zip(m0, m1)]
        vals.append(linalg.det_ff(mt, field))
    from .poly import lagrange

    g = lagrange(field, nodes, vals)
    if g.is_zero():
        raise DegeneracyError("determinant cubic vanishes identically (degenerate U)")
    inf_mult = 3 - g.degree
    profile = sorted(factor_profile(g) + [1] * inf_mult)
    sf = squarefree_part(g)
    squarefree = (sf.degree == g.degree) and inf_mult <= 1
    points: list[FiberPoint] = []
    if g.degree > 0:
        for r in fast_roots(g):
            mv = (b0 + b1 * field.elt(r)).normalized()
            points.append(FiberPoint("base", tuple(c.c for c in mv.coeffs), classify(mv)))
    if inf_mult > 0:
        mv = b1.normalized()
        points.append(FiberPoint("inf", tuple(c.c for c in mv.coeffs), classify(mv)))
    for d in sorted({d for d in profile if 2 <= d <= max_point_ext}):
        ext = build_extension(field.p, d)
        b0e = MultiVector(ext, 3, [c.lift() for c in b0.coeffs])
        b1e = MultiVector(ext, 3, [c.lift() for c in b1.coeffs])
        for r in roots_in_extension(g, ext):
            if r.in_base():
                continue
            mv = (b0e + b1e * r).normalized()
            points.append(FiberPoint(f"ext{d}", tuple(c.c for c in mv.coeffs), classify(mv)))
    return FiberReport(g, inf_mult, profile, squarefree, points)


def p_of_v(A: Lagrangian, v: Sequence[Fe]) -> MultiVector:
    """The unique point of P(A) n P(F_v) over a rank-1 point [v], normalized."""
    field = A.field
    fiber = family_subspace("F", tuple(field.elt(c) for c in v), field)
    inter = A.space.intersect(fiber)
    if inter.dim != 1:
        raise InputError(f"p_of_v needs stratum exactly 1, got {inter.dim}")
    mv = MultiVector(field, 3, inter.rows[0]).normalized()
    if classify(mv) != OrbitType.OMEGA_OPEN:
        raise DegeneracyError("fiber point is not in the middle orbit (non-generic A)")
    v1, _ = phi_pair(mv)
    if normalize_proj(tuple(field.elt(c) for c in v)) != v1:
        raise InternalError("first fibration image of p_of_v differs from [v]")
    return mv


class QpModel:
    """The quadric threefold of 3-spaces U with p in P(T_U), for p = [v^alpha].

    Realized on G(2, V/v) for the 5-space V cut out by the second fibration
    image of p: membership is v in U, U inside V, and one linear form in the
    Pluecker coordinates of U/v.
    """

    def __init__(self, p_point: MultiVector):
        if classify(p_point) != OrbitType.OMEGA_OPEN:
            raise InputError("Qp needs a middle-orbit point")
        field = p_point.field
        self.field = field
        self.p_point = p_point
        ker = kernel_subspace(p_point)
        self.v = ker.rows[0]
        _, xi = phi_pair(p_point)
        V5 = Subspace(field, 6, [xi]).perp()
        if V5.dim != 5 or not V5.contains_vector(self.v):
            raise InternalError("the 5-space of p must contain its kernel line")
        self.V5 = V5
        # adapted basis (v, b_0..b_3) of V5
        bs: list[tuple[Fe, ...]] = []
        cur = Subspace(field, 6, [self.v])
        for row in V5.rows:
            if not cur.contains_vector(row):
                bs.append(row)
                cur = cur.sum(Subspace(field, 6, [row]))
        if len(bs) != 4:
            raise InternalError("failed to complete v inside the 5-space")
        self.b = bs
        # columns of the adapted basis (v, b_0..b_3), for exact coordinate solves
        self._adapted_cols = [list(col) for col in zip(*([self.v] + list(bs)))]
        self.alpha2 = self._solve_alpha()
        self.pluecker_form = self._pluecker_form()

    def _solve_alpha(self) -> MultiVector:
        """A bivector supported on the complement pairs with v ^ alpha = p."""
        field = self.field
        vmv = MultiVector.from_vector(field, self.v)
        cols = []
        for (i, j) in QPAIRS:
            bij = MultiVector.from_vector(field, self.b[i]).wedge(
                MultiVector.from_vector(field, self.b[j])
            )
            cols.append(list(vmv.wedge(bij).coeffs))
        mat = [list(col) for col in zip(*cols)]  # 20 x 6
        if field.k == 1:
            m = np.array([[c.lift() for c in row] for row in mat], dtype=np.int64)
            rhs = np.array([c.lift() for c in self.p_point.coeffs], dtype=np.int64)
            sol = linalg.solve_mod(m, rhs, field.p)
            coeffs = None if sol is None else [field.elt(int(x)) for x in sol]
        else:
            coeffs = linalg.solve_ff(mat, list(self.p_point.coeffs), field)
        if coeffs is None:
            raise InternalError("p does not lie in v ^ L2(V5)")
        out = MultiVector.zero(field, 2)
        for c, (i, j) in zip(coeffs, QPAIRS):
            if c:
                bij = MultiVector.from_vector(field, self.b[i]).wedge(
                    MultiVector.from_vector(field, self.b[j])
                )
                out = out + bij * c
        return out

    def _pluecker_form(self) -> tuple[Fe, ...]:
        field = self.field
        vmv = MultiVector.from_vector(field, self.v)
        rows = []
        for (i, j) in QPAIRS:
            bij = MultiVector.from_vector(field, self.b[i]).wedge(
                MultiVector.from_vector(field, self.b[j])
            )
            rows.append(list(self.alpha2.wedge(vmv).wedge(bij).coeffs))
        theta = None
        for row in rows:
            if any(row):
                theta = row
                break
        if theta is None:
            raise InternalError("chart condition vanishes identically")
        t_lead = next(i for i, c in enumerate(theta) if c)
        inv = theta[t_lead].inverse()
        coeffs = []
        for row in rows:
            lam = row[t_lead] * inv
            if any(a - lam * b for a, b in zip(row, theta)):
                raise InternalError("chart condition is not a rank-1 system")
            coeffs.append(lam)
        return tuple(coeffs)

    def quotient_coords(self, w: Sequence[Fe]):
        """Coordinates of a vector of V5 over (b_0..b_3), modulo v."""
        field = self.field
        target = [field.elt(c) for c in w]
        if field.k == 1:
            m = np.array([[c.lift() for c in row] for row in self._adapted_cols], dtype=np.int64)
            rhs = np.array([c.lift() for c in target], dtype=np.int64)
            sol = linalg.solve_mod(m, rhs, field.p)
            if sol is None:
                return None
            return tuple(field.elt(int(x)) for x in sol[1:])
        sol = linalg.solve_ff(self._adapted_cols, target, field)
        if sol is None:
            return None
        return tuple(sol[1:])

    def pluecker_of(self, U: Subspace):
        """Pluecker coordinates of U/v, or None when U is not admissible."""
        if U.dim != 3 or not U.contains_vector(self.v):
            return None
        imgs = []
        for row in U.rows:
            q = self.quotient_coords(row)
            if q is None:
                return None
            imgs.append(q)
        red = [list(r) for r in Subspace(self.field, 4, imgs).rows]
        if len(red) != 2:
            return None
        out = []
        for (i, j) in QPAIRS:
            out.append(red[0][i] * red[1][j] - red[0][j] * red[1][i])
        return tuple(out)

    def form_value(self, pluecker: Sequence[Fe]) -> Fe:
        acc = self.field.zero
        for c, q in zip(self.pluecker_form, pluecker):
            if c and q:
                acc = acc + c * q
        return acc

    def contains(self, U: Subspace) -> bool:
        """Exact membership test: v in U inside V5 and the linear form vanishes."""
        pl = self.pluecker_of(U)
        return pl is not None and not self.form_value(pl)

    def _lift(self, q: Sequence[Fe]) -> tuple[Fe, ...]:
        out = [self.field.zero] * 6
        for c, row in zip(q, self.b):
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return tuple(out)

    def _form_contracted(self, x: Sequence[Fe]) -> list[Fe]:
        """Coefficients c with form(x ^ y) = sum_k c_k y_k."""
        field = self.field
        c = [field.zero] * 4
        for (i, j), lam in zip(QPAIRS, self.pluecker_form):
            if lam:
                c[j] = c[j] + lam * x[i]
                c[i] = c[i] - lam * x[j]
        return c

    def sample_lines(self, count: int, seed=0, max_attempts: int = 400) -> list[GLine]:
        """Distinct lines inside the quadric, through varying chart points.

        Each line is the pencil of 3-spaces between <v, x> and <v, x, y, z>
        where x, y span a chart point and z is a direction kept inside the
        quadric by the contracted linear form.
        """
        field = self.field
        rng = derive_rng("qp-lines", seed)
        lines: list[GLine] = []
        seen = set()
        for _ in range(max_attempts):
            if len(lines) >= count:
                return lines
            x = tuple(field.random(rng) for _ in range(4))
            if not any(x):
                continue
            c = self._form_contracted(x)
            if field.k == 1:
                ker = linalg.nullspace_mod(
                    np.array([[e.lift() for e in c]], dtype=np.int64), field.p
                ).tolist()
            else:
                ker = linalg.nullspace_ff([c], field, 4)
            K = Subspace(field, 4, ker)
            y = K.random_vector(rng)
            if Subspace(field, 4, [x, y]).dim != 2:
                continue
            z = K.random_vector(rng)
            if Subspace(field, 4, [x, y, z]).dim != 3:
                continue
            V_K = Subspace(field, 6, [self.v, self._lift(x)])
            P_K = Subspace(field, 6, [self.v, self._lift(x), self._lift(y), self._lift(z)])
            if V_K.dim != 2 or P_K.dim != 4:
                continue
            gl = GLine(V_K, P_K)
            if gl.key() in seen:
                continue
            seen.add(gl.key())
            lines.append(gl)
        if not lines:
            raise DegeneracyError("no line inside the quadric found (degenerate point)")
        return lines


def qp_model(p_point: MultiVector) -> QpModel:
    return QpModel(p_point)


@dataclass
class SurfaceFiberReport:
    v: tuple
    lines: list
    fiber_points: dict  # Subspace.key() -> Subspace
    degenerate_lines: int

    def to_json_obj(self) -> dict:
        return {
            "lines": self.lines,
            "fiber_point_count": len(self.fiber_points),
            "degenerate_lines": self.degenerate_lines,
        }


def psi1_fiber_scan(A: Lagrangian, v: Sequence[Fe], budget: int = 20, seed=0) -> SurfaceFiberReport:
    """Scan lines inside Q_p for rank-2 members of the T family.

    Each line is swept with a target-2 secancy polynomial (degree at most 4,
    generically exactly 4: the quartic-section witness); every reported U is
    re-checked to contain v, to carry p on T_U, and to lie inside Q_p.
    """
    field = A.field
    rep = stratum(A, "F", tuple(field.elt(c) for c in v))
    if rep.k != 1:
        raise InputError(f"fiber scan needs a rank-1 point, got rank {rep.k}")
    p_pt = p_of_v(A, v)
    model = qp_model(p_pt)
    out_lines = []
    fiber_points: dict = {}
    degenerate = 0
    for i, gl in enumerate(model.sample_lines(budget, seed=seed)):
        scan = line_scan(A, "T", gl, 2, seed=(seed, "psi1", i), exhaustive=False)
        deg = scan.projective_degree
        if scan.identically_zero or (deg is not None and deg < 4):
            degenerate += 1
        for t, k in scan.hits.items():
            U = gl.U_at(t)
            if not U.contains_vector(model.v):
                raise InternalError("fiber 3-space lost the base vector")
            if not family_subspace("T", U).contains_vector(p_pt.coeffs):
                raise InternalError("fiber 3-space does not carry p")
            if not model.contains(U):
                raise InternalError("fiber 3-space violates the quadric equation")
            fiber_points[U.key()] = U
        out_lines.append(
            {
                "degree": -1 if scan.identically_zero else deg,
                "profile": list(scan.profile),
                "squarefree": scan.squarefree,
                "hits": len(scan.hits),
            }
        )
    return SurfaceFiberReport(
        v=tuple(c.c for c in normalize_proj([field.elt(c) for c in v])),
        lines=out_lines,
        fiber_points=fiber_points,
        degenerate_lines=degenerate,
    )


def sample_on_Y(A: Lagrangian, count: int, seed=0, v_budget: int = 40) -> list[Subspace]:
    """Distinct rank-2 points of the T family, produced through fiber scans.

    This is the canonical sampling path: the rank-2 locus has codimension 3
    in the flag variety, so direct random scanning cannot reach it.
    """
    from .strata import sample_points_on_X

    out: list[Subspace] = []
    seen = set()
    for i in range(v_budget):
        if len(out) >= count:
            break
        pts = sample_points_on_X(A, 3, seed=(seed, "y", i), skip=3 * i)
        for v, k in pts:
            if k != 1:
                continue
            try:
                rep = psi1_fiber_scan(A, v, budget=4, seed=(seed, "yscan", i))
            except DegeneracyError:
                continue
            for key, U in sorted(rep.fiber_points.items()):
                if key not in seen:
                    seen.add(key)
                    out.append(U)
                    if len(out) >= count:
                        break
            if len(out) >= count:
                break
    if len(out) < count:
        raise DegeneracyError(f"could not sample {count} rank-2 points (got {len(out)})")
    return out
