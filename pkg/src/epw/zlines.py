"""Four-secant lines: normal forms, secancy batteries, and the quadric test.

A z-line is the pencil of 3-forms (l1 v1 + l2 v2) ^ alpha for independent
v1, v2 and a maximal-rank bivector alpha; it stays inside the middle orbit
and projects to lines under both fibrations.  Embedded in a Lagrangian, its
three projections are four-secant to the deeper strata; the battery below
certifies all three length-4 schemes, the induced reduction identity, and
the position of the four tangent planes after projection from the line.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DegeneracyError, InputError, InternalError, ZLineError
from .exterior import (
    MultiVector,
    OrbitType,
    Subspace,
    classify,
    family_subspace,
    phi_pair,
)
from .field import Fe, Field, build_extension
from .lagrangian import Lagrangian, ReducedSpace, random_lagrangian, symplectic_reduce
from .poly import gcd as poly_gcd, roots_in_extension
from .strata import (
    GLine,
    INF,
    LineScan,
    fast_roots,
    intersect_dim,
    line_scan,
    stratum,
    tangent_plane_D2,
)


@dataclass
class ZLine:
    v1: tuple
    v2: tuple
    alpha: MultiVector
    eta1: MultiVector
    eta2: MultiVector
    V: Subspace
    P: Subspace
    isotropic: bool

    @property
    def field(self) -> Field:
        return self.alpha.field

    def span(self) -> Subspace:
        """The 2-space of the grade-3 pencil, as a subspace of the 20-space."""
        return Subspace(self.field, 20, [self.eta1.coeffs, self.eta2.coeffs])

    def to_json_obj(self) -> dict:
        return {
            "v1": [c.lift() for c in self.v1],
            "v2": [c.lift() for c in self.v2],
            "alpha": [c.lift() for c in self.alpha.coeffs],
        }


def standard_zline(field: Field) -> ZLine:
    """The isotropic reference z-line (e0, e1, e0^e4 + e1^e5 + e2^e3)."""
    alpha = (
        MultiVector.basis(field, (0, 4))
        + MultiVector.basis(field, (1, 5))
        + MultiVector.basis(field, (2, 3))
    )
    return zline_validate(field, (1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), alpha)


def zline_validate(field: Field, v1: Sequence, v2: Sequence, alpha) -> ZLine:
    """Check every z-line invariant, naming the first violated one."""
    v1 = tuple(field.elt(c) for c in v1)
    v2 = tuple(field.elt(c) for c in v2)
    if not isinstance(alpha, MultiVector):
        alpha = MultiVector(field, 2, alpha)
    if alpha.grade != 2:
        raise ZLineError("alpha must be a bivector")
    V = Subspace(field, 6, [v1, v2])
    if V.dim != 2:
        raise ZLineError("v1 and v2 are linearly dependent")
    eta1 = MultiVector.from_vector(field, v1).wedge(alpha)
    eta2 = MultiVector.from_vector(field, v2).wedge(alpha)
    pencil_span = Subspace(field, 20, [eta1.coeffs, eta2.coeffs])
    if pencil_span.dim != 2:
        raise ZLineError("the two 3-forms v_i ^ alpha are dependent")
    a3 = alpha.wedge(alpha).wedge(alpha)
    if a3.is_zero():
        # a rank-4 alpha can be repaired by adding v1 ^ v2, which leaves
        # both eta_i unchanged; only then is the line genuinely degenerate
        v12 = MultiVector.from_vector(field, v1).wedge(MultiVector.from_vector(field, v2))
        if alpha.wedge(alpha).wedge(v12).is_zero():
            raise ZLineError("alpha is not of maximal rank and cannot be repaired")
        alpha = alpha + v12
    for l1, l2 in ((1, 0), (0, 1), (1, 1), (1, 2), (2, 1)):
        probe = eta1 * l1 + eta2 * l2
        if classify(probe) != OrbitType.OMEGA_OPEN:
            raise ZLineError("pencil point leaves the middle orbit")
    _, xi1 = phi_pair(eta1)
    _, xi2 = phi_pair(eta2)
    if xi1 == xi2:
        raise ZLineError("second fibration contracts the line")
    iso = not omega3(eta1, eta2)
    P = Subspace(field, 6, [xi1]).perp().intersect(Subspace(field, 6, [xi2]).perp())
    if P.dim != 4:
        raise InternalError("the two hyperplanes do not cut a 4-space")
    if iso and not P.contains_subspace(V):
        raise InternalError("isotropic z-line with V not inside P")
    return ZLine(v1, v2, alpha, eta1, eta2, V, P, iso)


def omega3(a: MultiVector, b: MultiVector) -> Fe:
    from .exterior import omega

    return omega(a, b)


def l_line(z: ZLine) -> GLine:
    """The flag line of 3-spaces U with the whole z-line inside P(T_U)."""
    if not z.isotropic:
        raise InputError("only isotropic z-lines have V inside P")
    return GLine(z.V, z.P)


def lagrangian_through(z: ZLine, field: Field, seed) -> Lagrangian:
    """A seeded random Lagrangian containing the z-line pencil."""
    if z.field != field:
        raise InputError("field mismatch")
    if not z.isotropic:
        raise InputError("non-isotropic z-line cannot lie in a Lagrangian")
    A = random_lagrangian(field, seed, contains=z.span())
    A.provenance["zline"] = z.to_json_obj()
    return A


# ---------------------------------------------------------------------------
# Four-secant battery


@dataclass
class SubBattery:
    name: str
    contained: bool  # every scanned point sits in the shallow stratum
    scan: LineScan
    pencil: object

    @property
    def passed(self) -> bool:
        return (
            self.contained
            and not self.scan.identically_zero
            and self.scan.projective_degree == 4
            and self.scan.squarefree
        )

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "contained": self.contained,
            "scan": self.scan.to_json_obj(),
            "passed": self.passed,
        }


@dataclass
class BatteryReport:
    x_side: SubBattery
    dual_side: SubBattery
    cube_side: SubBattery
    partials_degree: int | None
    partials_roots_match: bool | None

    @property
    def passed(self) -> bool:
        base = self.x_side.passed and self.dual_side.passed and self.cube_side.passed
        if self.partials_degree is None:
            return base
        return base and self.partials_degree == 4 and bool(self.partials_roots_match)

    def to_json_obj(self) -> dict:
        return {
            "x_side": self.x_side.to_json_obj(),
            "dual_side": self.dual_side.to_json_obj(),
            "cube_side": self.cube_side.to_json_obj(),
            "partials_degree": self.partials_degree,
            "partials_roots_match": self.partials_roots_match,
            "passed": self.passed,
        }


def _anchor_vector_pencil(A: Lagrangian, kind: str, w1, w2, target: int):
    """Reparametrize the pencil so the point at infinity misses the target.

    Keeps the same projective line; only the affine chart moves, so the
    secancy polynomial attains its full degree in the affine coordinate.
    """
    field = A.field
    for cand in _chart_candidates(field, w1, w2):
        d0, d1 = cand
        if stratum(A, kind, d1).k < target:
            return d0, d1
    raise DegeneracyError("every chart anchor hits the deep stratum")


def _chart_candidates(field, w1, w2):
    yield (w1, w2)
    yield (w2, w1)
    for c in range(1, field.p):
        cc = field.elt(c)
        yield (w2, tuple(a + cc * b for a, b in zip(w1, w2)))


def _anchor_gline(A: Lagrangian, gl: GLine, target: int) -> GLine:
    if stratum(A, "T", gl.U_at(INF)).k < target:
        return gl
    field = gl.field
    swapped = GLine(gl.V, gl.P)
    swapped.p0, swapped.p1 = gl.p1, gl.p0
    if stratum(A, "T", swapped.U_at(INF)).k < target:
        return swapped
    for c in range(1, field.p):
        cc = field.elt(c)
        cand = GLine(gl.V, gl.P)
        cand.p0 = gl.p1
        cand.p1 = tuple(a + cc * b for a, b in zip(gl.p0, gl.p1))
        if stratum(A, "T", cand.U_at(INF)).k < target:
            return cand
    raise DegeneracyError("every chart anchor of the flag line hits the deep stratum")


def four_secant_battery(z: ZLine, A: Lagrangian, sextic=None, seed=0) -> BatteryReport:
    """The three length-4 certificates of an embedded z-line.

    (i) the P(W) projection lies inside the rank-1 hypersurface and meets the
    rank-2 surface in a reduced length-4 scheme; (ii) dually in P(W*);
    (iii) the flag line lies inside the rank-2 family locus and meets its
    rank-3 stratum in a reduced length-4 scheme.  When the interpolated
    sextic is supplied, the gcd of its quintic partials restricted to pencil
    (i) must recover the same length-4 base locus.
    """
    field = A.field
    if not A.space.contains_vector(z.eta1.coeffs) or not A.space.contains_vector(z.eta2.coeffs):
        raise InputError("the z-line pencil is not contained in P(A)")

    d0, d1 = _anchor_vector_pencil(A, "F", z.v1, z.v2, 2)
    shallow = line_scan(A, "F", (d0, d1), 1, seed=(seed, "x1"))
    contained_x = shallow.identically_zero and all(
        k >= 1 for k in (shallow.points_strata or {}).values()
    )
    scan_x = line_scan(A, "F", (d0, d1), 2, seed=(seed, "x2"))
    x_side = SubBattery("x_side", contained_x, scan_x, (d0, d1))

    _, xi1 = phi_pair(z.eta1)
    _, xi2 = phi_pair(z.eta2)
    h0, h1 = _anchor_vector_pencil(A, "Fdual", xi1, xi2, 2)
    shallow_d = line_scan(A, "Fdual", (h0, h1), 1, seed=(seed, "d1"))
    contained_d = shallow_d.identically_zero and all(
        k >= 1 for k in (shallow_d.points_strata or {}).values()
    )
    scan_d = line_scan(A, "Fdual", (h0, h1), 2, seed=(seed, "d2"))
    dual_side = SubBattery("dual_side", contained_d, scan_d, (h0, h1))

    gl = _anchor_gline(A, l_line(z), 3)
    shallow_t = line_scan(A, "T", gl, 2, seed=(seed, "t2"))
    contained_t = shallow_t.identically_zero and all(
        k >= 2 for k in (shallow_t.points_strata or {}).values()
    )
    scan_t = line_scan(A, "T", gl, 3, seed=(seed, "t3"))
    cube_side = SubBattery("cube_side", contained_t, scan_t, gl)

    partials_degree = None
    roots_match = None
    if sextic is not None:
        g, inf_mult = _partials_gcd(sextic, d0, d1)
        partials_degree = (g.degree + inf_mult) if g is not None else -1
        if g is not None:
            roots = set(fast_roots(g)) | ({INF} if inf_mult else set())
            roots_match = roots == set(scan_x.hits)
        else:
            roots_match = False
    return BatteryReport(x_side, dual_side, cube_side, partials_degree, roots_match)


def _partials_gcd(sextic, d0, d1):
    """Gcd of the six quintic partials restricted to the pencil, with its
    multiplicity at infinity (from the reversed chart)."""
    field = sextic.field
    g = None
    inf_mult = None
    for i in range(6):
        part = sextic.partial(i)
        if part.is_zero():
            continue
        r = part.restrict_to_pencil(d0, d1)
        rr = part.restrict_to_pencil(d1, d0)
        if r.is_zero() and rr.is_zero():
            continue
        if rr.is_zero() or r.is_zero():
            raise InternalError("partial restriction inconsistent between charts")
        e = next(j for j, c in enumerate(rr.coeffs) if c)
        if g is None:
            g, inf_mult = r.monic(), e
        else:
            g = poly_gcd(g, r)
            inf_mult = min(inf_mult, e)
    return g, inf_mult


# ---------------------------------------------------------------------------
# The reduction identity along a flag line


def rk_reduce(K: GLine) -> tuple[Subspace, ReducedSpace]:
    """The 6-space meeting every T_U over the flag line, and its reduction."""
    field = K.field
    vmv = [MultiVector.from_vector(field, r) for r in K.V.rows]
    biv = vmv[0].wedge(vmv[1])
    rows = []
    for c in range(6):
        ec = MultiVector.basis(field, (c,))
        rows.append(biv.wedge(ec).coeffs)
    prows = [MultiVector.from_vector(field, r) for r in K.P.rows]
    for (a, b, c) in itertools.combinations(range(4), 3):
        rows.append(prows[a].wedge(prows[b]).wedge(prows[c]).coeffs)
    R = Subspace(field, 20, rows)
    if R.dim != 6:
        raise DegeneracyError(f"R_K has dimension {R.dim}, expected 6")
    inter = family_subspace("T", K.U_at(0))
    for t in (1, INF):
        inter = inter.intersect(family_subspace("T", K.U_at(t)))
    if inter != R:
        raise InternalError("R_K differs from the triple intersection of fibers")
    return R, symplectic_reduce(R)


@dataclass
class ReductionIdentityReport:
    c: int
    checked: int
    mismatches: list

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json_obj(self) -> dict:
        return {"c": self.c, "checked": self.checked, "mismatches": self.mismatches}


def reduction_identity_check(A: Lagrangian, K: GLine) -> ReductionIdentityReport:
    """Verify dim(T_U n A) - c = dim(reduced T_U n reduced A) along the line.

    c = dim(A n R_K); scanned exhaustively over the base field and infinity.
    """
    field = A.field
    R, red = rk_reduce(K)
    c = intersect_dim(A.space, R)
    Abar = red.reduce(A.space)
    mism = []
    count = 0
    for t in list(range(field.p)) + [INF]:
        U = K.U_at(t)
        a = stratum(A, "T", U).k
        fiber = family_subspace("T", U)
        abar = intersect_dim(red.reduce(fiber), Abar)
        count += 1
        if a - c != abar:
            mism.append({"t": str(t), "a": a, "abar": abar})
    return ReductionIdentityReport(c, count, mism)


# ---------------------------------------------------------------------------
# The no-quadric-through-the-four-tangent-lines test


@dataclass
class QuadricTestReport:
    rank: int
    ext_degree: int
    lines: int
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json_obj(self) -> dict:
        return {
            "rank": self.rank,
            "ext_degree": self.ext_degree,
            "lines": self.lines,
            "verdict": self.verdict,
        }


def quadric_monomial_rank(field: Field, lines: Sequence[Subspace]) -> int:
    """Rank of the 12 x 10 matrix of degree-2 monomials on 3 points per line.

    Rank 10 certifies that no quadric surface contains all the lines; any
    quadric through them would be a nonzero kernel vector.
    """
    rows = []
    for line in lines:
        if line.ambient != 4 or line.dim != 2:
            raise InputError("expected lines as 2-spaces of a 4-space")
        a, b = line.rows
        pts = [a, b, tuple(x + y for x, y in zip(a, b))]
        for pt in pts:
            rows.append([pt[i] * pt[j] for (i, j) in _SYM_PAIRS])
    if field.k == 1:
        m = np.array([[c.lift() for c in r] for r in rows], dtype=np.int64)
        return linalg.rank_mod(m, field.p)
    return linalg.rank_ff(rows, field)


_SYM_PAIRS = tuple((i, j) for i in range(4) for j in range(i, 4))


def tangent_quadric_test(
    z: ZLine, A: Lagrangian, sextic, battery: BatteryReport | None = None, seed=0
) -> QuadricTestReport:
    """Project the four secant tangent planes from the line; look for a quadric.

    The four rank-2 points are taken in the smallest extension splitting the
    secancy polynomial (degree lcm <= 4); each tangent plane must meet the
    projection center only in its base point, so its image is a line in the
    3-dimensional quotient.  Rank 10 of the monomial matrix is a PASS.
    """
    if battery is None:
        battery = four_secant_battery(z, A, sextic=sextic, seed=seed)
    scan = battery.x_side.scan
    if scan.identically_zero or scan.projective_degree != 4 or not scan.squarefree:
        raise DegeneracyError("secancy polynomial is not reduced of length 4")
    if scan.inf_mult:
        raise InternalError("anchored pencil still has a hit at infinity")
    d0, d1 = battery.x_side.pencil
    base = A.field
    degs = sorted(set(scan.profile))
    ext_degree = 1
    for d in degs:
        ext_degree = ext_degree * d // _gcd_int(ext_degree, d)
    if ext_degree > 4:
        raise InputError("secant points need an extension of degree > 4")
    field = base if ext_degree == 1 else build_extension(base.p, ext_degree)
    g = scan.secancy
    if ext_degree == 1:
        root_list = [base.elt(r) for r in fast_roots(g)]
    else:
        root_list = roots_in_extension(g, field)
    if len(root_list) != 4:
        raise InternalError(f"expected 4 secant points, found {len(root_list)}")
    d0e = [field.elt(c.lift()) for c in d0]
    d1e = [field.elt(c.lift()) for c in d1]
    center = Subspace(field, 6, [d0e, d1e])
    comp_idx = [j for j in range(6) if j not in center.pivots]
    basis_rows = list(center.rows) + [
        tuple(field.one if i == j else field.zero for i in range(6)) for j in comp_idx
    ]
    basis_cols = [list(col) for col in zip(*basis_rows)]
    lines = []
    for r in root_list:
        pt = tuple(a + r * b for a, b in zip(d0e, d1e))
        plane = tangent_plane_D2(A, sextic, pt)
        imgs = []
        for row in plane.rows:
            sol = linalg.solve_ff(basis_cols, list(row), field)
            if sol is None:
                raise InternalError("tangent plane vector outside the chosen basis")
            imgs.append(sol[2:])
        img = Subspace(field, 4, imgs)
        if img.dim != 2:
            raise DegeneracyError("tangent plane meets the projection center off its point")
        lines.append(img)
    rank = quadric_monomial_rank(field, lines)
    verdict = "PASS" if rank == 10 else "FAIL"
    return QuadricTestReport(rank, ext_degree, len(lines), verdict)


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
