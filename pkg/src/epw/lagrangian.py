"""Lagrangian subspaces of the 20-dimensional grade-3 space.

Sampling uses the graph construction over the reference splitting
A0 = T(<e0,e1,e2>), A0' = T(<e3,e4,e5>): the graph of a symmetric matrix over
this omega-dual pair of Lagrangians is again Lagrangian, and a random GL(W)
change of basis spreads coverage beyond the graph chart.  Constrained
sampling reduces by the constraint symplectically and lifts a random
Lagrangian of the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InputError, InternalError
from .exterior import (
    DIM,
    J20,
    OMEGA3,
    POS,
    SUBSETS,
    MultiVector,
    OrbitType,
    Subspace,
    classify,
    complement,
    merge_sign,
    gl_action_matrix,
    apply_matrix,
    omega,
)
from .field import Fe, Field, derive_rng

AMBIENT = DIM[3]  # 20


def omega_gram(S: Subspace) -> list[list[Fe]]:
    """Matrix of pairwise omega values of the basis rows."""
    rows = [MultiVector(S.field, 3, r) for r in S.rows]
    return [[omega(a, b) for b in rows] for a in rows]


def is_lagrangian(S: Subspace) -> bool:
    if S.ambient != AMBIENT:
        raise InputError("Lagrangian test needs ambient dimension 20")
    if S.dim != 10:
        return False
    g = omega_gram(S)
    return not any(any(x for x in row) for row in g)


def omega_perp(S: Subspace) -> Subspace:
    """{x : omega(x, s) = 0 for all s in S}."""
    if S.ambient != AMBIENT:
        raise InputError("omega_perp lives in ambient dimension 20")
    field = S.field
    if field.k == 1:
        BJ = S.np_rows() @ J20 % field.p
        ns = linalg.nullspace_mod(BJ, field.p)
        return Subspace(field, AMBIENT, ns.tolist())
    rows = []
    for r in S.rows:
        new = [field.zero] * AMBIENT
        for i, (j, s) in enumerate(OMEGA3):
            if r[i]:
                new[j] = r[i] if s > 0 else -r[i]
        rows.append(new)
    ns = linalg.nullspace_ff(rows, field, AMBIENT)
    return Subspace(field, AMBIENT, ns)


def is_isotropic(S: Subspace) -> bool:
    g = omega_gram(S)
    return not any(any(x for x in row) for row in g)


@dataclass
class Lagrangian:
    """A validated Lagrangian with the provenance needed to reproduce it."""

    space: Subspace
    provenance: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if not is_lagrangian(self.space):
            raise InputError("subspace is not Lagrangian")

    @property
    def field(self) -> Field:
        return self.space.field

    def basis_multivectors(self) -> list[MultiVector]:
        return [MultiVector(self.field, 3, r) for r in self.space.rows]


# ---------------------------------------------------------------------------
# Reference splitting and graph sampling

_A0_TRIPLES = tuple(I for I in SUBSETS[3] if len(set(I) & {0, 1, 2}) >= 2)


def reference_splitting(field: Field) -> tuple[list[tuple[Fe, ...]], list[tuple[Fe, ...]]]:
    """Omega-dual bases of A0 = T(<e0,e1,e2>) and A0' = T(<e3,e4,e5>).

    The primed basis is signed so that omega(a_i, a'_j) = delta_ij.
    """
    a_rows = []
    b_rows = []
    for I in _A0_TRIPLES:
        row = [field.zero] * AMBIENT
        row[POS[3][I]] = field.one
        a_rows.append(tuple(row))
        c = complement(I)
        _, sign = merge_sign(I, c)
        rowb = [field.zero] * AMBIENT
        rowb[POS[3][c]] = field.elt(sign)
        b_rows.append(tuple(rowb))
    return a_rows, b_rows


def lagrangian_from_graph(field: Field, sym: Sequence[Sequence]) -> Subspace:
    """Graph of a symmetric 10x10 matrix over the reference splitting.

    Rejects non-symmetric input: the graph would not be isotropic.
    """
    S = [[field.elt(c) for c in row] for row in sym]
    if len(S) != 10 or any(len(r) != 10 for r in S):
        raise InputError("graph matrix must be 10x10")
    for i in range(10):
        for j in range(i):
            if S[i][j] != S[j][i]:
                raise InputError("graph matrix must be symmetric")
    a_rows, b_rows = reference_splitting(field)
    rows = []
    for i in range(10):
        row = list(a_rows[i])
        for j in range(10):
            c = S[i][j]
            if c:
                row = [x + c * y for x, y in zip(row, b_rows[j])]
        rows.append(row)
    return Subspace(field, AMBIENT, rows)


def random_gl(field: Field, rng, n: int = 6) -> list[list[Fe]]:
    """A random invertible n x n matrix."""
    while True:
        rows = [[field.random(rng) for _ in range(n)] for _ in range(n)]
        if field.k == 1:
            m = np.array([[c.lift() for c in r] for r in rows], dtype=np.int64)
            if linalg.det_mod(m, field.p):
                return rows
        else:
            if linalg.det_ff(rows, field):
                return rows


def random_symmetric(field: Field, rng, n: int) -> list[list[Fe]]:
    S = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            c = field.random(rng)
            S[i][j] = c
            S[j][i] = c
    return S


# ---------------------------------------------------------------------------
# Symplectic reduction


class ReducedSpace:
    """Quotient R^perp / R of the grade-3 symplectic space by an isotropic R.

    Carries explicit lift/project maps and the induced (nondegenerate) form.
    reduce() sends a subspace S to ((S n R^perp) + R) / R; it maps
    Lagrangians to Lagrangians of the quotient.
    """

    def __init__(self, R: Subspace):
        if R.ambient != AMBIENT:
            raise InputError("reduction lives in ambient dimension 20")
        if not is_isotropic(R):
            raise InputError("reduction requires an isotropic subspace")
        field = R.field
        self.field = field
        self.R = R
        self.Rperp = omega_perp(R) if R.dim else Subspace(field, AMBIENT, np.eye(AMBIENT, dtype=np.int64).tolist())
        self.dim = AMBIENT - 2 * R.dim
        # complement of R inside R^perp, picked greedily from the echelon basis
        comp_rows: list[tuple[Fe, ...]] = []
        cur = R
        for row in self.Rperp.rows:
            if not cur.contains_vector(row):
                comp_rows.append(row)
                cur = cur.sum(Subspace(field, AMBIENT, [row]))
        if len(comp_rows) != self.dim:
            raise InternalError("failed to complete R inside its perp")
        self.comp_rows = tuple(comp_rows)
        self._basis = Subspace(field, AMBIENT, list(R.rows) + list(comp_rows))
        mvs = [MultiVector(field, 3, r) for r in comp_rows]
        self.gram = [[omega(a, b) for b in mvs] for a in mvs]
        if field.k == 1:
            g = np.array([[c.lift() for c in row] for row in self.gram], dtype=np.int64)
            if self.dim and linalg.rank_mod(g, field.p) != self.dim:
                raise InternalError("induced form is degenerate")
        else:
            if self.dim and linalg.rank_ff([list(r) for r in self.gram], field) != self.dim:
                raise InternalError("induced form is degenerate")

    def project(self, v: Sequence[Fe]) -> tuple[Fe, ...]:
        """Quotient coordinates of a vector of R^perp."""
        coords = self._full_coords(v)
        if coords is None:
            raise InputError("vector is not in R^perp")
        return coords[self.R.dim :]

    def _full_coords(self, v):
        rows = list(self.R.rows) + list(self.comp_rows)
        field = self.field
        if field.k == 1:
            m = np.array([[c.lift() for c in r] for r in rows], dtype=np.int64).T
            b = np.array([field.elt(c).lift() for c in v], dtype=np.int64)
            sol = linalg.solve_mod(m, b, field.p)
            if sol is None:
                return None
            return tuple(field.elt(int(x)) for x in sol)
        mat = [list(col) for col in zip(*rows)]
        sol = linalg.solve_ff(mat, [field.elt(c) for c in v], field)
        return None if sol is None else tuple(sol)

    def lift(self, q: Sequence[Fe]) -> tuple[Fe, ...]:
        out = [self.field.zero] * AMBIENT
        for c, row in zip(q, self.comp_rows):
            c = self.field.elt(c)
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return tuple(out)

    def reduce(self, S: Subspace) -> Subspace:
        inter = S.intersect(self.Rperp)
        rows = [self.project(r) for r in inter.rows]
        return Subspace(self.field, self.dim, rows)

    def induced_omega(self, a: Sequence[Fe], b: Sequence[Fe]) -> Fe:
        acc = self.field.zero
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        acc = acc + ai * bj * self.gram[i][j]
        return acc

    def darboux_pairs(self) -> list[tuple[tuple[Fe, ...], tuple[Fe, ...]]]:
        """Symplectic basis (x_i, y_i) of the quotient, omega(x_i, y_j) = delta."""
        field = self.field
        n = self.dim
        basis = [tuple(field.one if j == i else field.zero for j in range(n)) for i in range(n)]
        pairs = []
        remaining = list(basis)
        while remaining:
            x = remaining.pop(0)
            y = None
            for i, cand in enumerate(remaining):
                val = self.induced_omega(x, cand)
                if val:
                    y = [c / val for c in remaining.pop(i)]
                    break
            if y is None:
                raise InternalError("induced form degenerate during Darboux split")
            new_rem = []
            for z in remaining:
                a = self.induced_omega(z, tuple(y))
                b = self.induced_omega(z, x)
                zz = [zc - a * xc + b * yc for zc, xc, yc in zip(z, x, y)]
                new_rem.append(tuple(zz))
            pairs.append((tuple(x), tuple(y)))
            remaining = new_rem
        return pairs

    def random_lagrangian_lift(self, rng) -> Subspace:
        """A Lagrangian of the ambient space containing R, via graph sampling."""
        m = self.dim // 2
        rows = [list(r) for r in self.R.rows]
        if m:
            pairs = self.darboux_pairs()
            S = random_symmetric(self.field, rng, m)
            for i in range(m):
                q = list(pairs[i][0])
                for j in range(m):
                    c = S[i][j]
                    if c:
                        q = [a + c * b for a, b in zip(q, pairs[j][1])]
                rows.append(list(self.lift(q)))
        return Subspace(self.field, AMBIENT, rows)


def symplectic_reduce(R: Subspace) -> ReducedSpace:
    if R.dim > 9:
        raise InputError("reduction by an isotropic subspace needs dim <= 9")
    return ReducedSpace(R)


# ---------------------------------------------------------------------------
# Random Lagrangians


def random_lagrangian(
    field: Field,
    seed: int,
    contains: Subspace | None = None,
    decomposable: bool = False,
) -> Lagrangian:
    """Seeded random Lagrangian, optionally through an isotropic subspace.

    With decomposable=True a random GL(W)-image of e0^e1^e2 is forced into
    the result and recorded as a witness in the provenance.
    """
    rng = derive_rng("lagrangian", field.p, field.k, seed, "dec" if decomposable else "", "" if contains is None else contains.key())
    prov: dict = {"seed": seed, "constraint": "none"}
    if decomposable:
        if contains is not None:
            raise InputError("choose either a subspace constraint or decomposable")
        g = random_gl(field, rng)
        mat = gl_action_matrix(g, field)
        e012 = [field.zero] * AMBIENT
        e012[POS[3][(0, 1, 2)]] = field.one
        w = apply_matrix(mat, e012, field)
        contains = Subspace(field, AMBIENT, [w])
        prov = {"seed": seed, "constraint": "contains_decomposable", "witnesses": [tuple(c.lift() for c in w)]}
    if contains is not None:
        if contains.ambient != AMBIENT:
            raise InputError("constraint must live in the grade-3 space")
        if contains.dim > 10:
            raise InputError("constraint dimension exceeds 10")
        if not is_isotropic(contains):
            raise InputError("constraint subspace is not isotropic")
        if prov.get("constraint") == "none":
            prov = {"seed": seed, "constraint": "contains", "generators": contains.key()}
        if contains.dim == 10:
            return Lagrangian(contains, prov)
        red = symplectic_reduce(contains)
        sub = red.random_lagrangian_lift(rng)
        if not sub.contains_subspace(contains):
            raise InternalError("lift lost the constraint")
        return Lagrangian(sub, prov)
    S = random_symmetric(field, rng, 10)
    graph = lagrangian_from_graph(field, S)
    g = random_gl(field, rng)
    mat = gl_action_matrix(g, field)
    rows = [apply_matrix(mat, row, field) for row in graph.rows]
    return Lagrangian(Subspace(field, AMBIENT, rows), prov)


# ---------------------------------------------------------------------------
# Probabilistic genericity certification


@dataclass
class GenericityReport:
    """Outcome of the random scan battery; a heuristic, never a proof."""

    trials: int
    seed: int
    deep_line_hits: dict
    decomposable_points: list
    omega_open_count: int
    notes: list

    @property
    def passed(self) -> bool:
        return not self.decomposable_points and not any(self.deep_line_hits.values())

    @property
    def verdict(self) -> str:
        return "probabilistically generic" if self.passed else "not generic"

    def to_json_obj(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "deep_line_hits": {k: v for k, v in self.deep_line_hits.items()},
            "decomposable_points": self.decomposable_points,
            "omega_open_count": self.omega_open_count,
            "verdict": self.verdict,
            "notes": sorted(self.notes),
        }


def genericity_probe(A: Lagrangian, trials: int = 200, seed: int = 0) -> GenericityReport:
    """Scan for the four degeneracy conditions that single out generic A.

    (a) random pencils in P(W), P(W*) and random flag lines in G(3,W) must
    show no stratum >= 3 (>= 4 for the rank-2 family) anywhere, certified by
    a constant secancy gcd or refuted by a verified root; (b) no sampled or
    recorded point of P(A) may be decomposable, where sampling combines
    uniform draws with the rank-1-slice census over random [v]; (c) the
    census also counts middle-orbit points (positive for generic A once
    trials outpace the field size).
    """
    from . import strata  # deferred: strata depends on this module's types

    if trials < 1:
        raise InputError("trials must be >= 1")
    field = A.field
    deep_hits = {"F": 0, "Fdual": 0, "T": 0}
    witnesses: list = []
    notes: list[str] = []
    for i in range(trials):
        rng = derive_rng("probe-lines", seed, i)
        for kind, target in (("F", 3), ("Fdual", 3), ("T", 4)):
            pencil = strata.random_pencil(field, kind, rng)
            scan = strata.line_scan(A, kind, pencil, target, seed=(seed, "probe", i), exhaustive=False)
            deep_hits[kind] += len(scan.hits)
    # decomposable census: uniform points, provenance witnesses, F_v slices
    decomposable: list = []
    omega_open = 0
    rng = derive_rng("probe-points", seed)
    for _ in range(trials):
        pt = A.space.random_vector(rng)
        mv = MultiVector(field, 3, pt)
        if classify(mv) == OrbitType.DECOMPOSABLE:
            decomposable.append(tuple(c.c for c in mv.normalized().coeffs))
    for w in A.provenance.get("witnesses", []):
        mv = MultiVector(field, 3, w)
        if A.space.contains_vector(mv.coeffs) and classify(mv) == OrbitType.DECOMPOSABLE:
            decomposable.append(tuple(c.c for c in mv.normalized().coeffs))
            notes.append("provenance witness is decomposable")
    rng = derive_rng("probe-slices", seed)
    for _ in range(trials):
        v = tuple(field.random(rng) for _ in range(6))
        if not any(v):
            continue
        sl = A.space.intersect(strata.family_fiber(A.field, "F", v))
        if sl.dim == 0:
            continue
        probes = [MultiVector(field, 3, r) for r in sl.rows]
        if sl.dim >= 2:
            probes.append(MultiVector(field, 3, sl.random_vector(rng)))
        for mv in probes:
            c = classify(mv)
            if c == OrbitType.DECOMPOSABLE:
                decomposable.append(tuple(x.c for x in mv.normalized().coeffs))
            elif c == OrbitType.OMEGA_OPEN:
                omega_open += 1
    if omega_open == 0:
        notes.append("no middle-orbit point sampled; increase trials")
    return GenericityReport(
        trials=trials,
        seed=seed,
        deep_line_hits=deep_hits,
        decomposable_points=sorted(set(decomposable)),
        omega_open_count=omega_open,
        notes=notes,
    )
