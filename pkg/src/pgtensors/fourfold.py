"""Nonsingular 2x2x2x2 tensors through their contraction pencils.

A fourfold tensor is handled by the F_q-pencil spanned by two 2x2
matrices over F_{q^2}: its contractions are the q+1 projective points
lambda*S + mu*T of PG(3, q^2).  The tensor is nonsingular iff every one
of those points is a nonsingular threefold tensor.  Each nonsingular
point has a 2-dimensional contraction space of F_q-linear maps (the map
parameters of the unique subgeometry line through it); the dimension d
of the joint span of all q+1 of those spaces, inside the 4-dimensional
parameter space, is an equivalence invariant with values in {2, 3, 4}.
In the extreme case d = 4 the q+1 parameter sublines form one ruling
family of a hyperbolic quadric of the subgeometry disjoint from the
subquadric; `regulus_quadric_check` verifies all of that exactly.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

import numpy as np

from . import cyclic
from .geom import Geometry, ProjPoint4, SigmaLine


class DegeneratePencil(ValueError):
    pass


class SingularFourfold(ValueError):
    pass


class NotRankFour(ValueError):
    pass


@dataclass(frozen=True)
class FourfoldTensor:
    """A fourfold tensor given by the pencil pair (M_S, M_T)."""

    geom: Geometry
    ms: tuple[tuple[int, int], tuple[int, int]]
    mt: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        g = self.geom
        vs = (self.ms[0][0], self.ms[0][1], self.ms[1][0], self.ms[1][1])
        vt = (self.mt[0][0], self.mt[0][1], self.mt[1][0], self.mt[1][1])
        if all(v == 0 for v in vs) or all(v == 0 for v in vt):
            raise DegeneratePencil("zero matrix in the pencil")
        if g.normalize(vs) == g.normalize(vt):
            raise DegeneratePencil("matrices are projectively dependent")

    def to_json(self) -> str:
        g = self.geom
        ser = lambda m: [",".join(map(str, g.tower.prime_coords(v)))
                         for r in m for v in r]
        return json.dumps({"q": g.q, "ms": ser(self.ms), "mt": ser(self.mt)})

    @staticmethod
    def from_json(s: str, geom: Geometry) -> "FourfoldTensor":
        d = json.loads(s)
        if d["q"] != geom.q:
            raise ValueError(f"fixture is for q={d['q']}, geometry has q={geom.q}")

        def de(entries):
            v = [geom.tower.element_from_string(e).val for e in entries]
            return ((v[0], v[1]), (v[2], v[3]))

        return FourfoldTensor(geom, de(d["ms"]), de(d["mt"]))


def fourfold_contractions(U: FourfoldTensor) -> list[ProjPoint4]:
    """The q+1 projective points of the pencil, (1:mu) for mu in F_q then (0:1)."""
    g = U.geom
    pts = []
    for mu in range(g.q):
        coords = tuple(g.add(a, g.mul(mu, b)) for a, b in zip(_flat(U.ms), _flat(U.mt)))
        pts.append(g.point(coords))
    pts.append(g.point(_flat(U.mt)))
    if len({p.coords for p in pts}) != g.q + 1:
        raise DegeneratePencil("pencil points are not distinct")
    return pts


def _flat(m) -> tuple[int, int, int, int]:
    return (m[0][0], m[0][1], m[1][0], m[1][1])


def fourfold_nonsingular(U: FourfoldTensor) -> bool:
    """True iff every contraction point carries a nonsingular label."""
    g = U.geom
    return all(g.classify_point(P).nonsingular for P in fourfold_contractions(U))


def _params_fq_coords(g: Geometry, params: tuple[int, int]) -> list[int]:
    out = []
    for v in params:
        out.extend(g.tower.top.digits(v))
    return out


def contraction_line_params(g: Geometry, P: ProjPoint4) -> list[tuple[int, int]]:
    """Two spanning (a, b) parameters of the contraction space of a
    non-subgeometry point (its unique subgeometry line)."""
    line = g.sigma_line_through(P)
    if isinstance(line, SigmaLine):
        return [line.p1, line.p2]
    raise ValueError("point lies in the subgeometry")


def d_invariant(U: FourfoldTensor) -> int:
    """dim_{F_q} of the span of all q+1 contraction spaces (in {2, 3, 4})."""
    if not fourfold_nonsingular(U):
        raise SingularFourfold("pencil contains a singular point")
    g = U.geom
    rows = []
    for P in fourfold_contractions(U):
        for pr in contraction_line_params(g, P):
            rows.append(_params_fq_coords(g, pr))
    reduced = cyclic.fq_row_reduce(g.tower, rows)
    d = len(reduced)
    assert 2 <= d <= 4
    return d


def _quadratic_features(g: Geometry, vec4: list[int]) -> list[int]:
    """The 10 monomials y_i y_j (i <= j) of an F_q 4-vector."""
    base = g.tower.base
    out = []
    for i in range(4):
        for j in range(i, 4):
            out.append(base.mul(vec4[i], vec4[j]))
    return out


def regulus_quadric_check(U: FourfoldTensor) -> dict:
    """For d = 4: verify the contraction sublines are pairwise disjoint,
    lie on a unique quadric of the subgeometry, and that this quadric is
    nondegenerate hyperbolic and disjoint from the subquadric."""
    if d_invariant(U) != 4:
        raise NotRankFour("the pencil does not span the full parameter space")
    g = U.geom
    q = g.q
    sublines = []
    for P in fourfold_contractions(U):
        p1, p2 = contraction_line_params(g, P)
        sublines.append(SigmaLine(g, p1, p2).sigma_points())
    all_pts = [p for sl in sublines for p in sl]
    disjoint = len(set(all_pts)) == (q + 1) ** 2

    # fit a quaternary quadratic form through the (q+1)^2 parameter points
    rows = [_quadratic_features(g, _params_fq_coords(g, p)) for p in set(all_pts)]
    reduced = cyclic.fq_row_reduce(g.tower, rows)
    sol_dim = 10 - len(reduced)
    unique_quadric = sol_dim == 1
    report = {"pairwise_disjoint": disjoint, "quadric_solution_dim": sol_dim,
              "unique_quadric": unique_quadric}
    if not unique_quadric:
        report.update({"hyperbolic": False, "disjoint_from_subquadric": False})
        return report

    coeffs = _quadratic_nullspace_vector(g, rows)
    zero_set = _quadric_points(g, coeffs)
    on_quadric = all(_eval_quadratic(g, coeffs, _params_fq_coords(g, p)) == 0
                     for p in set(all_pts))
    hyperbolic = len(zero_set) == (q + 1) ** 2 and _gram_nondegenerate(g, coeffs)
    off_q0 = all(g.norm(a) != g.norm(b) for (a, b) in zero_set)
    report.update({"points_on_quadric": on_quadric,
                   "quadric_size": len(zero_set),
                   "hyperbolic": hyperbolic,
                   "disjoint_from_subquadric": off_q0})
    report["passed"] = bool(disjoint and unique_quadric and on_quadric
                            and hyperbolic and off_q0)
    return report


def _quadratic_nullspace_vector(g: Geometry, rows: list[list[int]]) -> list[int]:
    base = g.tower.base
    red = cyclic.fq_row_reduce(g.tower, rows)
    pivots = [next(i for i, v in enumerate(r) if v != 0) for r in red]
    free = [c for c in range(10) if c not in pivots][0]
    sol = [0] * 10
    sol[free] = 1
    for r, piv in zip(reversed(red), reversed(pivots)):
        s = 0
        for c in range(piv + 1, 10):
            s = base.add(s, base.mul(r[c], sol[c]))
        sol[piv] = base.neg(s)
    return sol


def _eval_quadratic(g: Geometry, coeffs: list[int], vec4: list[int]) -> int:
    base = g.tower.base
    acc = 0
    k = 0
    for i in range(4):
        for j in range(i, 4):
            acc = base.add(acc, base.mul(coeffs[k], base.mul(vec4[i], vec4[j])))
            k += 1
    return acc


def _quadric_points(g: Geometry, coeffs: list[int]) -> list[tuple[int, int]]:
    """Parameter points (a, b) of the subgeometry on the fitted quadric."""
    out = []
    pts = g.points()
    sig = g.sigma_mask_arr(pts)
    for p in pts[sig]:
        params = g.dickson_params(ProjPoint4(tuple(int(v) for v in p)))
        if _eval_quadratic(g, coeffs, _params_fq_coords(g, params)) == 0:
            out.append(params)
    return out


def _gram_nondegenerate(g: Geometry, coeffs: list[int]) -> bool:
    base = g.tower.base
    gram = [[0] * 4 for _ in range(4)]
    k = 0
    two_inv = base.inv(base.add(1, 1))
    for i in range(4):
        for j in range(i, 4):
            if i == j:
                gram[i][i] = coeffs[k]
            else:
                half = base.mul(two_inv, coeffs[k])
                gram[i][j] = half
                gram[j][i] = half
            k += 1
    # determinant over F_q by expansion through the tower's base level
    return _det4_base(g, gram) != 0


def _det4_base(g: Geometry, m) -> int:
    base = g.tower.base
    sub = (lambda a, b: base.sub(a, b)) if g.tower.e == 1 else (lambda a, b: base.sub_(a, b))

    def det2(a, b, c, d):
        return sub(base.mul(a, d), base.mul(b, c))

    def det3(rows):
        (a, b, c), (d, e, f), (x, y, z) = rows
        t1 = base.mul(a, det2(e, f, y, z))
        t2 = base.mul(b, det2(d, f, x, z))
        t3 = base.mul(c, det2(d, e, x, y))
        return base.add(sub(t1, t2), t3)

    total = 0
    for col in range(4):
        minor = [[m[r][c] for c in range(4) if c != col] for r in range(1, 4)]
        term = base.mul(m[0][col], det3(minor))
        total = base.add(total, term) if col % 2 == 0 else sub(total, term)
    return total


# ---------------------------------------------------------------------------
# searches
# ---------------------------------------------------------------------------

def random_nonsingular_pencil(g: Geometry, rng: random.Random,
                              max_tries: int = 20000) -> FourfoldTensor:
    codes, _ = g.classification()
    pts = g.points()
    from .geom import NONSINGULAR_TAGS, LABELS
    ns_idx = [i for i in range(len(pts)) if LABELS[codes[i]] in NONSINGULAR_TAGS]
    for _ in range(max_tries):
        i, j = rng.choice(ns_idx), rng.choice(ns_idx)
        if i == j:
            continue
        ms = _to_mat(tuple(int(v) for v in pts[i]))
        mt = _to_mat(tuple(int(v) for v in pts[j]))
        try:
            U = FourfoldTensor(g, ms, mt)
        except DegeneratePencil:
            continue
        if fourfold_nonsingular(U):
            return U
    raise RuntimeError("no nonsingular pencil found")


def find_witness_with_d(g: Geometry, d: int, rng: random.Random,
                        max_tries: int = 20000) -> FourfoldTensor:
    for _ in range(max_tries):
        U = random_nonsingular_pencil(g, rng)
        if d_invariant(U) == d:
            return U
    raise RuntimeError(f"no pencil with d = {d} found")


def same_line_pencil(g: Geometry) -> FourfoldTensor:
    """Deterministic d = 2 example: two nonsingular points on one extended
    external subgeometry line (the alpha-delta coordinate line)."""
    for w1 in range(g.order):
        for w2 in range(g.order):
            if w1 == w2:
                continue
            try:
                U = FourfoldTensor(g, ((1, 0), (0, w1)), ((1, 0), (0, w2)))
            except DegeneratePencil:
                continue
            if fourfold_nonsingular(U):
                return U
    raise RuntimeError("no same-line nonsingular pencil (unexpected)")


def _to_mat(c4):
    return ((c4[0], c4[1]), (c4[2], c4[3]))


def equivalence_moves(U: FourfoldTensor, rng: random.Random, count: int):
    """Random invariance moves: pencil recombination over F_q, a shared
    invertible-pair isotopy, and a shared third-slot action."""
    g = U.geom
    t = g.tower
    out = []
    for _ in range(count):
        kind = rng.randrange(3)
        if kind == 0:  # invertible F_q recombination of the pencil
            while True:
                a, b, c, d = (rng.randrange(g.q) for _ in range(4))
                if (a * d - b * c) % t.p != 0:
                    break
            fs = _flat(U.ms)
            ft = _flat(U.mt)
            ms = tuple(g.add(g.mul(a, x), g.mul(b, y)) for x, y in zip(fs, ft))
            mt = tuple(g.add(g.mul(c, x), g.mul(d, y)) for x, y in zip(fs, ft))
            out.append(FourfoldTensor(g, _to_mat(ms), _to_mat(mt)))
        else:
            f = _random_invertible_map(t, rng)
            gmap = _random_invertible_map(t, rng)
            h = _random_invertible_map(t, rng) if kind == 2 else cyclic.LinearizedMap.identity(t)
            triple = cyclic.IsotopyTriple(f, gmap, h)
            ms = cyclic.isotopy_apply(triple, cyclic.CyclicTensor(t, U.ms)).entries
            mt = cyclic.isotopy_apply(triple, cyclic.CyclicTensor(t, U.mt)).entries
            out.append(FourfoldTensor(g, ms, mt))
    return out


def _random_invertible_map(t, rng: random.Random) -> cyclic.LinearizedMap:
    while True:
        coeffs = tuple(rng.randrange(t.order) for _ in range(t.n))
        f = cyclic.LinearizedMap(t, coeffs)
        if any(coeffs) and f.is_invertible():
            return f
