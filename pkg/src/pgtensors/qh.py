"""Quasi-Hermitian surfaces in PG(3, q^2) and their verification.

A quasi-Hermitian surface is a point set with the same two plane
intersection sizes, q^3 + 1 and q^3 + q^2 + 1, as a nondegenerate
Hermitian surface.  New examples arise as joins

    base  u  part1  u  part2

where base is the quadric/Hermitian intersection, part1 is either a
deformation surface piece S~_xi with xi in Z1 or the nonsingular half
H1 of the Hermitian surface, and part2 is the Z2 / H2 counterpart.
Every join has (q^2+1)(q^3+1) points; the verification here is exact:
all plane sections are enumerated.

The module also builds, in any dimension N >= 3, the variety
H^2 = 4 Q^{q+1} attached to a quadric of a subgeometry PG(N, q), and
checks (for N = 3) that it coincides with the union of the extended
tangent and generator lines of the subquadric.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .geom import Geometry, InvalidXi, ProjPoint4, class_representative
from .gf import FieldTower, field_create, factorize


class WrongSide(ValueError):
    """Raised when a surface selector is used in the wrong join slot."""


class PointNotInSet(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceSpec:
    """Selector for one side of a join: xi-surface or a Hermitian half."""

    kind: str  # "xi" | "h-minus-h2" | "h-minus-h1"
    xi: int | None = None

    @staticmethod
    def parse(s: str, geom: Geometry) -> "SurfaceSpec":
        low = s.strip().lower()
        if low in ("h-minus-h2", "hminush2"):
            return SurfaceSpec("h-minus-h2")
        if low in ("h-minus-h1", "hminush1"):
            return SurfaceSpec("h-minus-h1")
        if low.startswith("xi:"):
            xi = geom.tower.element_from_string(s.strip()[3:], "top").val
            return SurfaceSpec("xi", xi)
        raise ValueError(f"cannot parse surface spec {s!r}")

    def describe(self, geom: Geometry | None = None) -> str:
        if self.kind != "xi":
            return self.kind
        if geom is None:
            return f"xi:{self.xi}"
        return "xi:" + ",".join(map(str, geom.tower.prime_coords(self.xi)))


@dataclass
class QHSet:
    """A candidate quasi-Hermitian point set (sorted packed indices)."""

    q: int
    point_indices: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.point_indices)

    def mask(self, geom: Geometry) -> np.ndarray:
        m = np.zeros(geom.order ** 4, dtype=bool)
        m[self.point_indices] = True
        return m

    def to_jsonable(self) -> dict:
        return {"q": self.q, "spec": self.provenance,
                "points": [int(v) for v in self.point_indices]}


def qh_join(geom: Geometry, s1: SurfaceSpec, s2: SurfaceSpec) -> QHSet:
    """base u part(s1) u part(s2); the two slots take opposite-class pieces."""
    z1, z2 = geom.zsets()
    if s1.kind == "xi":
        geom.check_xi(s1.xi)
        if s1.xi not in z1:
            raise WrongSide(f"first slot needs xi in Z1 (got {s1.describe(geom)})")
        part1 = geom.s_tilde_points(s1.xi)
    elif s1.kind == "h-minus-h2":
        part1 = geom.label_points("H1")
    else:
        raise WrongSide(f"first slot cannot take {s1.kind}")
    if s2.kind == "xi":
        geom.check_xi(s2.xi)
        if s2.xi not in z2:
            raise WrongSide(f"second slot needs xi in Z2 (got {s2.describe(geom)})")
        part2 = geom.s_tilde_points(s2.xi)
    elif s2.kind == "h-minus-h1":
        part2 = geom.label_points("H2")
    else:
        raise WrongSide(f"second slot cannot take {s2.kind}")
    base = geom.base_locus_points()
    idx = np.unique(np.concatenate([base, part1, part2]))
    assert len(idx) == len(base) + len(part1) + len(part2)
    q = geom.q
    expect = (q * q + 1) * (q ** 3 + 1)
    assert len(idx) == expect, (len(idx), expect)
    return QHSet(geom.q, idx, {"s1": s1.describe(geom), "s2": s2.describe(geom)})


def valid_spec_pairs(geom: Geometry) -> list[tuple[SurfaceSpec, SurfaceSpec]]:
    z1, z2 = geom.zsets()
    side1 = [SurfaceSpec("xi", x) for x in z1] + [SurfaceSpec("h-minus-h2")]
    side2 = [SurfaceSpec("xi", x) for x in z2] + [SurfaceSpec("h-minus-h1")]
    return [(a, b) for a in side1 for b in side2]


@dataclass
class SectionReport:
    """Multiset of hyperplane section sizes of a point set."""

    q: int
    sizes: dict  # size -> number of planes
    expected: tuple[int, int]
    passed: bool
    elapsed_s: float = 0.0

    def to_jsonable(self) -> dict:
        return {"q": self.q, "sections": {str(k): v for k, v in sorted(self.sizes.items())},
                "expected": list(self.expected), "passed": self.passed}


def plane_section_sizes(geom: Geometry, point_indices: np.ndarray) -> dict[int, int]:
    """|pi ^ K| for every plane pi, as a size -> count histogram.

    Iterates over the points of K, incrementing all planes through each
    point; planes never touched meet K in 0 points.
    """
    Q4 = geom.order ** 4
    counter = np.zeros(Q4, dtype=np.int32)
    for idx in point_indices:
        P = ProjPoint4(geom.unpack(int(idx)))
        np.add.at(counter, geom.planes_through_point(P), 1)
    plane_idx = geom.pack_arr(geom.points())  # planes are self-dually indexed
    sizes, counts = np.unique(counter[plane_idx], return_counts=True)
    return {int(s): int(c) for s, c in zip(sizes, counts)}


def two_intersection_check(geom: Geometry, K: QHSet) -> SectionReport:
    """Exact check that K has only the two Hermitian plane-section sizes."""
    t0 = time.perf_counter()
    q = geom.q
    sizes = plane_section_sizes(geom, K.point_indices)
    expected = (q ** 3 + 1, q ** 3 + q ** 2 + 1)
    passed = set(sizes) == set(expected)
    return SectionReport(q, sizes, expected, passed, time.perf_counter() - t0)


def section_count_vector(geom: Geometry, point_indices: np.ndarray) -> np.ndarray:
    """|pi ^ S| for every plane pi, aligned with geom.points() order."""
    Q4 = geom.order ** 4
    counter = np.zeros(Q4, dtype=np.int32)
    for idx in point_indices:
        P = ProjPoint4(geom.unpack(int(idx)))
        np.add.at(counter, geom.planes_through_point(P), 1)
    return counter[geom.pack_arr(geom.points())]


def all_pairs_two_intersection(geom: Geometry) -> dict[tuple[str, str], SectionReport]:
    """Two-intersection verdicts for every valid join, computed by adding
    precomputed per-part plane-count vectors (the parts are disjoint)."""
    q = geom.q
    z1, z2 = geom.zsets()
    side1 = [SurfaceSpec("xi", x) for x in z1] + [SurfaceSpec("h-minus-h2")]
    side2 = [SurfaceSpec("xi", x) for x in z2] + [SurfaceSpec("h-minus-h1")]
    base_vec = section_count_vector(geom, geom.base_locus_points())
    vec1 = {s.describe(geom): section_count_vector(
        geom, geom.s_tilde_points(s.xi) if s.kind == "xi" else geom.label_points("H1"))
        for s in side1}
    vec2 = {s.describe(geom): section_count_vector(
        geom, geom.s_tilde_points(s.xi) if s.kind == "xi" else geom.label_points("H2"))
        for s in side2}
    expected = (q ** 3 + 1, q ** 3 + q ** 2 + 1)
    out = {}
    for k1, v1 in vec1.items():
        for k2, v2 in vec2.items():
            total = base_vec + v1 + v2
            sizes, counts = np.unique(total, return_counts=True)
            hist = {int(s): int(c) for s, c in zip(sizes, counts)}
            out[(k1, k2)] = SectionReport(q, hist, expected,
                                          set(hist) == set(expected))
    return out


# ---------------------------------------------------------------------------
# lines fully contained in a set
# ---------------------------------------------------------------------------

def lines_through_point_census(geom: Geometry, K: QHSet, P: ProjPoint4) -> int:
    """Number of full lines of K through a point P of K."""
    mask = K.mask(geom)
    p_idx = geom.pack(geom.point(P.coords).coords)
    if not mask[p_idx]:
        raise PointNotInSet(f"{P.coords} is not in the set")
    return _lines_in_set_through(geom, mask, geom.point(P.coords).coords)


def _lines_in_set_through(geom: Geometry, mask: np.ndarray, coords) -> int:
    # directions R: residual PG(2, q^2) over a complement of <P>
    basis = _complement_basis(geom, coords)
    reps = geom.pg2_reps()
    MUL, ADD = geom._MUL, geom._ADD
    R = np.zeros((len(reps), 4), dtype=np.int64)
    for k in range(4):
        acc = MUL[reps[:, 0], basis[0][k]].astype(np.int64)
        acc = ADD[acc, MUL[reps[:, 1], basis[1][k]]].astype(np.int64)
        acc = ADD[acc, MUL[reps[:, 2], basis[2][k]]].astype(np.int64)
        R[:, k] = acc
    ok = mask[geom.pack_arr(geom.normalize_arr(R))]
    for t in range(geom.order):
        if not ok.any():
            break
        W = np.zeros((len(reps), 4), dtype=np.int64)
        for k in range(4):
            W[:, k] = ADD[coords[k], MUL[t, R[:, k]]]
        ok &= mask[geom.pack_arr(geom.normalize_arr(W))]
    return int(np.count_nonzero(ok))


def _complement_basis(geom: Geometry, coords):
    piv = next(i for i in range(4) if coords[i] != 0)
    return [tuple(1 if j == k else 0 for j in range(4)) for k in range(4) if k != piv]


def line_count_fingerprint(geom: Geometry, K: QHSet) -> dict:
    """Histogram of full-line counts per point, keyed by orbit class."""
    mask = K.mask(geom)
    codes, xis = geom.classification()
    pts = geom.points()
    packed = geom.pack_arr(pts)
    sel = mask[packed]
    out: dict[str, dict[int, int]] = {}
    from .geom import LABELS
    for i in np.nonzero(sel)[0]:
        coords = tuple(int(v) for v in pts[i])
        tag = LABELS[int(codes[i])]
        cnt = _lines_in_set_through(geom, mask, coords)
        out.setdefault(tag, {})
        out[tag][cnt] = out[tag].get(cnt, 0) + 1
    return out


def qh_fingerprint(geom: Geometry, K: QHSet, with_lines: bool = True) -> dict:
    """Invariant fingerprint used as non-isomorphism evidence (never proof)."""
    fp = {"size": len(K),
          "sections": two_intersection_check(geom, K).to_jsonable()["sections"]}
    if with_lines:
        fp["lines_per_class"] = {k: dict(sorted(v.items()))
                                 for k, v in sorted(line_count_fingerprint(geom, K).items())}
    return fp


def hermitian_surface_set(geom: Geometry) -> QHSet:
    """The classical Hermitian surface as a control input."""
    pts = geom.points()
    _, Hv, _ = geom.forms_arr(pts)
    idx = np.sort(geom.pack_arr(pts[Hv == 0]))
    return QHSet(geom.q, idx, {"s1": "classical", "s2": "classical"})


# ---------------------------------------------------------------------------
# the discriminant variety in general dimension
# ---------------------------------------------------------------------------

class PGSpace:
    """Point enumeration and form evaluation over PG(N, q^2), canonical frame."""

    def __init__(self, N: int, q: int, gram: tuple[int, ...] | None = None):
        self.N, self.q = N, q
        fac = factorize(q)
        (p, e), = fac.items()
        self.tower = field_create(p, e, 2)
        tb = self.tower.tables
        self._ADD, self._MUL = tb.add2d, tb.mul2d
        self._FROB = tb.frob
        self.order = q * q
        self.gram = gram if gram is not None else (1,) * (N + 1)

    def points(self) -> np.ndarray:
        Q, N = self.order, self.N
        blocks = []
        for piv in range(N, -1, -1):
            free = N - piv
            shape = [np.arange(Q, dtype=np.int64)] * free
            if free:
                grid = np.stack(np.meshgrid(*shape, indexing="ij"), axis=-1).reshape(-1, free)
            else:
                grid = np.zeros((1, 0), dtype=np.int64)
            block = np.zeros((len(grid), N + 1), dtype=np.int64)
            block[:, piv] = 1
            block[:, piv + 1:] = grid
            blocks.append(block)
        return np.concatenate(blocks, axis=0)

    def pack_arr(self, coords: np.ndarray) -> np.ndarray:
        out = coords[:, 0].astype(np.int64)
        for k in range(1, self.N + 1):
            out = out * self.order + coords[:, k]
        return out

    def forms_arr(self, coords: np.ndarray):
        """b(u,u) and H(u) = b(u, u^phi) for the diagonal Gram form."""
        MUL, ADD, FROB = self._MUL, self._ADD, self._FROB
        bq = np.zeros(len(coords), dtype=np.int64)
        hh = np.zeros(len(coords), dtype=np.int64)
        for k in range(self.N + 1):
            c = coords[:, k]
            g = self.gram[k]
            bq = ADD[bq, MUL[g, MUL[c, c]]].astype(np.int64)
            hh = ADD[hh, MUL[g, MUL[c, FROB[c]]]].astype(np.int64)
        return bq, hh

    def discriminant_variety(self) -> np.ndarray:
        """Packed indices of {H(u)^2 = b(u,u)^{q+1}}.

        With Q = b(u,u)/2 this is exactly H^2 = 4 Q^{q+1}, because
        2^{q+1} = 4 in F_q.
        """
        pts = self.points()
        bq, hh = self.forms_arr(pts)
        MUL, FROB = self._MUL, self._FROB
        lhs = MUL[hh, hh].astype(np.int64)
        rhs = MUL[bq, FROB[bq]].astype(np.int64)
        return np.sort(self.pack_arr(pts[lhs == rhs]))

    def hermitian_variety(self) -> np.ndarray:
        pts = self.points()
        _, hh = self.forms_arr(pts)
        return np.sort(self.pack_arr(pts[hh == 0]))

    def hyperplane_section_sizes(self, point_indices: np.ndarray) -> dict[int, int]:
        """Exact histogram of |hyperplane ^ set| over all hyperplanes."""
        Q, N = self.order, self.N
        total_idx = self.pack_arr(self.points())
        counter = np.zeros(Q ** (N + 1), dtype=np.int32)
        # hyperplanes through a point = duals orthogonal to it: a PG(N-1, q^2)
        sub = PGSpace(N - 1, self.q) if N >= 2 else None
        reps = sub.points() if sub is not None else np.ones((1, 1), dtype=np.int64)
        MUL, ADD = self._MUL, self._ADD
        NEG = np.array([self.tower.neg_i(v) for v in range(self.order)], dtype=np.int64)
        INV = np.array([0] + [self.tower.inv_i(v) for v in range(1, self.order)],
                       dtype=np.int64)
        for idx in point_indices:
            coords = []
            v = int(idx)
            for _ in range(N + 1):
                v, r = divmod(v, Q)
                coords.append(r)
            coords = coords[::-1]
            piv = next(i for i in range(N + 1) if coords[i] != 0)
            basis = []
            for j in range(N + 1):
                if j == piv:
                    continue
                vec = [0] * (N + 1)
                vec[j] = 1
                vec[piv] = int(NEG[self.tower.mul_i(coords[j], int(INV[coords[piv]]))])
                basis.append(vec)
            duals = np.zeros((len(reps), N + 1), dtype=np.int64)
            for k in range(N + 1):
                acc = np.zeros(len(reps), dtype=np.int64)
                for r in range(N):
                    acc = ADD[acc, MUL[reps[:, r], basis[r][k]]].astype(np.int64)
                duals[:, k] = acc
            lead = np.zeros(len(duals), dtype=np.int64)
            for k in range(N, -1, -1):
                col = duals[:, k]
                lead = np.where(col != 0, col, lead)
            inv = INV[lead]
            for k in range(N + 1):
                duals[:, k] = MUL[inv, duals[:, k]]
            np.add.at(counter, self.pack_arr(duals), 1)
        sizes, counts = np.unique(counter[total_idx], return_counts=True)
        return {int(s): int(c) for s, c in zip(sizes, counts)}


def pavese_variety(N: int, q: int, frame: str = "auto",
                   gram: tuple[int, ...] | None = None):
    """The degree-2(q+1) variety H^2 = 4 Q^{q+1} as a sorted point-index set.

    frame="subquadric" (default for N=3) uses the PG(3,q^2) geometry of this
    package, whose subgeometry is the fixed set of the polarity product, so
    the variety coincides pointwise with the tangent/generator line union.
    frame="canonical" (default for N>3) uses the coordinate-Frobenius
    subgeometry and a diagonal Gram form.
    """
    if N < 3:
        raise ValueError("needs N >= 3")
    if frame == "auto":
        frame = "subquadric" if N == 3 else "canonical"
    if frame == "subquadric":
        if N != 3:
            raise ValueError("subquadric frame only exists for N=3")
        g = Geometry(q)
        pts = g.points()
        _, _, Dv = g.forms_arr(pts)
        return np.sort(g.pack_arr(pts[Dv == 0])), g
    space = PGSpace(N, q, gram)
    return space.discriminant_variety(), space


def sigma_lines(geom: Geometry) -> list:
    """All lines of the subgeometry, each once (canonical dedup)."""
    from .geom import DegenerateLine, ProjPoint4, SigmaLine
    pts = geom.points()
    sig_pts = pts[geom.sigma_mask_arr(pts)]
    params = [geom.dickson_params(ProjPoint4(tuple(int(v) for v in p)))
              for p in sig_pts]
    lines, done = [], set()
    for i in range(len(params)):
        for j in range(i + 1, len(params)):
            try:
                line = SigmaLine(geom, params[i], params[j])
            except DegenerateLine:
                continue
            key = line.canonical_key()
            if key not in done:
                done.add(key)
                lines.append(line)
    return lines


def line_union_set(geom: Geometry) -> np.ndarray:
    """Union of the extended tangent and generator lines of the subquadric."""
    seen: set[int] = set()
    for line in sigma_lines(geom):
        if geom.subline_type(line) in ("tangent", "generator"):
            seen.update(line.extension_points())
    return np.array(sorted(seen), dtype=np.int64)


def compare_with_line_union(q: int) -> bool:
    """Set equality of the N=3 discriminant variety with the line union."""
    var, g = pavese_variety(3, q)
    union = line_union_set(g)
    return len(var) == len(union) and bool(np.all(var == union))
