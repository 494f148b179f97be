"""The n x n matrix model for threefold tensors over F_{q^n}.

A tensor is an F_q-bilinear multiplication on F_{q^n}; identifying a
vector x with (x, x^q, ..., x^{q^(n-1)}) turns it into a matrix
M = (c_ij) acting as (x, y) |-> sum_ij c_ij x^{q^i} y^{q^j}.

An F_q-linear map f(x) = sum_i f_i x^{q^i} is represented by the matrix
D_f with D_f[k][j] = f_{k-j}^{q^j} (indices mod n), which satisfies
(x, x^q, ...) . D_f = (f(x), f(x)^q, ...).  These matrices are exactly
the fixed points of the semilinear map

    sigma: M |-> (c_{i-1, j-1}^q)_{i,j}   (indices mod n),

and they realize a subgeometry PG(n^2-1, q) inside PG(n^2-1, q^n).
Contracting a tensor on its third slot by z gives the map

    h_z = sum_j z^{q^j} M^{sigma^j},

always one of those fixed matrices; a tensor is nonsingular (defines a
semifield multiplication) iff h_z is invertible for every z != 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .gf import FieldElement, FieldTower, tower_for_q_squared

Matrix = tuple[tuple[int, ...], ...]


class SingularIsotopyComponent(ValueError):
    """Raised when an isotopy triple contains a non-invertible map."""


# ---------------------------------------------------------------------------
# small exact linear algebra over the top field (int encodings)
# ---------------------------------------------------------------------------

def mat_rank(t: FieldTower, m: Matrix) -> int:
    rows = [list(r) for r in m]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = t.inv_i(rows[rank][col])
        rows[rank] = [t.mul_i(inv, v) for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                c = rows[r][col]
                rows[r] = [t.sub_i(v, t.mul_i(c, w)) for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def mat_det(t: FieldTower, m: Matrix) -> int:
    rows = [list(r) for r in m]
    n = len(rows)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = t.neg_i(det)
        det = t.mul_i(det, rows[col][col])
        inv = t.inv_i(rows[col][col])
        for r in range(col + 1, n):
            if rows[r][col] != 0:
                c = t.mul_i(rows[r][col], inv)
                rows[r] = [t.sub_i(v, t.mul_i(c, w)) for v, w in zip(rows[r], rows[col])]
    return det


def mat_mul(t: FieldTower, a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = 0
            for l in range(k):
                s = t.add_i(s, t.mul_i(a[i][l], b[l][j]))
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat_transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def mat_add(t: FieldTower, a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(t.add_i(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(t: FieldTower, c: int, a: Matrix) -> Matrix:
    return tuple(tuple(t.mul_i(c, x) for x in r) for r in a)


def _fq_coords(t: FieldTower, vals) -> list[int]:
    """Flatten top-field encodings into F_q digit coordinates."""
    out = []
    for v in vals:
        out.extend(t.top.digits(v))
    return out


def fq_row_reduce(t: FieldTower, rows: list[list[int]]) -> list[list[int]]:
    """Reduced row echelon form over the base field F_q; returns nonzero rows."""
    base = t.base
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = base.inv(rows[rank][col])
        rows[rank] = [base.mul(inv, v) for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                c = rows[r][col]
                rows[r] = [_sub_base(t, v, base.mul(c, w)) for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rows[:rank]


def _sub_base(t: FieldTower, a: int, b: int) -> int:
    base = t.base
    return base.sub(a, b) if t.e == 1 else base.sub_(a, b)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizedMap:
    """f(x) = sum_i coeffs[i] * x^{q^i} with coefficients in F_{q^n}."""

    tower: FieldTower
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.tower.n:
            raise ValueError(f"need {self.tower.n} coefficients")

    def __call__(self, x):
        t = self.tower
        if isinstance(x, FieldElement):
            return FieldElement(t, "top", self(x.lift().val))
        acc = 0
        xi = x
        for c in self.coeffs:
            acc = t.add_i(acc, t.mul_i(c, xi))
            xi = t.frob_i(xi, 1)
        return acc

    def dickson(self) -> Matrix:
        t, n = self.tower, self.tower.n
        return tuple(
            tuple(t.frob_i(self.coeffs[(k - j) % n], j) for j in range(n))
            for k in range(n))

    def rank(self) -> int:
        return mat_rank(self.tower, self.dickson())

    def kernel(self) -> list[int]:
        return [x for x in range(self.tower.order) if self(x) == 0]

    def is_invertible(self, check: str = "det") -> bool:
        """Invertibility via the matrix determinant or by kernel enumeration."""
        if check == "det":
            return mat_det(self.tower, self.dickson()) != 0
        if check == "kernel":
            return all(self(x) != 0 for x in range(1, self.tower.order))
        raise ValueError(f"unknown check {check!r}")

    @staticmethod
    def identity(t: FieldTower) -> "LinearizedMap":
        return LinearizedMap(t, (1,) + (0,) * (t.n - 1))


@dataclass(frozen=True)
class CyclicTensor:
    """A threefold tensor as an n x n matrix over F_{q^n}."""

    tower: FieldTower
    entries: Matrix

    def __post_init__(self):
        n = self.tower.n
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise ValueError(f"entries must be {n}x{n}")

    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def n(self) -> int:
        return self.tower.n

    # named coordinates for n=2
    @property
    def alpha(self):
        return self.entries[0][0]

    @property
    def beta(self):
        return self.entries[0][1]

    @property
    def gamma(self):
        return self.entries[1][0]

    @property
    def delta(self):
        return self.entries[1][1]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.entries for v in r)

    def rank(self) -> int:
        return mat_rank(self.tower, self.entries)

    def to_json(self) -> str:
        t = self.tower
        entries = [",".join(map(str, t.prime_coords(v))) for r in self.entries for v in r]
        return json.dumps({"q": t.q, "n": t.n, "entries": entries, "mod": list(t.top_modulus)})

    @staticmethod
    def from_json(s: str, tower: FieldTower | None = None) -> "CyclicTensor":
        d = json.loads(s)
        if tower is None:
            from .gf import factorize, field_create
            (p, e), = factorize(d["q"]).items()
            tower = field_create(p, e, d["n"],
                                 top_modulus=tuple(d["mod"]) if "mod" in d else None)
        n = d["n"]
        vals = [tower.element_from_string(s_).val for s_ in d["entries"]]
        entries = tuple(tuple(vals[i * n + j] for j in range(n)) for i in range(n))
        return CyclicTensor(tower, entries)


@dataclass(frozen=True)
class IsotopyTriple:
    """Three invertible additive maps acting on a multiplication."""

    f: LinearizedMap
    g: LinearizedMap
    h: LinearizedMap

    def __post_init__(self):
        for name in ("f", "g", "h"):
            if not getattr(self, name).is_invertible():
                raise SingularIsotopyComponent(f"component {name} is not invertible")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def dickson_matrix(f: LinearizedMap) -> tuple[Matrix, int]:
    """Matrix of a linearized map in the cyclic basis, with its rank."""
    d = f.dickson()
    return d, mat_rank(f.tower, d)


def tensor_from_pure_sum(t: FieldTower, terms) -> CyclicTensor:
    """sum_k gamma_k (alpha_k, alpha_k^q, ...)^T (beta_k, beta_k^q, ...)."""
    n = t.n
    entries = [[0] * n for _ in range(n)]
    for alpha, beta, gamma in terms:
        a = alpha.lift().val if isinstance(alpha, FieldElement) else alpha
        b = beta.lift().val if isinstance(beta, FieldElement) else beta
        g = gamma.lift().val if isinstance(gamma, FieldElement) else gamma
        for i in range(n):
            ai = t.frob_i(a, i)
            for j in range(n):
                entries[i][j] = t.add_i(
                    entries[i][j], t.mul_i(g, t.mul_i(ai, t.frob_i(b, j))))
    return CyclicTensor(t, tuple(tuple(r) for r in entries))


def field_tensor(t: FieldTower) -> CyclicTensor:
    """The tensor of field multiplication: c_00 = 1, all other entries 0."""
    n = t.n
    return CyclicTensor(t, tuple(tuple(1 if i == j == 0 else 0 for j in range(n))
                                 for i in range(n)))


def bilinear_eval(M: CyclicTensor, x, y):
    t = M.tower
    as_elem = isinstance(x, FieldElement) or isinstance(y, FieldElement)
    xv = x.lift().val if isinstance(x, FieldElement) else x
    yv = y.lift().val if isinstance(y, FieldElement) else y
    acc = 0
    for i in range(M.n):
        xi = t.frob_i(xv, i)
        for j in range(M.n):
            acc = t.add_i(acc, t.mul_i(M.entries[i][j], t.mul_i(xi, t.frob_i(yv, j))))
    return FieldElement(t, "top", acc) if as_elem else acc


def sigma_map(M: CyclicTensor) -> CyclicTensor:
    """(M^sigma)_{ij} = c_{i-1,j-1}^q, indices mod n; fixes exactly the D_f."""
    t, n = M.tower, M.n
    return CyclicTensor(t, tuple(
        tuple(t.frob_i(M.entries[(i - 1) % n][(j - 1) % n], 1) for j in range(n))
        for i in range(n)))


def sigma_power(M: CyclicTensor, j: int) -> CyclicTensor:
    for _ in range(j % M.n):
        M = sigma_map(M)
    return M


def contraction(M: CyclicTensor, z) -> LinearizedMap:
    """The third-slot contraction h_z = sum_j z^{q^j} M^{sigma^j}."""
    t, n = M.tower, M.n
    zv = z.lift().val if isinstance(z, FieldElement) else z
    acc = tuple((0,) * n for _ in range(n))
    Mi = M
    for j in range(n):
        acc = mat_add(t, acc, mat_scale(t, t.frob_i(zv, j), Mi.entries))
        Mi = sigma_map(Mi)
    # acc is a Dickson matrix; its coefficient vector is the first column
    return LinearizedMap(t, tuple(acc[i][0] for i in range(n)))


def contraction_space(M: CyclicTensor) -> list[LinearizedMap]:
    """An F_q-basis of {h_z : z in F_{q^n}} (dimension can drop below n)."""
    t, n = M.tower, M.n
    maps = [contraction(M, t.q ** i) for i in range(n)]
    rows = [_fq_coords(t, f.coeffs) for f in maps]
    reduced = fq_row_reduce(t, rows)
    out = []
    for row in reduced:
        coeffs = tuple(t.top.undigits(tuple(row[i * n:(i + 1) * n])) for i in range(n))
        out.append(LinearizedMap(t, coeffs))
    return out


def contraction_space_key(M: CyclicTensor) -> tuple:
    """Canonical key identifying C_3(M) as an F_q-subspace."""
    t, n = M.tower, M.n
    rows = [_fq_coords(t, contraction(M, t.q ** i).coeffs) for i in range(n)]
    return tuple(tuple(r) for r in fq_row_reduce(t, rows))


def tau1(M: CyclicTensor) -> CyclicTensor:
    return CyclicTensor(M.tower, mat_transpose(M.entries))


def tau2(M: CyclicTensor) -> CyclicTensor:
    """(tau2 M)_{ij} = M_{j-i, -i}^{q^i}, indices mod n."""
    t, n = M.tower, M.n
    return CyclicTensor(t, tuple(
        tuple(t.frob_i(M.entries[(j - i) % n][(-i) % n], i) for j in range(n))
        for i in range(n)))


def s3_apply(word, M: CyclicTensor) -> CyclicTensor:
    """Apply a word in the generators; tokens "t1" and "t2", applied left to right."""
    if isinstance(word, str):
        word = word.split()
    for tok in word:
        if tok == "t1":
            M = tau1(M)
        elif tok == "t2":
            M = tau2(M)
        elif tok:
            raise ValueError(f"unknown generator {tok!r}")
    return M


S3_WORDS = ("", "t1", "t2", "t2 t2", "t1 t2", "t1 t2 t2")


def s3_images(M: CyclicTensor) -> dict[str, CyclicTensor]:
    return {w: s3_apply(w, M) for w in S3_WORDS}


def isotopy_apply(triple: IsotopyTriple, M: CyclicTensor) -> CyclicTensor:
    """(f,g,1) then (1,1,h):  M -> sum_i h_i (D_f M D_g^T)^{sigma^i}."""
    t, n = M.tower, M.n
    core = mat_mul(t, triple.f.dickson(), mat_mul(t, M.entries, mat_transpose(triple.g.dickson())))
    Mi = CyclicTensor(t, core)
    acc = tuple((0,) * n for _ in range(n))
    for i in range(n):
        acc = mat_add(t, acc, mat_scale(t, triple.h.coeffs[i], Mi.entries))
        Mi = sigma_map(Mi)
    return CyclicTensor(t, acc)


def is_nonsingular_tensor(M: CyclicTensor, check: str = "det") -> bool:
    """True iff every contraction h_z with z != 0 is invertible."""
    if M.is_zero():
        return False
    return all(contraction(M, z).is_invertible(check) for z in range(1, M.tower.order))


# -- BEL rank ----------------------------------------------------------------

_invertible_h_cache: dict[int, list[tuple[int, ...]]] = {}


def _invertible_linearized_tuples(t: FieldTower) -> list[tuple[int, ...]]:
    key = id(t)
    if key not in _invertible_h_cache:
        n, N = t.n, t.order
        out = []
        for enc in range(1, N ** n):
            coeffs = []
            v = enc
            for _ in range(n):
                v, r = divmod(v, N)
                coeffs.append(r)
            h = LinearizedMap(t, tuple(coeffs))
            if h.is_invertible():
                out.append(tuple(coeffs))
        _invertible_h_cache[key] = out
    return _invertible_h_cache[key]


def bel_rank(M: CyclicTensor, stop_at: int = 1) -> int:
    """Minimum matrix rank over the third-action images of all six
    symmetric-group images of M, the minimum being over invertible h.

    With stop_at=r the scan stops once a rank <= r is found, so the
    returned value is exact whenever it is <= stop_at and an upper bound
    otherwise.  Value 1 characterizes tensors isotopic to the field.
    """
    if M.is_zero():
        raise ValueError("BEL rank needs a nonzero tensor")
    t, n = M.tower, M.n
    best: int | None = None
    for M2 in s3_images(M).values():
        sig = [sigma_power(M2, i).entries for i in range(n)]
        for coeffs in _invertible_linearized_tuples(t):
            acc = sig[0] if coeffs[0] == 1 else mat_scale(t, coeffs[0], sig[0])
            for i in range(1, n):
                if coeffs[i]:
                    acc = mat_add(t, acc, mat_scale(t, coeffs[i], sig[i]))
            r = mat_rank(t, acc)
            if r and (best is None or r < best):
                best = r
                if best <= stop_at:
                    return best
    assert best is not None
    return best


def bel_rank_report(M: CyclicTensor) -> dict:
    """Exact BEL rank plus diagnostics (degenerate sigma-span flag)."""
    t, n = M.tower, M.n
    rows = [_fq_coords(t, [v for r in sigma_power(M, i).entries for v in r]) for i in range(n)]
    # independence of the sigma-images over F_{q^n}: check matrix rank instead
    span_mat = tuple(tuple(v for r in sigma_power(M, i).entries for v in r) for i in range(n))
    independent = mat_rank(t, span_mat) == n
    val = bel_rank(M)
    return {"bel_rank": val, "sigma_images_independent": independent,
            "q": t.q, "n": n}


def belrank_inequality_margin(n: int, q: float) -> float:
    """LHS - RHS of  q^{n(n-1)} > (n-1)(n-2) q^{n(n-3/2)} + 5 n^{13/3} q^{n(n-2)},
    normalized by q^{n(n-2)} to stay in floating range."""
    return q ** n - (n - 1) * (n - 2) * q ** (n / 2) - 5.0 * n ** (13.0 / 3.0)


def belrank_inequality_holds(n: int, q: float) -> bool:
    return belrank_inequality_margin(n, q) > 0


def belrank_qbound(n: int) -> float:
    """Least real q0 >= 2 such that the rank inequality holds for all q > q0."""
    if n < 3:
        raise ValueError("defined for n >= 3")
    # beyond q* the normalized margin is strictly increasing
    qstar = max(2.0, ((n - 1) * (n - 2) / 2.0) ** (2.0 / n))
    if belrank_inequality_margin(n, qstar) > 0 and belrank_inequality_margin(n, 2.0) > 0:
        return 2.0
    lo, hi = qstar, qstar + 1.0
    while not belrank_inequality_holds(n, hi):
        hi *= 2.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if belrank_inequality_holds(n, mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- tiny tensor-rank brute force ---------------------------------------------

def tensor_rank_upper(M: CyclicTensor, rmax: int) -> int | None:
    """Least r <= rmax with M a sum of r pure tensors (exhaustive set sums).

    Only meant for very small fields; returns None if rank exceeds rmax.
    """
    t, n = M.tower, M.n
    target = M.entries
    pures = set()
    for a in range(1, t.order):
        for b in range(1, t.order):
            for g in range(1, t.order):
                pures.add(tensor_from_pure_sum(t, [(a, b, g)]).entries)
    reach = {tuple((0,) * n for _ in range(n))}
    for r in range(1, rmax + 1):
        reach = {mat_add(t, m, p) for m in reach for p in pures}
        if target in reach:
            return r
    return None
