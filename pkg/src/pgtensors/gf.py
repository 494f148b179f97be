"""Exact arithmetic in the tower F_p <= F_q <= F_{q^n}.

Elements are encoded as integers: an element of an extension of degree k
over a subfield of order Q is the little-endian base-Q integer of its
coefficient vector.  For a prime base field (e = 1) the digits of a top
element are therefore literally its F_p coefficients, which is also the
serialization format ("a0,a1,...", low degree first).

The tower is built from explicit irreducible moduli.  When a modulus is
omitted, the lexicographically smallest irreducible monic polynomial of
the right degree is chosen (smallest little-endian integer encoding of
the non-leading coefficients), so encodings are reproducible across
runs: F_9 always means F_3[x]/(x^2+1), F_25 means F_5[x]/(x^2+2), etc.

Two arithmetic routes coexist: generic polynomial arithmetic (always
available) and discrete-log tables built from a primitive element
(orders up to 2**20).  The table route backs the vectorized numpy
helpers used by the geometry modules; the polynomial route is the
independent reference the tests cross-check against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

TABLE_MAX_ORDER = 1 << 20   # discrete-log tables refused above this
TABLE2D_MAX_ORDER = 2048    # full 2D add/mul tables refused above this
ORDER_MAX = 1 << 32         # hard scale limit for the whole tower


class CompositeCharacteristic(ValueError):
    """Raised when the requested characteristic is not prime."""


class ReducibleModulus(ValueError):
    """Raised when a supplied modulus fails the irreducibility test."""


class EvenCharacteristicUnsupported(ValueError):
    """Raised by operations that require odd q (square classes etc.)."""


class UnsupportedScale(ValueError):
    """Raised when a requested computation exceeds the configured bounds."""


class SquareClass(Enum):
    ZERO = "zero"
    SQUARE = "square"
    NONSQUARE = "nonsquare"


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def factorize(m: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs stay below 2**32)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


# ---------------------------------------------------------------------------
# scalar field levels
# ---------------------------------------------------------------------------

class _PrimeLevel:
    """F_p with elements 0..p-1."""

    def __init__(self, p: int):
        self.order = p
        self.char = p

    def add(self, a, b):
        return (a + b) % self.order

    def sub(self, a, b):
        return (a - b) % self.order

    def neg(self, a):
        return (-a) % self.order

    def mul(self, a, b):
        return (a * b) % self.order

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.order - 2, self.order)

    def pow(self, a, k):
        if a == 0:
            return 0 if k else 1
        return pow(a, k % (self.order - 1), self.order)

    def digits(self, a):
        return (a,)


class _ExtLevel:
    """Extension of a sublevel by a monic irreducible modulus.

    Elements are base-|sub| little-endian digit encodings; the digits are
    sublevel encodings of the coefficients.
    """

    def __init__(self, sub, modulus: tuple[int, ...]):
        self.sub = sub
        self.degree = len(modulus) - 1
        if self.degree < 1:
            raise ValueError("modulus must have degree >= 1")
        if modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        self.modulus = tuple(modulus)
        self.order = sub.order ** self.degree
        self.char = sub.char
        # x^degree = -(low part of modulus)
        self._red = tuple(sub.neg(c) for c in modulus[:-1])

    def digits(self, a):
        q, k = self.sub.order, self.degree
        out = []
        for _ in range(k):
            a, r = divmod(a, q)
            out.append(r)
        return tuple(out)

    def undigits(self, coeffs):
        q = self.sub.order
        a = 0
        for c in reversed(coeffs):
            a = a * q + c
        return a

    def add(self, a, b):
        s = self.sub
        return self.undigits(tuple(s.add(x, y) for x, y in zip(self.digits(a), self.digits(b))))

    def sub_(self, a, b):
        s = self.sub
        return self.undigits(tuple(s.sub(x, y) for x, y in zip(self.digits(a), self.digits(b))))

    # keep the protocol name `sub` for the operation, `self.sub` is the sublevel
    def neg(self, a):
        s = self.sub
        return self.undigits(tuple(s.neg(x) for x in self.digits(a)))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        s, k = self.sub, self.degree
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    prod[i + j] = s.add(prod[i + j], s.mul(x, y))
        # reduce degrees >= k using x^k = red
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c == 0:
                continue
            prod[d] = 0
            for j, r in enumerate(self._red):
                if r:
                    prod[d - k + j] = s.add(prod[d - k + j], s.mul(c, r))
        return self.undigits(tuple(prod[:k]))

    def pow(self, a, k):
        if a == 0:
            return 0 if k else 1
        k %= self.order - 1
        r, base = 1, a
        while k:
            if k & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            k >>= 1
        return r

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 2)


def _level_sub(level, a, b):
    return level.sub(a, b) if isinstance(level, _PrimeLevel) else level.sub_(a, b)


# ---------------------------------------------------------------------------
# polynomial helpers over a level (little-endian coefficient lists)
# ---------------------------------------------------------------------------

def _ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f

def _pmulmod(level, f, g, m):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, x in enumerate(f):
        if x == 0:
            continue
        for j, y in enumerate(g):
            if y:
                out[i + j] = level.add(out[i + j], level.mul(x, y))
    return _pmod(level, out, m)

def _pmod(level, f, m):
    f = list(f)
    dm = len(m) - 1
    inv_lead = level.inv(m[-1])
    while len(f) - 1 >= dm and _ptrim(f):
        d = len(f) - 1
        c = level.mul(f[-1], inv_lead)
        for j in range(dm + 1):
            f[d - dm + j] = _level_sub(level, f[d - dm + j], level.mul(c, m[j]))
        _ptrim(f)
    return f

def _ppowmod(level, f, k, m):
    r, base = [1], _pmod(level, list(f), m)
    while k:
        if k & 1:
            r = _pmulmod(level, r, base, m)
        base = _pmulmod(level, base, base, m)
        k >>= 1
    return r

def _pgcd(level, f, g):
    f, g = _ptrim(list(f)), _ptrim(list(g))
    while g:
        f, g = g, _pmod(level, f, g)
        _ptrim(g)
    return f


def is_irreducible(level, modulus) -> bool:
    """Rabin's test for a monic polynomial over the given level's field."""
    k = len(modulus) - 1
    if k < 1 or modulus[-1] != 1:
        return False
    if k == 1:
        return True
    Q = level.order
    x = [0, 1]
    # x^(Q^k) == x mod f
    xp = _ppowmod(level, x, Q ** k, modulus)
    diff = _ptrim([_level_sub(level, a, b) for a, b in
                   zip(xp + [0] * 2, x + [0] * max(0, len(xp) - 2))][:max(len(xp), 2)])
    if diff:
        return False
    for r in factorize(k):
        xp = _ppowmod(level, x, Q ** (k // r), modulus)
        sub = list(xp)
        while len(sub) < 2:
            sub.append(0)
        sub[1] = _level_sub(level, sub[1], 1)
        g = _pgcd(level, modulus, sub)
        if len(_ptrim(list(g))) > 1:
            return False
    return True


def default_modulus(level, degree: int) -> tuple[int, ...]:
    """Smallest monic irreducible of the given degree over level's field.

    Candidates are ordered by the little-endian integer encoding of their
    non-leading coefficient vector, which makes the choice reproducible.
    """
    Q = level.order
    for m in range(Q ** degree):
        coeffs = []
        a = m
        for _ in range(degree):
            a, r = divmod(a, Q)
            coeffs.append(r)
        cand = tuple(coeffs) + (1,)
        if is_irreducible(level, cand):
            return cand
    raise RuntimeError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# the tower
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    """An element of one level of a FieldTower (int-encoded)."""

    tower: "FieldTower"
    level: str  # "base" or "top"
    val: int

    def _lv(self):
        return self.tower._level(self.level)

    @property
    def coords(self) -> tuple[int, ...]:
        """Prime-field coefficient vector, low degree first."""
        return self.tower.prime_coords(self.val, self.level)

    def serialize(self) -> str:
        return ",".join(str(c) for c in self.coords)

    def _coerce(self, other):
        if isinstance(other, int):
            other = self.tower.element(other % self.tower.p, "base").lift() \
                if self.level == "top" else self.tower.element(other % self.tower.p, "base")
        if other.tower is not self.tower:
            raise ValueError("elements from different towers")
        if other.level != self.level:
            if other.level == "base" and self.level == "top":
                other = other.lift()
            else:
                raise ValueError("cannot mix base and top elements this way")
        return other

    def lift(self) -> "FieldElement":
        """Embed a base element into the top field (constant digit)."""
        if self.level == "top":
            return self
        return FieldElement(self.tower, "top", self.val)

    def in_base(self) -> bool:
        return self.level == "base" or self.tower.frob_i(self.val, 1) == self.val

    def down(self) -> "FieldElement":
        """Reinterpret a top element lying in F_q as a base element."""
        if self.level == "base":
            return self
        digs = self.tower.top._level_digits(self.val) if False else self.tower.top.digits(self.val)
        if any(digs[1:]):
            raise ValueError("element is not in the base field")
        return FieldElement(self.tower, "base", digs[0])

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.tower, self.level, self._lv().add(self.val, other.val))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.tower, self.level, self._lv().neg(self.val))

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.tower, self.level, _level_sub(self._lv(), self.val, other.val))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.tower, self.level, self._lv().mul(self.val, other.val))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return FieldElement(self.tower, self.level, self._lv().mul(self.val, self._lv().inv(other.val)))

    def __pow__(self, k: int):
        if k < 0:
            return FieldElement(self.tower, self.level, self._lv().pow(self._lv().inv(self.val), -k))
        return FieldElement(self.tower, self.level, self._lv().pow(self.val, k))

    def __bool__(self):
        return self.val != 0

    def __repr__(self):
        return f"<{self.serialize()} in GF({self._lv().order})>"


class FieldTower:
    """The tower F_p <= F_q <= F_{q^n} with q = p^e.

    Immutable after construction; all arithmetic is pure, so instances can
    be shared freely across parallel workers.
    """

    def __init__(self, p: int, e: int, n: int,
                 base_modulus: tuple[int, ...] | None = None,
                 top_modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise CompositeCharacteristic(f"p={p} is not prime")
        if e < 1 or n < 1:
            raise ValueError("extension degrees must be >= 1")
        if p ** (e * n) > ORDER_MAX:
            raise UnsupportedScale(f"|F| = {p}^{e * n} exceeds 2^32")
        self.p, self.e, self.n = p, e, n
        self.q = p ** e
        self.order = self.q ** n

        prime = _PrimeLevel(p)
        if e == 1:
            if base_modulus is not None and tuple(base_modulus) != (0, 1):
                raise ValueError("base modulus must be x when e=1")
            self.base = prime
            self.base_modulus = (0, 1)
        else:
            bm = tuple(base_modulus) if base_modulus is not None else default_modulus(prime, e)
            if len(bm) - 1 != e:
                raise ValueError(f"base modulus must have degree e={e}")
            if not is_irreducible(prime, bm):
                raise ReducibleModulus(f"base modulus {bm} is reducible over F_{p}")
            self.base = _ExtLevel(prime, bm)
            self.base_modulus = bm

        tm = tuple(top_modulus) if top_modulus is not None else default_modulus(self.base, n)
        if len(tm) - 1 != n:
            raise ValueError(f"top modulus must have degree n={n}")
        if not is_irreducible(self.base, tm):
            raise ReducibleModulus(f"top modulus {tm} is reducible over F_{self.q}")
        self.top = _ExtLevel(self.base, tm)
        self.top_modulus = tm

        self._tables = None
        if self.order <= TABLE_MAX_ORDER:
            self._tables = _Tables(self)

    # -- plumbing -----------------------------------------------------------

    def _level(self, name: str):
        if name == "base":
            return self.base
        if name == "top":
            return self.top
        raise ValueError(f"unknown level {name!r}")

    def element(self, value, level: str = "top") -> FieldElement:
        """Build an element from an int encoding or a coefficient iterable."""
        lv = self._level(level)
        if isinstance(value, FieldElement):
            return value
        if not isinstance(value, int):
            coeffs = tuple(value)
            deg = self.n if level == "top" else (self.e if self.e > 1 else 1)
            if len(coeffs) > deg:
                raise ValueError("too many coefficients")
            value = 0
            for c in reversed(coeffs):
                value = value * (lv.sub.order if isinstance(lv, _ExtLevel) else lv.order) + c
        if not 0 <= value < lv.order:
            raise ValueError(f"encoding {value} out of range for order {lv.order}")
        return FieldElement(self, level, value)

    def element_from_string(self, s: str, level: str = "top") -> FieldElement:
        coords = tuple(int(c) % self.p for c in s.split(","))
        return self.element(self.from_prime_coords(coords, level), level)

    def prime_coords(self, val: int, level: str = "top") -> tuple[int, ...]:
        lv = self._level(level)
        if isinstance(lv, _PrimeLevel):
            return (val,)
        digs = lv.digits(val)
        if isinstance(lv.sub, _PrimeLevel):
            return digs
        return tuple(c for d in digs for c in lv.sub.digits(d))

    def from_prime_coords(self, coords, level: str = "top") -> int:
        lv = self._level(level)
        if isinstance(lv, _PrimeLevel):
            (c,) = tuple(coords) + (0,) * (1 - len(tuple(coords)))
            return c % self.p
        coords = list(coords)
        if isinstance(lv.sub, _PrimeLevel):
            coords += [0] * (lv.degree - len(coords))
            return lv.undigits(tuple(c % self.p for c in coords))
        e = lv.sub.degree
        coords += [0] * (lv.degree * e - len(coords))
        digs = tuple(lv.sub.undigits(tuple(coords[i * e:(i + 1) * e])) for i in range(lv.degree))
        return lv.undigits(digs)

    def elements(self, level: str = "top"):
        lv = self._level(level)
        return (FieldElement(self, level, v) for v in range(lv.order))

    def zero(self, level: str = "top") -> FieldElement:
        return FieldElement(self, level, 0)

    def one(self, level: str = "top") -> FieldElement:
        return FieldElement(self, level, 1)

    def gen(self) -> FieldElement:
        """The class of x in the top extension (encoding = q)."""
        return FieldElement(self, "top", self.q)

    @property
    def spec_string(self) -> str:
        mod = ",".join(str(c) for c in self.top_modulus)
        if self.e == 1:
            return f"p={self.p},e={self.e},n={self.n},mod={mod}"
        bm = ",".join(str(c) for c in self.base_modulus)
        return f"p={self.p},e={self.e},n={self.n},basemod={bm},mod={mod}"

    # -- scalar integer ops on top-level encodings ---------------------------
    # (table fast paths exist for small orders; the polynomial route is the
    # reference implementation and the two are cross-checked in the tests)

    def add_i(self, a: int, b: int) -> int:
        t = self._tables
        if t is not None and t.add_rows is not None:
            return t.add_rows[a][b]
        return self.top.add(a, b)

    def sub_i(self, a: int, b: int) -> int:
        t = self._tables
        if t is not None and t.add_rows is not None:
            return t.add_rows[a][t.neg_list[b]]
        return self.top.sub_(a, b)

    def neg_i(self, a: int) -> int:
        t = self._tables
        if t is not None and t.neg_list is not None:
            return t.neg_list[a]
        return self.top.neg(a)

    def mul_i(self, a: int, b: int) -> int:
        t = self._tables
        if t is not None and t.mul_rows is not None:
            return t.mul_rows[a][b]
        return self.top.mul(a, b)

    def inv_i(self, a: int) -> int:
        t = self._tables
        if t is not None and t.inv_list is not None:
            return t.inv_list[a] if a else self.top.inv(a)
        return self.top.inv(a)

    def pow_i(self, a: int, k: int) -> int:
        return self.top.pow(a, k)

    def frob_i(self, a: int, i: int = 1) -> int:
        """a^(q^i) on top encodings, i taken mod n."""
        i %= self.n
        if self._tables is not None:
            for _ in range(i):
                a = int(self._tables.frob[a])
            return a
        return self.top.pow(a, self.q ** i)

    def trace_i(self, a: int) -> int:
        t = 0
        x = a
        for _ in range(self.n):
            t = self.top.add(t, x)
            x = self.frob_i(x, 1)
        return t

    def norm_i(self, a: int) -> int:
        m = 1
        x = a
        for _ in range(self.n):
            m = self.top.mul(m, x)
            x = self.frob_i(x, 1)
        return m

    def top_to_base(self, a: int) -> int:
        digs = self.top.digits(a)
        if any(digs[1:]):
            raise ValueError("top element is not in the base field")
        return digs[0]

    def in_base_i(self, a: int) -> bool:
        return self.frob_i(a, 1) == a

    # -- tables --------------------------------------------------------------

    @property
    def tables(self) -> "_Tables":
        if self._tables is None:
            raise UnsupportedScale(
                f"discrete-log tables refused for |F| = {self.order} > 2^20")
        return self._tables

    def __repr__(self):
        return f"FieldTower({self.spec_string})"


class _Tables:
    """Discrete-log and lookup tables for a tower's top field.

    exp/log use a deterministic primitive element (smallest encoding of
    full multiplicative order).  The 2D add/mul tables back the numpy
    vectorized paths and exist only for small orders.
    """

    def __init__(self, tower: FieldTower):
        self.tower = tower
        N = tower.order
        lv = tower.top
        fac = list(factorize(N - 1))
        gen = None
        for g in range(1, N):
            if all(lv.pow(g, (N - 1) // r) != 1 for r in fac):
                gen = g
                break
        assert gen is not None
        self.generator = gen
        exp = np.zeros(N - 1, dtype=np.int64)
        log = np.full(N, -1, dtype=np.int64)
        a = 1
        for k in range(N - 1):
            exp[k] = a
            log[a] = k
            a = lv.mul(a, gen)
        self.exp, self.log = exp, log

        self.neg = np.zeros(N, dtype=np.int64)
        self.frob = np.zeros(N, dtype=np.int64)
        self.inv = np.zeros(N, dtype=np.int64)
        q = tower.q
        half = (N - 1) // 2
        for v in range(N):
            self.neg[v] = lv.neg(v)
            self.frob[v] = lv.pow(v, q)
            if v:
                self.inv[v] = int(exp[(-log[v]) % (N - 1)])

        if N <= TABLE2D_MAX_ORDER:
            add = np.zeros((N, N), dtype=np.int32)
            mul = np.zeros((N, N), dtype=np.int32)
            for x in range(N):
                for y in range(x, N):
                    s = lv.add(x, y)
                    add[x, y] = s
                    add[y, x] = s
                    m = lv.mul(x, y)
                    mul[x, y] = m
                    mul[y, x] = m
            self.add2d, self.mul2d = add, mul
            # plain-list mirrors: fastest scalar lookups in pure Python
            self.add_rows = [[int(v) for v in row] for row in add]
            self.mul_rows = [[int(v) for v in row] for row in mul]
            self.neg_list = [int(v) for v in self.neg]
            self.inv_list = [int(v) for v in self.inv]
        else:
            self.add2d = self.mul2d = None
            self.add_rows = self.mul_rows = None
            self.neg_list = self.inv_list = None

    # vectorized ops on numpy arrays of encodings
    def add_arr(self, a, b):
        if self.add2d is not None:
            return self.add2d[a, b].astype(np.int64)
        raise UnsupportedScale("vectorized add requires 2D tables")

    def mul_arr(self, a, b):
        if self.mul2d is not None:
            return self.mul2d[a, b].astype(np.int64)
        a = np.asarray(a)
        b = np.asarray(b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        n1 = self.tower.order - 1
        out[nz] = self.exp[(self.log[a[nz]] + self.log[b[nz]]) % n1]
        return out

    def pow_arr(self, a, k: int):
        a = np.asarray(a)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = a != 0
        n1 = self.tower.order - 1
        out[nz] = self.exp[(self.log[a[nz]] * (k % n1)) % n1]
        if k == 0:
            out[~nz] = 1
        return out


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------

def field_create(p: int, e: int, n: int,
                 base_modulus: tuple[int, ...] | None = None,
                 top_modulus: tuple[int, ...] | None = None) -> FieldTower:
    """Construct the tower F_p <= F_{p^e} <= F_{p^{e n}}."""
    return FieldTower(p, e, n, base_modulus=base_modulus, top_modulus=top_modulus)


def frobenius(t: FieldTower, x: FieldElement, i: int = 1) -> FieldElement:
    """x^(q^i) for a top-field element; i is taken mod n, i=0 is identity."""
    x = t.element(x, "top") if isinstance(x, int) else x.lift()
    return FieldElement(t, "top", t.frob_i(x.val, i))


def trace_norm(t: FieldTower, x: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Relative trace and norm of x from F_{q^n} down to F_q."""
    x = t.element(x, "top") if isinstance(x, int) else x.lift()
    tr = t.top_to_base(t.trace_i(x.val))
    nm = t.top_to_base(t.norm_i(x.val))
    return FieldElement(t, "base", tr), FieldElement(t, "base", nm)


def is_square_base(t: FieldTower, a) -> SquareClass:
    """Square class of a base-field element (Legendre condition); q must be odd."""
    if t.p == 2:
        raise EvenCharacteristicUnsupported("square classes need odd q")
    if isinstance(a, FieldElement):
        a = a.down().val if a.level == "top" else a.val
    if a == 0:
        return SquareClass.ZERO
    r = t.base.pow(a, (t.q - 1) // 2)
    return SquareClass.SQUARE if r == 1 else SquareClass.NONSQUARE


def parse_spec_string(spec: str) -> FieldTower:
    """Parse "p=3,e=1,n=2,mod=1,0,1" (coefficients low-to-high) into a tower."""
    parts: dict[str, str] = {}
    key = None
    for tok in spec.split(","):
        if "=" in tok:
            key, v = tok.split("=", 1)
            parts[key.strip()] = v.strip()
        else:
            if key is None:
                raise ValueError(f"malformed spec string {spec!r}")
            parts[key] += "," + tok.strip()
    try:
        p, e, n = int(parts["p"]), int(parts["e"]), int(parts["n"])
    except KeyError as exc:
        raise ValueError(f"spec string missing field {exc}") from exc
    top = tuple(int(c) for c in parts["mod"].split(",")) if "mod" in parts else None
    base = tuple(int(c) for c in parts["basemod"].split(",")) if "basemod" in parts else None
    return field_create(p, e, n, base_modulus=base, top_modulus=top)


def tower_for_q_squared(q: int) -> FieldTower:
    """Default tower F_p <= F_q <= F_{q^2} for a prime power q."""
    fac = factorize(q)
    if len(fac) != 1:
        raise ValueError(f"q={q} is not a prime power")
    (p, e), = fac.items()
    return field_create(p, e, 2)
