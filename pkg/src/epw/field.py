"""Arithmetic in GF(p) and small extensions GF(p^k), k <= 4.

Elements are stored as coefficient tuples of length k with entries reduced
into [0, p); a prime-field element is the 1-tuple of its residue.  Extension
fields carry a monic irreducible modulus, chosen deterministically (the first
irreducible in a fixed enumeration) so that results reproduce bit for bit
across runs and machines.
"""

from __future__ import annotations

import hashlib
import random
from typing import Iterable, Iterator, Sequence

from .errors import InputError, InternalError

MAX_EXT_DEGREE = 4
SCAN_ORDER_LIMIT = 2**16  # fields up to this order are enumerated exhaustively


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def derive_seed(*parts) -> int:
    """Stable 63-bit seed derived from arbitrary labelled parts.

    Used to give independent streams to parallelizable sub-tasks so results
    do not depend on evaluation order.
    """
    h = hashlib.sha256(repr(tuple(parts)).encode()).digest()
    return int.from_bytes(h[:8], "big") >> 1


def derive_rng(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))


# ---------------------------------------------------------------------------
# Raw polynomial helpers over Z/p (little-endian int lists, no trailing zeros).
# Only what the modulus search and element inversion need.


def _ztrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zmulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _zrem(out, mod, p)


def _zrem(a: list[int], mod: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(mod):
            a[shift + i] = (a[shift + i] - f * c) % p
        a.pop()
    return _ztrim(a)


def _zpowmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    acc = _zrem(base, mod, p)
    while e:
        if e & 1:
            result = _zmulmod(result, acc, mod, p)
        acc = _zmulmod(acc, acc, mod, p)
        e >>= 1
    return result


def _zgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ztrim(list(a)), _ztrim(list(b))
    while b:
        a, b = b, _zrem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _zsub_x(a: list[int], p: int) -> list[int]:
    """a(x) - x, reduced."""
    out = list(a) + [0] * max(0, 2 - len(a))
    out[1] = (out[1] - 1) % p
    return _ztrim(out)


def _is_irreducible(f: list[int], p: int) -> bool:
    """Rabin test for a monic polynomial of degree k <= 4 over GF(p)."""
    k = len(f) - 1
    if k == 1:
        return True
    x = [0, 1]
    if _zsub_x(_zpowmod(x, p**k, f, p), p):
        return False
    for ell in {q for q in (2, 3) if k % q == 0}:
        diff = _zsub_x(_zpowmod(x, p ** (k // ell), f, p), p)
        if not diff:
            return False
        if len(_zgcd(diff, f, p)) - 1 > 0:
            return False
    return True


class Field:
    """Descriptor of GF(p^k); also the factory for its elements."""

    __slots__ = ("p", "k", "modulus", "order", "_one", "_zero", "_red_rows")

    def __init__(self, p: int, k: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p) or p < 5:
            raise InputError(f"characteristic must be a prime >= 5, got {p}")
        if not 1 <= k <= MAX_EXT_DEGREE:
            raise InputError(f"extension degree must be in [1, {MAX_EXT_DEGREE}], got {k}")
        if k == 1:
            if modulus is not None:
                raise InputError("prime field takes no modulus")
        else:
            if modulus is None:
                raise InputError("extension field needs a monic modulus; use build_extension")
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise InputError("modulus must be monic of degree k")
            if not _is_irreducible(list(modulus), p):
                raise InputError("modulus is not irreducible")
        self.p = p
        self.k = k
        self.modulus = modulus
        self.order = p**k
        # reduction rows: x^(k+i) expressed on 1..x^(k-1), for i = 0..k-2
        if k > 1:
            rows = []
            cur = [(-c) % p for c in modulus[:k]]
            rows.append(tuple(cur))
            for _ in range(k - 2):
                nxt = [0] + cur[:-1]
                top = cur[-1]
                nxt = [(nxt[i] + top * rows[0][i]) % p for i in range(k)]
                rows.append(tuple(nxt))
                cur = nxt
            self._red_rows = tuple(rows)
        else:
            self._red_rows = ()
        self._zero = Fe(self, (0,) * k)
        self._one = Fe(self, (1,) + (0,) * (k - 1))

    # -- identity ----------------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.k == other.k
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"

    # -- element construction ----------------------------------------------
    @property
    def zero(self) -> "Fe":
        return self._zero

    @property
    def one(self) -> "Fe":
        return self._one

    def elt(self, value) -> "Fe":
        if isinstance(value, Fe):
            if value.field == self:
                return value
            if value.field.p == self.p and value.field.k == 1:
                return Fe(self, (value.c[0],) + (0,) * (self.k - 1))
            raise InputError("cannot coerce element between unrelated fields")
        if isinstance(value, int):
            return Fe(self, (value % self.p,) + (0,) * (self.k - 1))
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) > self.k:
            raise InputError("too many coefficients for this field")
        return Fe(self, coeffs + (0,) * (self.k - len(coeffs)))

    def gen(self) -> "Fe":
        """The class of x in GF(p)[x]/modulus (only for k >= 2)."""
        if self.k == 1:
            raise InputError("prime field has no extension generator")
        return Fe(self, (0, 1) + (0,) * (self.k - 2))

    def elements(self) -> Iterator["Fe"]:
        if self.order > SCAN_ORDER_LIMIT:
            raise InputError(f"refusing to enumerate a field of order {self.order}")
        for n in range(self.order):
            coeffs = []
            m = n
            for _ in range(self.k):
                coeffs.append(m % self.p)
                m //= self.p
            yield Fe(self, tuple(coeffs))

    def random(self, rng: random.Random) -> "Fe":
        return Fe(self, tuple(rng.randrange(self.p) for _ in range(self.k)))

    def random_nonzero(self, rng: random.Random) -> "Fe":
        while True:
            x = self.random(rng)
            if x:
                return x

    def base(self) -> "Field":
        return self if self.k == 1 else Field(self.p)


class Fe:
    """An element of a Field; immutable, usable as dict key."""

    __slots__ = ("field", "c")

    def __init__(self, field: Field, coeffs: tuple[int, ...]):
        self.field = field
        self.c = coeffs

    # -- helpers -------------------------------------------------------------
    def _coerce(self, other) -> "Fe":
        if isinstance(other, Fe):
            if other.field == self.field:
                return other
            if other.field.k == 1 and other.field.p == self.field.p:
                return self.field.elt(other.c[0])
            raise InputError("field mismatch")
        if isinstance(other, int):
            return self.field.elt(other)
        return NotImplemented  # type: ignore[return-value]

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.field.elt(other)
        return isinstance(other, Fe) and self.field == other.field and self.c == other.c

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.c))

    def __repr__(self):
        if self.field.k == 1:
            return str(self.c[0])
        return f"{list(self.c)}@{self.field!r}"

    def __int__(self):
        if self.field.k != 1:
            raise InputError("only prime-field elements convert to int")
        return self.c[0]

    def lift(self) -> int:
        """Residue in [0, p); defined for base-field elements only."""
        if any(self.c[1:]):
            raise InputError("element is not in the base field")
        return self.c[0]

    def in_base(self) -> bool:
        return not any(self.c[1:])

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return Fe(self.field, tuple((a + b) % p for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return Fe(self.field, tuple((a - b) % p for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        p = self.field.p
        return Fe(self.field, tuple((-a) % p for a in self.c))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.field
        p, k = f.p, f.k
        if k == 1:
            return Fe(f, ((self.c[0] * o.c[0]) % p,))
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(self.c):
            if ai:
                for j, bj in enumerate(o.c):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        out = prod[:k]
        for i, row in enumerate(f._red_rows):
            hi = prod[k + i]
            if hi:
                for j in range(k):
                    out[j] = (out[j] + hi * row[j]) % p
        return Fe(f, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Fe":
        f = self.field
        if not self:
            raise ZeroDivisionError("inverse of zero field element")
        if f.k == 1:
            return Fe(f, (pow(self.c[0], f.p - 2, f.p),))
        # extended Euclid over GF(p)[x] against the modulus
        p = f.p
        r0, r1 = list(f.modulus), _ztrim(list(self.c))
        s0, s1 = [], [1]
        while r1:
            # r0 = q*r1 + r2
            q, r2 = _zdivmod(r0, r1, p)
            r0, r1 = r1, r2
            s0, s1 = s1, _zsub(s0, _zmul(q, s1, p), p)
        inv_lead = pow(r0[-1], p - 2, p)
        inv = [c * inv_lead % p for c in s0]
        inv = _zrem(inv, list(f.modulus), p)
        return f.elt(inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field.elt(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        acc = self
        while e:
            if e & 1:
                result = result * acc
            acc = acc * acc
            e >>= 1
        return result

    def frobenius(self) -> "Fe":
        return self ** self.field.p


def _zmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ztrim(out)


def _zsub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ztrim(out)


def _zdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 0)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and a:
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        a.pop()
    return _ztrim(q), _ztrim(a)


def build_extension(p: int, k: int) -> Field:
    """GF(p^k) with the first irreducible monic modulus in a fixed order.

    Candidates x^k + c_{k-1} x^{k-1} + ... + c_0 are enumerated by increasing
    value of sum c_i p^i, which makes the choice reproducible.
    """
    if not is_prime(p) or p < 5:
        raise InputError(f"characteristic must be a prime >= 5, got {p}")
    if not 1 <= k <= MAX_EXT_DEGREE:
        raise InputError(f"extension degree must be in [1, {MAX_EXT_DEGREE}], got {k}")
    if k == 1:
        return Field(p)
    for n in range(p**k):
        coeffs = []
        m = n
        for _ in range(k):
            coeffs.append(m % p)
            m //= p
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return Field(p, k, tuple(f))
    raise InternalError("no irreducible modulus found")  # pragma: no cover


def embed(x: Fe, target: Field) -> Fe:
    """Embed a base-field element into an extension of the same characteristic."""
    if x.field.k != 1 or x.field.p != target.p:
        raise InputError("embed expects a base-field element of matching characteristic")
    return target.elt(x.c[0])


def vec(field: Field, values: Iterable) -> tuple[Fe, ...]:
    return tuple(field.elt(v) for v in values)


def normalize_proj(v: Sequence[Fe]) -> tuple[Fe, ...]:
    """Scale so the first nonzero coordinate is 1; error on the zero vector."""
    for x in v:
        if x:
            inv = x.inverse()
            return tuple(inv * y for y in v)
    raise InputError("zero vector has no projective normalization")
