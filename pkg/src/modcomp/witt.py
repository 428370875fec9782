"""Truncated Witt rings W(F_{p^f}) / p^n.

The ring is modelled as ``Z[x] / (p^n, m(x))`` with ``m`` a monic lift of an
irreducible polynomial over F_p; for ``f = 1`` it is just Z/p^n.  Elements
are stored as coordinate tuples against ``1, x, ..., x^(f-1)``.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product


def _polymod_p(a, m, p):
    """Remainder of ``a`` modulo monic ``m`` over F_p (coefficient lists, low first)."""
    a = [x % p for x in a]
    d = len(m) - 1
    while len(a) - 1 >= d and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < d:
            break
        c = a[-1]
        shift = len(a) - 1 - d
        for i in range(d + 1):
            a[shift + i] = (a[shift + i] - c * m[i]) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible_mod_p(m, p) -> bool:
    """Brute-force irreducibility of a monic polynomial over F_p."""
    d = len(m) - 1
    if d <= 0 or m[-1] % p != 1:
        return False
    for e in range(1, d // 2 + 1):
        for low in product(range(p), repeat=e):
            if _polymod_p(m, list(low) + [1], p) == []:
                return False
    return True


def default_modulus(p: int, f: int) -> tuple:
    """Smallest monic irreducible of degree f, coefficients scanned from x^(f-1) down."""
    if f == 1:
        return (0, 1)
    for high_first in product(range(p), repeat=f):
        m = list(reversed(high_first)) + [1]
        if is_irreducible_mod_p(m, p):
            return tuple(m)
    raise ValueError("no irreducible polynomial of degree %d mod %d" % (f, p))


class WittRing:
    """W(F_{p^f}) / p^n with a fixed polynomial basis."""

    def __init__(self, p: int, n: int, f: int = 1, modulus=None):
        if p < 2 or n < 1 or f < 1:
            raise ValueError("need p >= 2, n >= 1, f >= 1")
        self.p, self.n, self.f = p, n, f
        self.N = p ** n
        m = tuple(modulus) if modulus is not None else default_modulus(p, f)
        if len(m) != f + 1 or not is_irreducible_mod_p(list(m), p):
            raise ValueError("modulus %r is not a monic irreducible of degree %d mod %d" % (m, f, p))
        self.modulus = tuple(c % self.N for c in m)

    def __repr__(self):
        return "WittRing(p=%d, n=%d, f=%d, modulus=%r)" % (self.p, self.n, self.f, self.modulus)

    def __eq__(self, other):
        return isinstance(other, WittRing) and (self.p, self.n, self.f, self.modulus) == \
            (other.p, other.n, other.f, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.f, self.modulus))

    # raw tuple arithmetic; used directly by the group code

    @cached_property
    def zero_t(self):
        return (0,) * self.f

    @cached_property
    def one_t(self):
        return (1,) + (0,) * (self.f - 1)

    def from_int_t(self, a: int):
        return (a % self.N,) + (0,) * (self.f - 1)

    def add_t(self, a, b):
        N = self.N
        return tuple((x + y) % N for x, y in zip(a, b))

    def sub_t(self, a, b):
        N = self.N
        return tuple((x - y) % N for x, y in zip(a, b))

    def neg_t(self, a):
        N = self.N
        return tuple(-x % N for x in a)

    def mul_t(self, a, b):
        N, f = self.N, self.f
        if f == 1:
            return (a[0] * b[0] % N,)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        m = self.modulus
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                for i in range(f):
                    prod[k - f + i] -= c * m[i]
        return tuple(x % N for x in prod[:f])

    def pow_t(self, a, e: int):
        result, base = self.one_t, a
        while e:
            if e & 1:
                result = self.mul_t(result, base)
            base = self.mul_t(base, base)
            e >>= 1
        return result

    def residue_t(self, a):
        return tuple(x % self.p for x in a)

    def is_unit_t(self, a) -> bool:
        return any(x % self.p for x in a)

    def inv_t(self, a):
        if not self.is_unit_t(a):
            raise ZeroDivisionError("%r is not a unit in %r" % (a, self))
        if self.f == 1:
            return (pow(a[0], -1, self.N),)
        # inverse in the residue field, then Newton: x <- x (2 - a x)
        q = self.p ** self.f
        x = self.pow_t(tuple(c % self.p for c in a), q - 2)
        two = self.from_int_t(2)
        for _ in range(self.n.bit_length() + 1):
            x = self.mul_t(x, self.sub_t(two, self.mul_t(a, x)))
        return x

    def teichmuller_t(self, r):
        """Teichmuller lift of a residue-field element (tuple mod p)."""
        x = tuple(c % self.p for c in r) if not isinstance(r, int) else self.from_int_t(r % self.p)
        q = self.p ** self.f
        for _ in range(self.n + 1):
            y = self.pow_t(x, q)
            if y == x:
                return x
            x = y
        return x

    # element wrappers

    def __call__(self, value) -> "WittElem":
        if isinstance(value, WittElem):
            return value
        if isinstance(value, int):
            return WittElem(self, self.from_int_t(value))
        coords = tuple(int(c) % self.N for c in value)
        if len(coords) != self.f:
            raise ValueError("expected %d coordinates" % self.f)
        return WittElem(self, coords)

    def zero(self) -> "WittElem":
        return WittElem(self, self.zero_t)

    def one(self) -> "WittElem":
        return WittElem(self, self.one_t)

    def gen(self) -> "WittElem":
        if self.f == 1:
            raise ValueError("Z/p^n has no polynomial generator")
        return WittElem(self, (0, 1) + (0,) * (self.f - 2))

    def teichmuller(self, r) -> "WittElem":
        return WittElem(self, self.teichmuller_t(r))

    def elements(self):
        for c in product(range(self.N), repeat=self.f):
            yield WittElem(self, c)

    def residue_field(self):
        """All residue-field elements as tuples mod p."""
        return [tuple(c) for c in product(range(self.p), repeat=self.f)]

    def residue_mul(self, a, b):
        return self.residue_t(self.mul_t(a, b))

    def reduction(self, m: int) -> "WittRing":
        """The same ring truncated at level m <= n."""
        return WittRing(self.p, m, self.f, tuple(c % self.p ** m for c in self.modulus))


class WittElem:
    __slots__ = ("ring", "coords")

    def __init__(self, ring: WittRing, coords):
        self.ring = ring
        self.coords = tuple(coords)

    def _coerce(self, other):
        if isinstance(other, WittElem):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other.coords
        if isinstance(other, int):
            return self.ring.from_int_t(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else WittElem(self.ring, self.ring.add_t(self.coords, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else WittElem(self.ring, self.ring.sub_t(self.coords, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else WittElem(self.ring, self.ring.sub_t(o, self.coords))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else WittElem(self.ring, self.ring.mul_t(self.coords, o))

    __rmul__ = __mul__

    def __neg__(self):
        return WittElem(self.ring, self.ring.neg_t(self.coords))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return WittElem(self.ring, self.ring.pow_t(self.coords, e))

    def inverse(self) -> "WittElem":
        return WittElem(self.ring, self.ring.inv_t(self.coords))

    def __truediv__(self, other):
        o = self._coerce(other)
        return WittElem(self.ring, self.ring.mul_t(self.coords, self.ring.inv_t(o)))

    def is_unit(self) -> bool:
        return self.ring.is_unit_t(self.coords)

    def residue(self) -> tuple:
        return self.ring.residue_t(self.coords)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coords == self.ring.from_int_t(other)
        return isinstance(other, WittElem) and self.ring == other.ring and self.coords == other.coords

    def __hash__(self):
        return hash((self.ring, self.coords))

    def __int__(self):
        if self.ring.f != 1:
            raise TypeError("only elements of Z/p^n convert to int")
        return self.coords[0]

    def __repr__(self):
        if self.ring.f == 1:
            return "%d (mod %d)" % (self.coords[0], self.ring.N)
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                terms.append(str(c) if i == 0 else ("%d*x" % c if i == 1 else "%d*x^%d" % (c, i)))
        return (" + ".join(terms) or "0") + " (mod %d, %r)" % (self.ring.N, self.ring.modulus)
