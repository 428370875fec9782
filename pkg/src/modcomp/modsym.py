"""Modular symbols for Gamma_0(N), trivial character, even weight k.

The ambient space is the quotient of the free Q-module on Manin symbols
[X^i Y^(k-2-i), (c:d)] by the two- and three-term relations.  Matrices act on
row vectors: row ``b`` of a Hecke matrix holds the coordinates of T(e_b).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb, gcd, isqrt

from flint import fmpq, fmpq_mat, fmpq_poly, fmpz_mat

from .linalg import (charpoly, kernel_q, left_kernel_q, left_kernel_z, PNMatrix,
                     rational_roots, rref_q)

__all__ = [
    "P1List", "p1_enumerate", "dim_formula", "gamma0_index", "prime_divisors", "primes_upto",
    "heilbronn_merel", "ManinSymbol", "ModularSymbols", "ManinSymbolSpace", "build_space",
    "BudgetExceeded", "hecke_operator", "star_decompose", "IntegralLattice", "integral_reduce",
    "Eigenform", "EigenformSearch", "rational_eigenforms", "coefficients_from_primes",
]

MAX_SYMBOLS = int(os.environ.get("MODCOMP_MAX_SYMBOLS", 40000))


# --------------------------------------------------------------------------
# arithmetic helpers

def prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n + 1) if sieve[i]]


def _factor(n: int) -> list[tuple[int, int]]:
    out = []
    for q in prime_divisors(n):
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        out.append((q, e))
    return out


def _phi(n: int) -> int:
    out = n
    for q in prime_divisors(n):
        out = out // q * (q - 1)
    return out


def gamma0_index(N: int) -> int:
    """[SL_2(Z) : Gamma_0(N)] = N prod (1 + 1/p)."""
    mu = N
    for q in prime_divisors(N):
        mu = mu // q * (q + 1)
    return mu


def _legendre(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def dim_formula(k: int, N: int) -> int:
    """dim S_k(Gamma_0(N)) from the genus and elliptic point counts."""
    if k % 2:
        raise ValueError("odd weight is not supported")
    if k < 2:
        raise ValueError("weight must be >= 2")
    mu = gamma0_index(N)
    ps = prime_divisors(N)
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for q in ps:
            nu2 *= 1 + (0 if q == 2 else _legendre(-1, q))
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for q in ps:
            nu3 *= 1 + (0 if q == 3 else -1 if q == 2 else _legendre(-3, q))
    ncusps = sum(_phi(gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)
    # 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 ncusps
    g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * ncusps
    assert g12 % 12 == 0
    g = g12 // 12
    if k == 2:
        return g
    return (k - 1) * (g - 1) + (k // 2 - 1) * ncusps + nu2 * (k // 4) + nu3 * (k // 3)


# --------------------------------------------------------------------------
# P^1(Z/N)

class P1List:
    """Normalised points of P^1(Z/N); ``index(c, d)`` is None for non-points."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N + 1) if gcd(u, N) == 1] if N > 1 else [0]
        table = {}
        points = []
        for c in range(N):
            for d in range(N):
                if (c, d) in table or gcd(gcd(c, d), N) != 1:
                    continue
                orbit = {((u * c) % N, (u * d) % N) for u in units}
                rep = min(orbit)
                idx = len(points)
                points.append(rep)
                for x in orbit:
                    table[x] = idx
        if N == 1:
            points, table = [(0, 0)], {(0, 0): 0}
        self.points = points
        self._table = table

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self, c: int, d: int):
        N = self.N
        return self._table.get((c % N, d % N))

    def normalize(self, c: int, d: int):
        i = self.index(c, d)
        return None if i is None else self.points[i]


def p1_enumerate(N: int) -> list:
    return list(P1List(N).points)


@lru_cache(maxsize=None)
def heilbronn_merel(n: int) -> tuple:
    """{[[a,b],[c,d]] : ad - bc = n, a > b >= 0, d > c >= 0}."""
    out = []
    for a in range(1, n + 1):
        q = n // a
        if q * a == n:
            d = q
            for b in range(a):
                out.append((a, b, 0, d))
            for c in range(1, d):
                out.append((a, 0, c, d))
        for d in range(q + 1, n + 1):
            bc = a * d - n
            for c in range(bc // a + 1, d):
                if bc % c == 0:
                    out.append((a, bc // c, c, d))
    return tuple(out)


@lru_cache(maxsize=None)
def _poly_action(k: int, h: tuple) -> tuple:
    """Row i: coefficients of (aX+bY)^i (cX+dY)^(k-2-i) in X^j Y^(k-2-j)."""
    a, b, c, d = h
    w = k - 2
    pa = [[comb(i, j) * a ** j * b ** (i - j) for j in range(i + 1)] for i in range(w + 1)]
    pc = [[comb(i, j) * c ** j * d ** (i - j) for j in range(i + 1)] for i in range(w + 1)]
    rows = []
    for i in range(w + 1):
        u, v = pa[i], pc[w - i]
        row = [0] * (w + 1)
        for j1, x in enumerate(u):
            if x:
                for j2, y in enumerate(v):
                    row[j1 + j2] += x * y
        rows.append(tuple(row))
    return tuple(rows)


# --------------------------------------------------------------------------
# the ambient space

@dataclass(frozen=True)
class ManinSymbol:
    """[X^i Y^(k-2-i), (c:d)] with (c:d) normalised."""

    i: int
    c: int
    d: int


class BudgetExceeded(RuntimeError):
    pass


class ModularSymbols:
    """Ambient weight-k modular symbols for Gamma_0(N) over Q."""

    def __init__(self, k: int, N: int):
        if k % 2 or k < 2:
            raise ValueError("weight must be even and >= 2")
        if N < 1:
            raise ValueError("level must be >= 1")
        self.k, self.N = k, N
        self.p1 = P1List(N)
        self.w = k - 2
        nsym = (k - 1) * len(self.p1)
        if nsym > MAX_SYMBOLS:
            raise BudgetExceeded("%d Manin symbols exceed the budget %d" % (nsym, MAX_SYMBOLS))
        self.nsym = nsym
        self._build()

    def sym_index(self, i: int, j: int) -> int:
        return j * (self.k - 1) + i

    def symbol(self, s: int) -> ManinSymbol:
        j, i = divmod(s, self.k - 1)
        c, d = self.p1.points[j]
        return ManinSymbol(i, c, d)

    # ---- right action of a single matrix on a symbol, as {symbol: coeff}
    def act(self, s: int, h: tuple) -> dict:
        j, i = divmod(s, self.k - 1)
        u, v = self.p1.points[j]
        a, b, c, d = h
        jj = self.p1.index(u * a + v * c, u * b + v * d)
        if jj is None:
            return {}
        row = _poly_action(self.k, h)[i]
        base = jj * (self.k - 1)
        return {base + t: x for t, x in enumerate(row) if x}

    def _build(self):
        n = self.nsym
        S = (0, -1, 1, 0)
        T = (0, -1, 1, -1)
        # two-term relations x + x S = 0: x S is a signed single symbol
        rep = [None] * n       # (representative, sign) or None when x = 0
        for s in range(n):
            if rep[s] is not None:
                continue
            (t, e), = self.act(s, S).items()
            # x + e t = 0
            if t == s:
                rep[s] = (s, 1) if e == -1 else (s, 0)
            else:
                rep[s] = (s, 1)
                rep[t] = (s, -e)
        reps = sorted({r for r, e in rep if e != 0})
        col = {r: i for i, r in enumerate(reps)}
        # three-term relations x + x T + x T^2 = 0
        seen = set()
        rows = []
        for s in range(n):
            acc = {}
            for term in ({s: 1}, self.act(s, T), self.act(s, (-1, 1, -1, 0))):
                for t, x in term.items():
                    r, e = rep[t]
                    if e:
                        acc[col[r]] = acc.get(col[r], 0) + e * x
            acc = {c: x for c, x in acc.items() if x}
            if not acc:
                continue
            key = tuple(sorted(acc.items()))
            if key in seen:
                continue
            seen.add(key)
            rows.append(acc)
        m = len(reps)
        R = fmpq_mat(len(rows), m)
        for r, acc in enumerate(rows):
            for c, x in acc.items():
                R[r, c] = x
        ech, piv = rref_q(R) if rows else (R, [])
        pivset = set(piv)
        free = [c for c in range(m) if c not in pivset]
        fidx = {c: i for i, c in enumerate(free)}
        D = len(free)
        img_rep = {}
        for c in free:
            img_rep[c] = {fidx[c]: fmpq(1)}
        for r, c in enumerate(piv):
            img_rep[c] = {fidx[f]: -ech[r, f] for f in free if ech[r, f] != 0}
        img = fmpq_mat(n, D)
        for s in range(n):
            r, e = rep[s]
            if e:
                for c, x in img_rep[col[r]].items():
                    img[s, c] = e * x
        self.dim = D
        self.images = img
        self.basis_symbols = [reps[c] for c in free]
        self._rep = rep
        self._relations = rows
        self._rep_cols = reps

    def image(self, combo: dict) -> fmpq_mat:
        """Coordinates (1 x dim) of a linear combination of Manin symbols."""
        vec = fmpq_mat(1, self.nsym)
        for s, x in combo.items():
            vec[0, s] += x
        return vec * self.images

    def _combo_matrix(self, rows_of_combos) -> fmpq_mat:
        out = fmpq_mat(len(rows_of_combos), self.nsym)
        for r, combo in enumerate(rows_of_combos):
            for s, x in combo.items():
                out[r, s] += x
        return out

    def heilbronn_combo(self, s: int, n: int) -> dict:
        acc = {}
        for h in heilbronn_merel(n):
            for t, x in self.act(s, h).items():
                acc[t] = acc.get(t, 0) + x
        return acc

    def heilbronn_row(self, b: int, n: int) -> fmpq_mat:
        """Coordinates of T_n(e_b) computed directly from the Heilbronn set."""
        return self.image(self.heilbronn_combo(self.basis_symbols[b], n))

    def heilbronn_matrix(self, n: int) -> fmpq_mat:
        combos = [self.heilbronn_combo(s, n) for s in self.basis_symbols]
        if not combos:
            return fmpq_mat(0, 0)
        return self._combo_matrix(combos) * self.images

    @lru_cache(maxsize=None)
    def prime_hecke(self, q: int) -> fmpq_mat:
        return self.heilbronn_matrix(q)

    def hecke_matrix(self, m: int) -> fmpq_mat:
        """T_m from prime operators, multiplicativity and the prime-power recursion."""
        return _hecke_from_primes(m, self.k, self.N, self.prime_hecke, self.dim)

    def star_matrix(self) -> fmpq_mat:
        combos = []
        for s in self.basis_symbols:
            j, i = divmod(s, self.k - 1)
            c, d = self.p1.points[j]
            jj = self.p1.index(-c, d)
            combos.append({jj * (self.k - 1) + i: (-1) ** (self.w - i)})
        if not combos:
            return fmpq_mat(0, 0)
        return self._combo_matrix(combos) * self.images

    @cached_property
    def cusps(self) -> list:
        """Orbits of P^1(Z/N) under (c:d) -> (c:c+d), as lists of point indices."""
        n = len(self.p1)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        for j, (c, d) in enumerate(self.p1.points):
            jj = self.p1.index(c, c + d)
            a, b = find(j), find(jj)
            if a != b:
                parent[max(a, b)] = min(a, b)
        classes = {}
        for j in range(n):
            classes.setdefault(find(j), []).append(j)
        return [classes[r] for r in sorted(classes)]

    @cached_property
    def _cusp_of_point(self) -> dict:
        return {j: ci for ci, cl in enumerate(self.cusps) for j in cl}

    def boundary_combo(self, s: int) -> dict:
        """Boundary of a Manin symbol as {cusp index: coeff}."""
        j, i = divmod(s, self.k - 1)
        c, d = self.p1.points[j]
        out = {}
        if i == self.w:
            ci = self._cusp_of_point[j]
            out[ci] = out.get(ci, 0) + 1
        if i == 0:
            ci = self._cusp_of_point[self.p1.index(d, -c)]
            out[ci] = out.get(ci, 0) - 1
        return {c: x for c, x in out.items() if x}

    def boundary_matrix(self) -> fmpq_mat:
        """Row b: boundary of basis element b over the cusps."""
        B = fmpq_mat(self.dim, len(self.cusps))
        for b, s in enumerate(self.basis_symbols):
            for c, x in self.boundary_combo(s).items():
                B[b, c] = x
        return B

    @cached_property
    def cuspidal_basis(self) -> fmpq_mat:
        """RREF rows spanning the kernel of the boundary map."""
        if self.dim == 0:
            return fmpq_mat(0, 0)
        K = left_kernel_q(self.boundary_matrix())
        if K.nrows() == 0:
            return fmpq_mat(0, self.dim)
        return rref_q(K)[0]


def _hecke_from_primes(m, k, N, prime_op, dim):
    if m < 1:
        raise ValueError("m must be >= 1")
    out = fmpq_mat(dim, dim)
    for i in range(dim):
        out[i, i] = 1
    for q, e in _factor(m):
        Tq = prime_op(q)
        if N % q == 0:
            P = Tq ** e
        else:
            prev2, prev = _identity(dim), Tq
            for _ in range(e - 1):
                prev2, prev = prev, Tq * prev - q ** (k - 1) * prev2
            P = prev
        out = out * P
    return out


def _identity(d):
    out = fmpq_mat(d, d)
    for i in range(d):
        out[i, i] = 1
    return out


def _coords(basis: fmpq_mat, pivots, X: fmpq_mat) -> fmpq_mat:
    """Y with Y * basis = X for X in the row span of an RREF basis."""
    cols = fmpq_mat(X.nrows(), len(pivots))
    for i in range(X.nrows()):
        for t, c in enumerate(pivots):
            cols[i, t] = X[i, c]
    if cols * basis != X:
        raise ArithmeticError("rows are not in the span of the basis")
    return cols


def _restrict(basis: fmpq_mat, pivots, T: fmpq_mat) -> fmpq_mat:
    return _coords(basis, pivots, basis * T)


# --------------------------------------------------------------------------
# subspaces

class ManinSymbolSpace:
    """The cuspidal (or full) subspace of an ambient space, with restricted operators."""

    def __init__(self, ambient: ModularSymbols, cuspidal: bool = True):
        self.ambient = ambient
        self.k, self.N = ambient.k, ambient.N
        self.cuspidal = cuspidal
        if cuspidal:
            self.basis = ambient.cuspidal_basis
        else:
            self.basis = _identity(ambient.dim)
        self.pivots = rref_q(self.basis)[1] if self.basis.nrows() else []
        self.dim = self.basis.nrows()
        self._cache = {}

    def __repr__(self):
        return "ManinSymbolSpace(k=%d, N=%d, %s, dim=%d)" % (
            self.k, self.N, "cuspidal" if self.cuspidal else "full", self.dim)

    def restrict(self, T: fmpq_mat) -> fmpq_mat:
        if self.dim == 0:
            return fmpq_mat(0, 0)
        return _restrict(self.basis, self.pivots, T)

    def prime_hecke(self, q: int) -> fmpq_mat:
        if ("T", q) not in self._cache:
            self._cache[("T", q)] = self.restrict(self.ambient.prime_hecke(q))
        return self._cache[("T", q)]

    def hecke_operator(self, m: int) -> fmpq_mat:
        return _hecke_from_primes(m, self.k, self.N, self.prime_hecke, self.dim)

    def star(self) -> fmpq_mat:
        return self.restrict(self.ambient.star_matrix())


@lru_cache(maxsize=32)
def _ambient(k: int, N: int) -> ModularSymbols:
    return ModularSymbols(k, N)


def build_space(k: int, N: int, cuspidal: bool = True) -> ManinSymbolSpace:
    return ManinSymbolSpace(_ambient(k, N), cuspidal)


def hecke_operator(space: ManinSymbolSpace, m: int) -> fmpq_mat:
    return space.hecke_operator(m)


def star_decompose(space: ManinSymbolSpace):
    """(plus, minus) eigenspaces of the star involution, as rows in space coordinates."""
    st = space.star()
    d = space.dim
    I = _identity(d)
    plus = left_kernel_q(st - I) if d else fmpq_mat(0, 0)
    minus = left_kernel_q(st + I) if d else fmpq_mat(0, 0)
    return plus, minus


# --------------------------------------------------------------------------
# integral structure

class IntegralLattice:
    """The Z-span of all Manin symbols, cut down to the cuspidal part.

    With ``p=None`` this is the lattice L spanned by the images of the
    integral Manin symbols, intersected with the cuspidal subspace S, and
    Hecke matrices on ``basis`` are integral.  With a prime ``p`` only the
    p-part of L is kept: the lattice agrees with L after tensoring with Z_(p)
    and with Z^dim away from p, so Hecke matrices are p-integral.  That is
    all a reduction mod p^n needs, and it avoids a Hermite form with huge
    denominators.
    """

    def __init__(self, ambient: ModularSymbols, p: int | None = None):
        self.ambient = ambient
        self.p = p
        D = ambient.dim
        img = ambient.images
        vals = img.entries()
        extra, den = [], 1
        for i in range(img.nrows()):
            row = vals[i * D:(i + 1) * D]
            d = 1
            for x in row:
                q = int(x.q)
                if q != 1:
                    d = d * q // gcd(d, q)
            if d == 1:
                continue
            if p is not None:
                a = 0
                while d % p == 0:
                    d //= p
                    a += 1
                if a == 0:
                    continue
                row = [x * d for x in row]          # clear the prime-to-p part
                d = p ** a
            extra.append(row)
            den = den * d // gcd(den, d)
        self.den = den
        if extra and D:
            mod = den
            flat = [den * int(i == j) for i in range(D) for j in range(D)]
            for row in extra:
                flat.extend(int(x * den) % mod for x in row)
            H = fmpz_mat(D + len(extra), D, flat).hnf()
            Lz = fmpz_mat(D, D, [int(H[i, j]) for i in range(D) for j in range(D)])
            self.full_basis = fmpq_mat(Lz) / den
        else:
            self.full_basis = _identity(D)
        self._full_inv = self.full_basis.inv() if D else fmpq_mat(0, 0)
        # cuspidal part in L coordinates: kernel of the boundary, automatically saturated
        Bd = self.full_basis * ambient.boundary_matrix() if D else fmpq_mat(0, 0)
        bden = 1
        for x in Bd.entries():
            bden = bden * int(x.q) // gcd(bden, int(x.q))
        BdZ = fmpz_mat(Bd.nrows(), Bd.ncols(), [int(x * bden) for x in Bd.entries()])
        self.cusp_coords = left_kernel_z(BdZ) if D else fmpz_mat(0, 0)
        self.rank = self.cusp_coords.nrows()
        self._C = fmpq_mat(self.cusp_coords)
        self.basis = self._C * self.full_basis if self.rank else fmpq_mat(0, D)
        self._ops = {}

    def in_lattice_coords(self, T: fmpq_mat) -> fmpq_mat:
        """Matrix, on ``basis``, of an ambient operator preserving the cuspidal lattice."""
        if self.rank == 0:
            return fmpq_mat(0, 0)
        TL = self.full_basis * T * self._full_inv
        A = _coords_general(self._C, TL, self._C)
        self._check_integral(A)
        return A

    def _check_integral(self, A: fmpq_mat):
        for x in A.entries():
            q = int(x.q)
            if q != 1 and (self.p is None or q % self.p == 0):
                raise ArithmeticError("operator is not integral on the lattice")

    def prime_hecke(self, q: int) -> fmpq_mat:
        if q not in self._ops:
            self._ops[q] = self.in_lattice_coords(self.ambient.prime_hecke(q))
        return self._ops[q]

    def hecke(self, m: int) -> fmpq_mat:
        return _hecke_from_primes(m, self.ambient.k, self.ambient.N, self.prime_hecke, self.rank)

    def hecke_z(self, m: int) -> fmpz_mat:
        """Integer matrix of T_m; only available for the global lattice."""
        if self.p is not None:
            raise ValueError("the p-local lattice only gives p-integral matrices")
        return _to_zmat(self.hecke(m))

    def reduce(self, m: int, p: int, n: int) -> PNMatrix:
        return _qmat_to_pn(self.hecke(m), p, n)

    def reduce_prime(self, q: int, p: int, n: int) -> PNMatrix:
        return _qmat_to_pn(self.prime_hecke(q), p, n)


def _coords_general(C: fmpq_mat, TL: fmpq_mat, _C) -> fmpq_mat:
    """A with A C = C TL, for C of full row rank."""
    X = C * TL
    ech, piv = rref_q(C)
    sub = fmpq_mat(C.nrows(), len(piv))
    Xs = fmpq_mat(X.nrows(), len(piv))
    for t, c in enumerate(piv):
        for i in range(C.nrows()):
            sub[i, t] = C[i, c]
        for i in range(X.nrows()):
            Xs[i, t] = X[i, c]
    A = Xs * sub.inv()
    if A * C != X:
        raise ArithmeticError("operator does not preserve the lattice span")
    return A


def _to_zmat(A: fmpq_mat) -> fmpz_mat:
    r, c = A.nrows(), A.ncols()
    vals = []
    for i in range(r):
        for j in range(c):
            x = A[i, j]
            if x.q != 1:
                raise ArithmeticError("operator is not integral on the lattice")
            vals.append(int(x.p))
    return fmpz_mat(r, c, vals)


def _qmat_to_pn(A: fmpq_mat, p: int, n: int) -> PNMatrix:
    """Reduce a p-integral rational matrix mod p^n."""
    import numpy as np
    N = p ** n
    r, c = A.nrows(), A.ncols()
    out = []
    for x in A.entries():
        num, den = int(x.p), int(x.q)
        if den % p == 0:
            raise ArithmeticError("entry %s is not p-integral" % x)
        out.append(num * pow(den, -1, N) % N)
    return PNMatrix(p, n, np.array(out, dtype=np.int64).reshape(r, c))


@lru_cache(maxsize=16)
def _lattice(k: int, N: int, p: int | None = None) -> IntegralLattice:
    return IntegralLattice(_ambient(k, N), p)


def integral_reduce(space: ManinSymbolSpace, p: int, n: int, ms=(1,), local: bool = True):
    """(lattice, {m: T_m mod p^n}) on the saturated cuspidal lattice.

    ``local=True`` uses the p-local lattice (same reductions, much cheaper).
    """
    L = _lattice(space.k, space.N, p if local else None)
    return L, {m: L.reduce(m, p, n) for m in ms}


# --------------------------------------------------------------------------
# eigenforms

@dataclass(frozen=True)
class Eigenform:
    """Normalised Hecke eigenform with rational integer coefficients a_1..a_B."""

    label: str
    k: int
    N: int
    coeffs: tuple
    source: str = "computed"
    character: str = "trivial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(x) for x in self.coeffs))

    @property
    def bound(self) -> int:
        return len(self.coeffs)

    def a(self, m: int) -> int:
        if m < 1 or m > len(self.coeffs):
            raise IndexError("a_%d not available (bound %d)" % (m, len(self.coeffs)))
        return self.coeffs[m - 1]

    def first_violation(self, pairs=None):
        """Smallest index breaking a_1 = 1, multiplicativity or the prime-power recursion."""
        B = self.bound
        if B == 0:
            return 1
        if self.coeffs[0] != 1:
            return 1
        bad = []
        for m in range(2, B + 1):
            fac = _factor(m)
            if len(fac) > 1:
                q, e = fac[0]
                u = q ** e
                if self.a(m) != self.a(u) * self.a(m // u):
                    bad.append(m)
            else:
                q, e = fac[0]
                if e >= 2:
                    if self.N % q == 0:
                        expect = self.a(q) * self.a(m // q)
                    else:
                        expect = self.a(q) * self.a(m // q) - q ** (self.k - 1) * self.a(m // q // q)
                    if self.a(m) != expect:
                        bad.append(m)
        if pairs is not None:
            for m1, m2 in pairs:
                if m1 * m2 <= B and gcd(m1, m2) == 1 and self.a(m1 * m2) != self.a(m1) * self.a(m2):
                    bad.append(m1 * m2)
        return min(bad) if bad else None

    def prime_coeffs(self) -> dict:
        return {q: self.a(q) for q in primes_upto(self.bound)}


def coefficients_from_primes(ap: dict, k: int, N: int, B: int) -> list:
    """a_1..a_B from a_q for primes q <= B."""
    a = [0] * (B + 1)
    if B >= 1:
        a[1] = 1
    for m in range(2, B + 1):
        fac = _factor(m)
        if len(fac) > 1:
            q, e = fac[0]
            u = q ** e
            a[m] = a[u] * a[m // u]
        else:
            q, e = fac[0]
            if e == 1:
                a[m] = int(ap[q])
            elif N % q == 0:
                a[m] = a[q] * a[m // q]
            else:
                a[m] = a[q] * a[m // q] - q ** (k - 1) * a[m // q // q]
    return a[1:]


@dataclass
class EigenBlock:
    """A Hecke-stable subspace with a rational system of eigenvalues away from N."""

    basis: fmpq_mat
    eigenvalues: dict       # q -> fmpq for the splitting primes


@dataclass
class EigenformSearch:
    k: int
    N: int
    newforms: list = field(default_factory=list)
    oldforms: list = field(default_factory=list)      # (Eigenform at level M, multiplicity)
    nonrational: list = field(default_factory=list)   # (dimension, [(q, charpoly)])
    unresolved: list = field(default_factory=list)    # (dimension, eigenvalues)


def _split(space: ManinSymbolSpace, primes):
    """Split the space into rational joint generalized eigenspaces and the rest."""
    d = space.dim
    blocks = [(_identity(d), {})] if d else []
    done, nonrat = [], []
    for q in primes:
        if not blocks:
            break
        Tq = space.prime_hecke(q)
        nxt = []
        for V, ev in blocks:
            piv = rref_q(V)[1]
            A = _coords(V, piv, V * Tq)
            cp = charpoly(A)
            roots = rational_roots(cp)
            got = 0
            for r, e in roots:
                M = A - r * _identity(A.nrows())
                K = left_kernel_q(M ** e)
                W = rref_q(K * V)[0]
                got += W.nrows()
                nxt.append((W, {**ev, q: r}))
            if got < V.nrows():
                # the part of V where T_q has no rational eigenvalue
                poly = cp
                for r, e in roots:
                    poly = poly // (fmpq_poly([-r, 1]) ** e)
                K = left_kernel_q(_poly_eval(poly, A))
                W = rref_q(K * V)[0]
                nonrat.append((W, {**ev}, q, poly))
        # blocks of dimension <= 2 are final
        blocks = []
        for V, ev in nxt:
            (done if V.nrows() <= 2 else blocks).append((V, ev))
    done.extend(blocks)
    return done, nonrat


def _poly_eval(poly, A: fmpq_mat) -> fmpq_mat:
    n = A.nrows()
    out = fmpq_mat(n, n)
    for i in range(poly.degree(), -1, -1):
        out = out * A + poly[i] * _identity(n)
    return out


def _dual_functional(amb: ModularSymbols, ev: dict):
    """A column vector phi with T_q phi = a_q phi on the ambient space."""
    d = amb.dim
    K = None
    for q, a in ev.items():
        M = amb.prime_hecke(q) - a * _identity(d)
        rows = kernel_q(M)         # right kernel: {v : M v^T = 0}
        K = rows if K is None else _intersect_rows(K, rows)
        if K.nrows() == 0:
            break
    return K


def _intersect_rows(A: fmpq_mat, B: fmpq_mat) -> fmpq_mat:
    """Row span of A cap row span of B."""
    if A.nrows() == 0 or B.nrows() == 0:
        return fmpq_mat(0, A.ncols())
    # x A = y B  <=>  [x, -y] [A; B] = 0
    na, d = A.nrows(), A.ncols()
    S = fmpq_mat(na + B.nrows(), d)
    for i in range(na):
        for j in range(d):
            S[i, j] = A[i, j]
    for i in range(B.nrows()):
        for j in range(d):
            S[na + i, j] = B[i, j]
    K = left_kernel_q(S)
    if K.nrows() == 0:
        return fmpq_mat(0, d)
    X = fmpq_mat(K.nrows(), na)
    for i in range(K.nrows()):
        for j in range(na):
            X[i, j] = K[i, j]
    R = X * A
    ech, piv = rref_q(R)
    return fmpq_mat([[ech[i, j] for j in range(d)] for i in range(len(piv))]) if piv else fmpq_mat(0, d)


def _eigenvalue(amb: ModularSymbols, phi: fmpq_mat, m: int, b: int) -> fmpq:
    """a with T_m phi = a phi, read off from row b (phi_b != 0); m prime."""
    row = amb.heilbronn_row(b, m)
    val = fmpq(0)
    for j in range(amb.dim):
        if row[0, j] != 0:
            val += row[0, j] * phi[0, j]
    return val / phi[0, b]


def _sturm(k, N):
    return -(-k * gamma0_index(N) // 12)


@lru_cache(maxsize=64)
def rational_eigenforms(k: int, N: int, B: int) -> EigenformSearch:
    """Rational Hecke eigensystems of S_k(Gamma_0(N)) with coefficients to a_B.

    Newforms are returned as :class:`Eigenform`; blocks whose eigenvalues
    match a form at a proper divisor level are listed as oldforms.
    """
    space = build_space(k, N, cuspidal=True)
    out = EigenformSearch(k, N)
    if space.dim == 0:
        return out
    split_primes = [q for q in primes_upto(max(_sturm(k, N), 2)) if N % q]
    done, nonrat = _split(space, split_primes)
    amb = space.ambient
    divisor_forms = []
    for M in sorted(d for d in range(1, N) if N % d == 0):
        if dim_formula(k, M) == 0:
            continue
        sub = rational_eigenforms(k, M, B)
        divisor_forms.extend(sub.newforms)
    for V, ev in done:
        match = None
        for g in divisor_forms:
            if all(g.a(q) == ev[q] for q in ev if q <= g.bound):
                match = g
                break
        if match is not None:
            out.oldforms.append((match, V.nrows()))
            continue
        if V.nrows() != 2:
            out.unresolved.append((V.nrows(), {q: str(v) for q, v in ev.items()}))
            continue
        phi = _dual_functional(amb, ev)
        if phi.nrows() != 2:
            out.unresolved.append((V.nrows(), {q: str(v) for q, v in ev.items()}))
            continue
        phi = fmpq_mat([[phi[0, j] for j in range(amb.dim)]])
        b = next(j for j in range(amb.dim) if phi[0, j] != 0)
        ap = {}
        for q in primes_upto(B):
            a = ev[q] if q in ev else _eigenvalue(amb, phi, q, b)
            if a.q != 1:
                raise ArithmeticError("non-integral eigenvalue %s at q=%d" % (a, q))
            ap[q] = int(a.p)
        coeffs = coefficients_from_primes(ap, k, N, B)
        label = "%d.%d.%s" % (N, k, _label_suffix(len(out.newforms)))
        out.newforms.append(Eigenform(label, k, N, coeffs))
    for W, ev, q, poly in nonrat:
        out.nonrational.append((W.nrows(), [(q, str(poly))]))
    return out


def _label_suffix(i: int) -> str:
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(97 + r) + s
    return s
