"""Exact linear algebra over Q, Z and Z/p^n.

Rational and integer matrices are python-flint ``fmpq_mat`` / ``fmpz_mat``
values.  Matrices over Z/p^n are :class:`PNMatrix` (numpy ``int64`` entries);
their row spans are canonicalised by :func:`howell_form`.

Conventions: ``kernel_q(m)`` and ``kernel_mod(m)`` return the *right* kernel
``{v : m v^T = 0}`` as basis rows.  Use the ``left_`` variants for
``{v : v m = 0}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from flint import fmpq, fmpq_mat, fmpq_poly, fmpz_mat

__all__ = [
    "as_qmat", "as_zmat", "rref_q", "kernel_q", "left_kernel_q", "rank_q",
    "charpoly", "rational_roots", "left_kernel_z", "saturate_lattice",
    "lattice_basis", "is_saturated", "PNMatrix", "HowellBasis", "howell_form",
    "kernel_mod", "left_kernel_mod", "intersect_mod", "span_mod", "contains_mod",
    "scale_mod",
]


def as_qmat(m) -> fmpq_mat:
    if isinstance(m, fmpq_mat):
        return m
    if isinstance(m, fmpz_mat):
        return fmpq_mat(m)
    rows = [list(r) for r in m]
    if not rows:
        return fmpq_mat(0, 0)
    return fmpq_mat(len(rows), len(rows[0]), [fmpq(x) if not isinstance(x, fmpq) else x
                                              for r in rows for x in r])


def as_zmat(m) -> fmpz_mat:
    if isinstance(m, fmpz_mat):
        return m
    rows = [list(r) for r in m]
    if not rows:
        return fmpz_mat(0, 0)
    return fmpz_mat(len(rows), len(rows[0]), [int(x) for r in rows for x in r])


def _pivots(r: fmpq_mat, rank: int) -> list[int]:
    piv = []
    c = 0
    for i in range(rank):
        while r[i, c] == 0:
            c += 1
        piv.append(c)
    return piv


def rref_q(m) -> tuple[fmpq_mat, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    m = as_qmat(m)
    if m.nrows() == 0 or m.ncols() == 0:
        return m, []
    r, rank = m.rref()
    return r, _pivots(r, rank)


def rank_q(m) -> int:
    return len(rref_q(m)[1])


def kernel_q(m) -> fmpq_mat:
    """Basis rows of ``{v : m v^T = 0}``; echelon at the free columns."""
    m = as_qmat(m)
    cols = m.ncols()
    r, piv = rref_q(m)
    free = [j for j in range(cols) if j not in set(piv)]
    out = fmpq_mat(len(free), cols)
    for k, j in enumerate(free):
        out[k, j] = 1
        for i, pc in enumerate(piv):
            out[k, pc] = -r[i, j]
    return out


def left_kernel_q(m) -> fmpq_mat:
    return kernel_q(as_qmat(m).transpose())


def charpoly(m) -> fmpq_poly:
    """``det(X I - m)``."""
    m = as_qmat(m)
    if m.nrows() != m.ncols():
        raise ValueError("charpoly needs a square matrix, got %dx%d" % (m.nrows(), m.ncols()))
    if m.nrows() == 0:
        return fmpq_poly([1])
    return m.charpoly()


def rational_roots(poly: fmpq_poly) -> list[tuple[fmpq, int]]:
    """Rational roots with multiplicity, sorted."""
    roots = []
    if poly.degree() <= 0:
        return roots
    _, factors = poly.factor()
    for f, e in factors:
        if f.degree() == 1:
            roots.append((-f[0] / f[1], e))
    return sorted(roots, key=lambda t: t[0])


# --------------------------------------------------------------------------
# integer lattices

def left_kernel_z(a) -> fmpz_mat:
    """A saturated Z-basis of ``{x in Z^n : x a = 0}`` for an n x r matrix ``a``."""
    a = as_zmat(a)
    n, r = a.nrows(), a.ncols()
    if n == 0:
        return fmpz_mat(0, 0)
    aug = fmpz_mat(n, r + n)
    for i in range(n):
        for j in range(r):
            aug[i, j] = a[i, j]
        aug[i, r + i] = 1
    h = aug.hnf()
    rows = []
    for i in range(n):
        if all(h[i, j] == 0 for j in range(r)):
            row = [h[i, r + j] for j in range(n)]
            if any(x != 0 for x in row):
                rows.append(row)
    if not rows:
        return fmpz_mat(0, n)
    return fmpz_mat(rows)


def saturate_lattice(m) -> fmpz_mat:
    """Z-basis of ``(L (x) Q) cap Z^n`` where ``L`` is the row lattice of ``m``."""
    m = as_zmat(m)
    n = m.ncols()
    kern = left_kernel_z(m.transpose())
    if kern.nrows() == 0:
        if rank_q(m) == 0:
            return fmpz_mat(0, n)
        return fmpz_mat([[1 if i == j else 0 for j in range(n)] for i in range(n)])
    return left_kernel_z(kern.transpose())


def lattice_basis(m) -> fmpz_mat:
    """Nonzero rows of the Hermite normal form: a Z-basis of the row lattice."""
    m = as_zmat(m)
    h = m.hnf()
    rows = [[h[i, j] for j in range(h.ncols())] for i in range(h.nrows())]
    rows = [r for r in rows if any(x != 0 for x in r)]
    if not rows:
        return fmpz_mat(0, m.ncols())
    return fmpz_mat(rows)


def is_saturated(m) -> bool:
    """True iff ``Z^n / L`` is torsion free (all elementary divisors are 1)."""
    m = as_zmat(m)
    if m.nrows() == 0:
        return True
    s = m.snf()
    for i in range(min(s.nrows(), s.ncols())):
        if s[i, i] not in (0, 1):
            return False
    return True


# --------------------------------------------------------------------------
# Z / p^n

@dataclass(frozen=True)
class PNMatrix:
    """Matrix over Z/p^n; ``entries`` is reduced into ``[0, p^n)``."""

    p: int
    n: int
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("PNMatrix entries must be 2-dimensional")
        object.__setattr__(self, "entries", np.mod(a, self.p ** self.n))

    @classmethod
    def from_rows(cls, p, n, rows, ncols=None):
        rows = [list(map(int, r)) for r in rows]
        if not rows:
            return cls(p, n, np.zeros((0, ncols or 0), np.int64))
        return cls(p, n, np.array([[x % p ** n for x in r] for r in rows], dtype=np.int64))

    @classmethod
    def from_qmat(cls, p, n, m):
        """Reduce a p-integral rational matrix."""
        N = p ** n
        m = as_qmat(m)
        out = np.zeros((m.nrows(), m.ncols()), np.int64)
        for i in range(m.nrows()):
            for j in range(m.ncols()):
                x = m[i, j]
                den = int(x.q)
                if den % p == 0:
                    raise ValueError("entry %s at (%d,%d) is not %d-integral" % (x, i, j, p))
                out[i, j] = int(x.p) * pow(den, -1, N) % N
        return cls(p, n, out)

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other: "PNMatrix") -> "PNMatrix":
        return PNMatrix(self.p, self.n, _matmul_mod(self.entries, other.entries, self.modulus))

    def __sub__(self, other) -> "PNMatrix":
        return PNMatrix(self.p, self.n, self.entries - other.entries)

    def __add__(self, other) -> "PNMatrix":
        return PNMatrix(self.p, self.n, self.entries + other.entries)

    def __eq__(self, other):
        return (isinstance(other, PNMatrix) and (self.p, self.n) == (other.p, other.n)
                and self.entries.shape == other.entries.shape
                and bool(np.all(self.entries == other.entries)))

    def __hash__(self):
        return hash((self.p, self.n, self.entries.shape, self.entries.tobytes()))

    def scalar_sub(self, c: int) -> "PNMatrix":
        """``self - c * I``."""
        e = self.entries.copy()
        idx = np.arange(min(e.shape))
        e[idx, idx] -= c
        return PNMatrix(self.p, self.n, e)

    def transpose(self) -> "PNMatrix":
        return PNMatrix(self.p, self.n, self.entries.T.copy())

    def identity_like(self) -> "PNMatrix":
        return PNMatrix(self.p, self.n, np.eye(self.entries.shape[0], dtype=np.int64))

    def power(self, e: int) -> "PNMatrix":
        result = self.identity_like()
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result


def _matmul_mod(a, b, N):
    # entries < N <= ~ 2^20 keep int64 partial sums exact for dims in scope
    if N < 2 ** 20 and a.shape[1] < 2 ** 20:
        return np.mod(a @ b, N)
    return np.mod(np.array(a, dtype=object) @ np.array(b, dtype=object), N).astype(np.int64)


def _val(x: int, p: int, n: int) -> int:
    if x == 0:
        return n
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class HowellBasis:
    """Canonical generators (Howell form) of a submodule of (Z/p^n)^dim."""

    p: int
    n: int
    dim: int
    rows: tuple

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    def is_zero(self) -> bool:
        return not self.rows

    def as_array(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.dim), np.int64)
        return np.array(self.rows, dtype=np.int64)

    def pivots(self) -> list[tuple[int, int]]:
        """(column, valuation) of each leading entry."""
        out = []
        for r in self.rows:
            j = next(i for i, x in enumerate(r) if x)
            out.append((j, _val(r[j], self.p, self.n)))
        return out

    def order(self) -> int:
        """Number of elements of the submodule."""
        size = 1
        for _, v in self.pivots():
            size *= self.p ** (self.n - v)
        return size

    def reduces_to_zero_mod_p(self) -> bool:
        """True iff every element of the submodule is divisible by p."""
        return all(x % self.p == 0 for r in self.rows for x in r)

    def __len__(self):
        return len(self.rows)


def howell_form(m: PNMatrix) -> HowellBasis:
    """Howell form of the row span of ``m`` over Z/p^n.

    Leading entries are powers of p, entries above a leading entry p^v lie in
    ``[0, p^v)``, and the Howell property holds: span elements vanishing on
    the first j columns are combinations of the rows vanishing there.
    """
    p, n = m.p, m.n
    N = p ** n
    ncols = m.entries.shape[1]
    work = [row.copy() for row in np.mod(m.entries, N) if row.any()]
    pivot_rows = []
    pivot_info = []
    for j in range(ncols):
        if not work:
            break
        best, best_v = -1, n
        for idx, row in enumerate(work):
            x = int(row[j])
            if x:
                v = _val(x, p, n)
                if v < best_v:
                    best, best_v = idx, v
                    if v == 0:
                        break
        if best < 0:
            continue
        prow = work.pop(best)
        unit = int(prow[j]) // p ** best_v
        prow = np.mod(prow * pow(unit, -1, N), N)
        pv = p ** best_v
        rest = []
        for row in work:
            x = int(row[j])
            if x:
                row = np.mod(row - (x // pv) * prow, N)
            if row.any():
                rest.append(row)
        killed = np.mod(prow * (p ** (n - best_v)), N)
        if killed.any():
            rest.append(killed)
        work = rest
        pivot_rows.append(prow)
        pivot_info.append((j, pv))
    for i, (j, pv) in enumerate(pivot_info):
        for k in range(i):
            x = int(pivot_rows[k][j])
            if x >= pv:
                pivot_rows[k] = np.mod(pivot_rows[k] - (x // pv) * pivot_rows[i], N)
    return HowellBasis(p, n, ncols, tuple(tuple(int(x) for x in r) for r in pivot_rows))


def span_mod(p: int, n: int, rows, dim: int) -> HowellBasis:
    return howell_form(PNMatrix.from_rows(p, n, rows, ncols=dim) if len(rows)
                       else PNMatrix(p, n, np.zeros((0, dim), np.int64)))


def _block_kernel(a: np.ndarray, p: int, n: int) -> HowellBasis:
    """Howell basis of ``{x : x a = 0}`` for an r x c array ``a``."""
    r, c = a.shape
    aug = np.zeros((r, c + r), np.int64)
    aug[:, :c] = a
    aug[:, c:] = np.eye(r, dtype=np.int64)
    h = howell_form(PNMatrix(p, n, aug))
    rows = [row[c:] for row in h.rows if not any(row[:c])]
    return HowellBasis(p, n, r, tuple(tuple(x) for x in rows))


def left_kernel_mod(m: PNMatrix) -> HowellBasis:
    """``{v : v m = 0}``."""
    return _block_kernel(m.entries, m.p, m.n)


def kernel_mod(m: PNMatrix) -> HowellBasis:
    """``{v : m v^T = 0}`` over Z/p^n."""
    return _block_kernel(m.entries.T.copy(), m.p, m.n)


def _check_compatible(a: HowellBasis, b: HowellBasis):
    if (a.p, a.n) != (b.p, b.n):
        raise ValueError("modulus mismatch: %d^%d vs %d^%d" % (a.p, a.n, b.p, b.n))
    if a.dim != b.dim:
        raise ValueError("ambient dimension mismatch: %d vs %d" % (a.dim, b.dim))


def intersect_mod(a: HowellBasis, b: HowellBasis) -> HowellBasis:
    _check_compatible(a, b)
    d = a.dim
    if a.is_zero() or b.is_zero():
        return HowellBasis(a.p, a.n, d, ())
    A, B = a.as_array(), b.as_array()
    stacked = np.zeros((len(A) + len(B), 2 * d), np.int64)
    stacked[:len(A), :d] = A
    stacked[:len(A), d:] = A
    stacked[len(A):, :d] = B
    h = howell_form(PNMatrix(a.p, a.n, stacked))
    rows = [row[d:] for row in h.rows if not any(row[:d])]
    return HowellBasis(a.p, a.n, d, tuple(tuple(x) for x in rows))


def contains_mod(b: HowellBasis, v) -> bool:
    """Membership test by leading-entry reduction."""
    N = b.modulus
    v = [int(x) % N for x in v]
    for row, (j, val) in zip(b.rows, b.pivots()):
        pv = b.p ** val
        if v[j] % pv:
            return False
        c = v[j] // pv
        v = [(x - c * y) % N for x, y in zip(v, row)]
    return not any(v)


def scale_mod(b: HowellBasis, c: int) -> HowellBasis:
    """Howell basis of ``c * X``."""
    return span_mod(b.p, b.n, [[c * x for x in r] for r in b.rows], b.dim)

