"""Finite computations in GL_2(W/p^n): the polynomials h_n, subgroup closure,
transvection orders and H^1 of matrix groups with coefficients in ad^0(i).

Matrices over a :class:`~modcomp.witt.WittRing` are 4-tuples ``(a, b, c, d)``
of raw ring coordinates (see ``WittRing.mul_t``); :func:`mat` builds them
from nested integer lists.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .witt import WittRing

__all__ = [
    "HPoly", "h_poly", "h_eval", "power_via_h", "mat", "mat_mul", "mat_inv", "mat_det",
    "identity", "MatrixGroup", "ClosureCapExceeded", "subgroup_closure", "sl2_generators",
    "gl2_generators", "sl2_group", "gl2_group", "contains_sl2", "transvection_preimage_orders",
    "transvection_order", "element_order", "AdModule", "h1_dimension", "cocycle_basis",
    "restriction_rank", "sylow_subgroup", "conj_identity",
]

CLOSURE_CAP = int(os.environ.get("MODCOMP_CLOSURE_CAP", 10 ** 6))
H1_CAP = int(os.environ.get("MODCOMP_H1_CAP", 5000))


# --------------------------------------------------------------------------
# h_n(T)

@dataclass(frozen=True)
class HPoly:
    """h_n(T) as integer coefficients, constant term first."""

    n: int
    coeffs: tuple

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __str__(self):
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else "T^%d" % i)
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c)
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ") or "0"


def _poly_tminus(a, b):
    """T*a - b for coefficient lists."""
    out = [0] + list(a)
    for i, c in enumerate(b):
        out[i] -= c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def h_poly(n: int) -> HPoly:
    """h_1 = 1, h_2 = T, h_{n+2} = T h_{n+1} - h_n."""
    if n < 1:
        raise ValueError("h_n is defined for n >= 1")
    prev, cur = [0], [1]          # h_0 = 0 keeps the recursion valid at n = 1
    for _ in range(n - 1):
        prev, cur = cur, _poly_tminus(cur, prev)
    return HPoly(n, tuple(cur))


def h_eval(n: int, t, modulus: int | None = None):
    """h_n(t) by the recursion, in whatever ring ``t`` lives in."""
    if n < 0:
        raise ValueError("n must be >= 0")
    zero, one = t * 0, t * 0 + 1
    prev, cur = zero, one
    if n == 0:
        return zero
    for _ in range(n - 1):
        prev, cur = cur, t * cur - prev
        if modulus is not None:
            cur %= modulus
    return cur % modulus if modulus is not None else cur


def power_via_h(M, n: int, modulus: int | None = None):
    """M^n = h_n(t) M - h_{n-1}(t) I for det(M) = 1, t = trace(M)."""
    (a, b), (c, d) = M
    det = a * d - b * c
    if modulus is not None:
        det %= modulus
    if det != 1:
        raise ValueError("power_via_h needs det(M) = 1, got %r" % (det,))
    if n < 0:
        raise ValueError("negative exponent")
    if n == 0:
        one = a * 0 + 1
        return [[one, one * 0], [one * 0, one]]
    t = a + d
    hn, hm = h_eval(n, t, modulus), h_eval(n - 1, t, modulus)
    out = [[hn * a - hm, hn * b], [hn * c, hn * d - hm]]
    if modulus is not None:
        out = [[x % modulus for x in row] for row in out]
    return out


# --------------------------------------------------------------------------
# 2x2 matrices over a Witt ring

def mat(ring: WittRing, rows):
    (a, b), (c, d) = rows
    conv = lambda x: ring.from_int_t(x) if isinstance(x, int) else tuple(x)
    return (conv(a), conv(b), conv(c), conv(d))


def identity(ring: WittRing):
    return (ring.one_t, ring.zero_t, ring.zero_t, ring.one_t)


def mat_mul(ring: WittRing, A, B):
    a, b, c, d = A
    e, f, g, h = B
    m, ad = ring.mul_t, ring.add_t
    return (ad(m(a, e), m(b, g)), ad(m(a, f), m(b, h)),
            ad(m(c, e), m(d, g)), ad(m(c, f), m(d, h)))


def mat_det(ring: WittRing, A):
    a, b, c, d = A
    return ring.sub_t(ring.mul_t(a, d), ring.mul_t(b, c))


def mat_inv(ring: WittRing, A):
    a, b, c, d = A
    di = ring.inv_t(mat_det(ring, A))
    m = ring.mul_t
    return (m(d, di), ring.neg_t(m(b, di)), ring.neg_t(m(c, di)), m(a, di))


def _fast_ops(ring: WittRing):
    """Integer-tuple multiplication for f = 1, which dominates closure time."""
    if ring.f != 1:
        return lambda A, B: mat_mul(ring, A, B)
    N = ring.N

    def mul(A, B):
        (a,), (b,), (c,), (d,) = A
        (e,), (f,), (g,), (h,) = B
        return (((a * e + b * g) % N,), ((a * f + b * h) % N,),
                ((c * e + d * g) % N,), ((c * f + d * h) % N,))
    return mul


class ClosureCapExceeded(RuntimeError):
    pass


@dataclass
class MatrixGroup:
    ring: WittRing
    generators: tuple
    elements: list
    index: dict = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.index

    def __len__(self):
        return len(self.elements)


def subgroup_closure(gens, ring: WittRing, cap: int | None = None) -> MatrixGroup:
    """Breadth-first closure of ``gens`` under right multiplication."""
    cap = CLOSURE_CAP if cap is None else cap
    gens = tuple(gens)
    for g in gens:
        if not ring.is_unit_t(mat_det(ring, g)):
            raise ValueError("generator %r is not invertible" % (g,))
    mul = _fast_ops(ring)
    e = identity(ring)
    index = {e: 0}
    elements = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                if len(elements) > cap:
                    raise ClosureCapExceeded("closure exceeds cap %d" % cap)
                queue.append(y)
    return MatrixGroup(ring, gens, elements, index)


def _basis_t(ring: WittRing):
    return [tuple(1 if i == j else 0 for i in range(ring.f)) for j in range(ring.f)]


def sl2_generators(ring: WittRing):
    """Elementary matrices E12(b), E21(b) for b in the polynomial basis."""
    one, zero = ring.one_t, ring.zero_t
    gens = []
    for b in _basis_t(ring):
        gens.append((one, b, zero, one))
        gens.append((one, zero, b, one))
    return gens


def _unit_generators(ring: WittRing):
    if ring.f == 1:
        N, p = ring.N, ring.p
        for g in range(2, N + 1):
            if g % p == 0:
                continue
            order = (p - 1) * p ** (ring.n - 1)
            if all(pow(g, order // r, N) != 1 for r in _prime_factors(order)):
                return [ring.from_int_t(g)]
        return [ring.one_t]
    residue = WittRing(ring.p, 1, ring.f, tuple(c % ring.p for c in ring.modulus))
    q = ring.p ** ring.f
    gen = None
    for r in residue.residue_field():
        if not any(r):
            continue
        if all(residue.pow_t(r, (q - 1) // s) != residue.one_t for s in _prime_factors(q - 1)):
            gen = r
            break
    out = [ring.teichmuller_t(gen)]
    if ring.n > 1:
        for b in _basis_t(ring):
            out.append(ring.add_t(ring.one_t, tuple(ring.p * x for x in b)))
    return out


def _prime_factors(n):
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


def gl2_generators(ring: WittRing):
    zero, one = ring.zero_t, ring.one_t
    return sl2_generators(ring) + [(u, zero, zero, one) for u in _unit_generators(ring)]


def sl2_group(ring: WittRing, cap=None) -> MatrixGroup:
    return subgroup_closure(sl2_generators(ring), ring, cap)


def gl2_group(ring: WittRing, cap=None) -> MatrixGroup:
    return subgroup_closure(gl2_generators(ring), ring, cap)


def contains_sl2(G: MatrixGroup) -> bool:
    """SL_2 of the coefficient ring is generated by elementary matrices."""
    return all(g in G for g in sl2_generators(G.ring))


def element_order(ring: WittRing, g, limit: int = 10 ** 7) -> int:
    e = identity(ring)
    mul = _fast_ops(ring)
    x, k = g, 1
    while x != e:
        x = mul(x, g)
        k += 1
        if k > limit:
            raise RuntimeError("order exceeds %d" % limit)
    return k


def transvection_preimage_orders(p: int, n: int, f: int = 1) -> dict:
    """Orders of all I + p^(n-1) A times [[1,1],[0,1]] with tr A = 0 mod p."""
    if n < 2:
        raise ValueError("need n >= 2")
    ring = WittRing(p, n, f)
    res = WittRing(p, 1, f, tuple(c % p for c in ring.modulus))
    u = mat(ring, [[1, 1], [0, 1]])
    scale = p ** (n - 1)
    counts = {}
    for a, b, c in product(res.residue_field(), repeat=3):
        lift = lambda x: tuple(scale * t for t in x)
        A = (ring.add_t(ring.one_t, lift(a)), lift(b), lift(c), ring.sub_t(ring.one_t, lift(a)))
        g = mat_mul(ring, A, u)
        o = element_order(ring, g)
        counts[o] = counts.get(o, 0) + 1
    return counts


def transvection_order(p: int, n: int, f: int = 1, A=None) -> int:
    """Order of a preimage in SL_2(W/p^n) of [[1,1],[0,1]] mod p^(n-1).

    With ``A`` (a trace-zero integer matrix) the preimage is
    (I + p^(n-1) A) [[1,1],[0,1]]; without it, all preimages are checked and
    their common order returned.  For p = 3 the orders are not uniform and
    ValueError is raised.
    """
    if A is None:
        counts = transvection_preimage_orders(p, n, f)
        if len(counts) != 1:
            raise ValueError("preimage orders are not uniform: %r" % counts)
        return next(iter(counts))
    ring = WittRing(p, n, f)
    (a, b), (c, d) = A
    if (a + d) % p:
        raise ValueError("A must have trace 0 mod p")
    s = p ** (n - 1)
    g = mat_mul(ring, mat(ring, [[1 + s * a, s * b], [s * c, 1 + s * d]]), mat(ring, [[1, 1], [0, 1]]))
    if mat_det(ring, g) != ring.one_t:
        raise ValueError("preimage is not in SL_2")
    return element_order(ring, g)


def conj_identity(x, a, b, c, modulus: int) -> bool:
    """[[1,x],[0,1]] [[a,b],[c,-a]] [[1,-x],[0,1]] == [[a+cx, b-2ax-cx^2], [c, -a-cx]]."""
    N = modulus
    ring = WittRing(_smallest_prime(N), _exponent(N))
    u = mat(ring, [[1, x % N], [0, 1]])
    ui = mat(ring, [[1, -x % N], [0, 1]])
    A = mat(ring, [[a % N, b % N], [c % N, -a % N]])
    lhs = mat_mul(ring, mat_mul(ring, u, A), ui)
    rhs = mat(ring, [[(a + c * x) % N, (b - 2 * a * x - c * x * x) % N], [c % N, (-a - c * x) % N]])
    return lhs == rhs


def _smallest_prime(N):
    return _prime_factors(N)[0]


def _exponent(N):
    p, e = _smallest_prime(N), 0
    while N % p == 0:
        N //= p
        e += 1
    if N != 1:
        raise ValueError("modulus must be a prime power")
    return e


# --------------------------------------------------------------------------
# ad^0(i) and H^1

class AdModule:
    """Trace-zero 2x2 matrices over the residue field with g.A = det(g)^i g A g^-1.

    Coordinates: A = x [[1,0],[0,-1]] + y [[0,1],[0,0]] + z [[0,0],[1,0]];
    over F_{p^f} each coordinate is split into f F_p-coordinates.
    """

    def __init__(self, ring: WittRing, twist: int):
        self.ring = ring
        self.twist = twist
        self.p, self.f = ring.p, ring.f
        self.k = WittRing(ring.p, 1, ring.f, tuple(c % ring.p for c in ring.modulus))
        self.dim_fp = 3 * self.f

    def _to_matrix(self, vec):
        k, f = self.k, self.f
        x, y, z = (tuple(vec[i * f:(i + 1) * f]) for i in range(3))
        return (x, y, z, k.neg_t(x))

    def _from_matrix(self, A):
        a, b, c, _ = A
        return list(a) + list(b) + list(c)

    def action_matrix(self, g) -> np.ndarray:
        """F_p-matrix of the action; columns are images of basis vectors."""
        k = self.k
        gr = tuple(k.residue_t(x) for x in g)
        gi = mat_inv(k, gr)
        scal = k.pow_t(mat_det(k, gr), self.twist % (self.p ** self.f - 1)) if self.twist else k.one_t
        cols = []
        for i in range(self.dim_fp):
            e = [0] * self.dim_fp
            e[i] = 1
            img = mat_mul(k, mat_mul(k, gr, self._to_matrix(e)), gi)
            img = tuple(k.mul_t(scal, x) for x in img)
            cols.append(self._from_matrix(img))
        return np.array(cols, dtype=np.int64).T % self.p


def _rank_mod_p(rows: np.ndarray, p: int) -> tuple[int, np.ndarray]:
    """Rank and reduced echelon basis of the rows of an integer array mod p."""
    a = np.mod(np.array(rows, dtype=np.int64), p)
    if a.size == 0:
        return 0, a.reshape(0, a.shape[1] if a.ndim == 2 else 0)
    r = 0
    nrows, ncols = a.shape
    for j in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, j])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, j]), -1, p) % p
        col = a[:, j].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(col[mask], a[r])) % p
        r += 1
    return r, a[:r]


def _kernel_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """Basis rows of {u : a u = 0} over F_p."""
    ncols = a.shape[1]
    rank, ech = _rank_mod_p(a, p) if a.shape[0] else (0, np.zeros((0, ncols), np.int64))
    piv = []
    for row in ech:
        piv.append(int(np.nonzero(row)[0][0]))
    free = [j for j in range(ncols) if j not in set(piv)]
    out = np.zeros((len(free), ncols), np.int64)
    for t, j in enumerate(free):
        out[t, j] = 1
        for i, pc in enumerate(piv):
            out[t, pc] = -ech[i, j] % p
    return out


class _CocycleSystem:
    """Cochains xi: G -> ad^0(i) parametrised through a BFS tree.

    Unknowns are xi(e) and xi(s) for each generator s; along the tree
    xi(x s) = xi(x) + x.xi(s).  Imposing the cocycle identity for the chosen
    pairs (g, h) then cuts out Z^1 inside the unknown space.
    """

    def __init__(self, G: MatrixGroup, module: AdModule):
        self.G, self.M = G, module
        d = module.dim_fp
        r = len(G.generators)
        self.width = d * (r + 1)
        n = G.order
        p = module.p
        self.rho = np.array([module.action_matrix(g) for g in G.elements], dtype=np.int64)
        E = np.zeros((n, d, self.width), np.int64)
        E[0, :, :d] = np.eye(d, dtype=np.int64)
        seen = np.zeros(n, bool)
        seen[0] = True
        mul = _fast_ops(G.ring)
        queue = deque([0])
        while queue:
            xi = queue.popleft()
            x = G.elements[xi]
            for s_idx, s in enumerate(G.generators):
                yi = G.index[mul(x, s)]
                if not seen[yi]:
                    seen[yi] = True
                    blk = np.zeros((d, self.width), np.int64)
                    blk[:, d * (s_idx + 1): d * (s_idx + 2)] = np.eye(d, dtype=np.int64)
                    E[yi] = (E[xi] + self.rho[xi] @ blk) % p
                    queue.append(yi)
        self.E = E
        self._gen_index = [G.index[s] for s in G.generators]

    def constraints(self, pairs: str = "all") -> np.ndarray:
        G, p = self.G, self.M.p
        mul = _fast_ops(G.ring)
        basis = np.zeros((0, self.width), np.int64)
        hs = range(G.order) if pairs == "all" else self._gen_index
        hs = list(hs)
        for gi, g in enumerate(G.elements):
            prod_idx = np.fromiter((G.index[mul(g, G.elements[h])] for h in hs), np.int64, len(hs))
            # xi(gh) - xi(g) - g.xi(h) for every h, as (len(hs)*d, width) rows
            block = self.E[prod_idx] - self.E[gi][None] - np.einsum("ab,hbw->haw", self.rho[gi], self.E[hs])
            block = block.reshape(-1, self.width) % p
            block = block[block.any(axis=1)]
            if block.size:
                _, basis = _rank_mod_p(np.vstack([basis, block]), p)
        return basis

    def invariants_dim(self) -> int:
        p, d = self.M.p, self.M.dim_fp
        rows = [self.rho[i] - np.eye(d, dtype=np.int64) for i in self._gen_index]
        if not rows:
            return d
        rank, _ = _rank_mod_p(np.vstack(rows) % p, p)
        return d - rank


def _check_cap(G: MatrixGroup, cap):
    cap = H1_CAP if cap is None else cap
    if G.order > cap:
        raise ClosureCapExceeded("group order %d exceeds H^1 cap %d" % (G.order, cap))


def cocycle_basis(G: MatrixGroup, twist: int, pairs: str = "all", cap=None):
    """F_p-basis of Z^1(G, ad^0(twist)); each cocycle is an (|G|, 3f) array."""
    _check_cap(G, cap)
    M = AdModule(G.ring, twist)
    system = _CocycleSystem(G, M)
    cons = system.constraints(pairs)
    kern = _kernel_mod_p(cons, M.p) if cons.shape[0] else np.eye(system.width, dtype=np.int64)
    return [np.einsum("gaw,w->ga", system.E, u) % M.p for u in kern], system


def h1_dimension(G: MatrixGroup, twist, pairs: str = "all", cap=None) -> int:
    """dim over the residue field of H^1(G, ad^0(twist)) = dim Z^1 - dim B^1.

    ``pairs="all"`` imposes the cocycle identity on every pair (g, h);
    ``pairs="generators"`` only on pairs with h a generator (equivalent, faster).
    """
    _check_cap(G, cap)
    M = twist if isinstance(twist, AdModule) else AdModule(G.ring, twist)
    system = _CocycleSystem(G, M)
    cons = system.constraints(pairs)
    z1 = system.width - cons.shape[0]
    b1 = M.dim_fp - system.invariants_dim()
    dim_fp = z1 - b1
    if dim_fp % M.f:
        raise ArithmeticError("F_p-dimension %d not divisible by f=%d" % (dim_fp, M.f))
    return dim_fp // M.f


def restriction_rank(G: MatrixGroup, twist: int, subgroup, cap=None) -> int:
    """Dimension (over F_p) of the image of H^1(G) -> H^1(H) for H given by its elements."""
    cocycles, system = cocycle_basis(G, twist, pairs="generators", cap=cap)
    p, d = system.M.p, system.M.dim_fp
    H = [G.index[h] for h in subgroup]
    restricted = [z[H].reshape(-1) for z in cocycles]
    boundaries = []
    for i in range(d):
        m = np.zeros(d, np.int64)
        m[i] = 1
        boundaries.append(np.concatenate([(system.rho[h] @ m - m) % p for h in H]))
    rb, _ = _rank_mod_p(np.array(boundaries), p)
    rall, _ = _rank_mod_p(np.array(boundaries + restricted), p) if restricted else (rb, None)
    return rall - rb


def sylow_subgroup(G: MatrixGroup):
    """A Sylow p-subgroup of G as a list of elements.

    Tried as the intersection with conjugates (by elements of G) of the
    ambient Sylow group {g : g = [[1,*],[0,1]] mod p}; the order is checked.
    """
    ring = G.ring
    p = ring.p
    target = 1
    n = G.order
    while n % p == 0:
        n //= p
        target *= p
    mul = _fast_ops(ring)

    def in_ambient(g):
        a, b, c, d = (ring.residue_t(x) for x in g)
        one, zero = (1,) + (0,) * (ring.f - 1), (0,) * ring.f
        return a == one and d == one and c == zero

    seen = set()
    for x in G.elements:
        xi = mat_inv(ring, x)
        S = [g for g in G.elements if in_ambient(mul(mul(xi, g), x))]
        key = frozenset(S)
        if key in seen:
            continue
        seen.add(key)
        if len(S) == target:
            return S
    raise RuntimeError("no Sylow %d-subgroup found among ambient conjugates" % p)
