"""Exhaustive lifts of an unramified residual representation of the tame group.

The tame quotient is generated by sigma (a Frobenius lift) and tau (a tame
inertia generator) with sigma tau sigma^-1 = tau^q.  The residual
representation is sigma -> diag(q alpha, alpha^-1), tau -> 1.  Lifts to a small
coefficient ring A are normalised as

    sigma -> diag(q a0 (1+s), (a0 (1+s))^-1),    tau -> [[a, t1], [t2, d]]

with a0 the Teichmuller lift of alpha, det tau = 1 and s, a-1, t1, t2, d-1 in
the maximal ideal.  The solution set is compared with the A-points of the
expected versal ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .gl2 import h_eval, power_via_h
from .witt import WittRing

__all__ = [
    "DualNumber", "DualRing", "coefficient_ring", "TameParams", "TameLift", "classify",
    "enumerate_lifts", "versal_points", "match_versal", "VersalReport", "hensel_sqrt",
    "tangent_dimension", "conjugate_lift", "matrix_power", "LiftCapExceeded", "check_tau_power",
]

LIFT_CAP = 5 ** 4


class DualNumber:
    """a + b eps over F_p with eps^2 = 0."""

    __slots__ = ("p", "a", "b")

    def __init__(self, p, a, b=0):
        self.p, self.a, self.b = p, a % p, b % p

    def _c(self, o):
        if isinstance(o, DualNumber):
            return o
        if isinstance(o, int):
            return DualNumber(self.p, o, 0)
        return NotImplemented

    def __add__(self, o):
        o = self._c(o)
        return DualNumber(self.p, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._c(o)
        return DualNumber(self.p, self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return DualNumber(self.p, self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __neg__(self):
        return DualNumber(self.p, -self.a, -self.b)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = DualNumber(self.p, 1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_unit(self):
        return self.a != 0

    def inverse(self):
        if not self.a:
            raise ZeroDivisionError("not a unit")
        ai = pow(self.a, -1, self.p)
        return DualNumber(self.p, ai, -self.b * ai * ai)

    def __truediv__(self, o):
        return self * self._c(o).inverse()

    def __eq__(self, o):
        o = self._c(o)
        return o is not NotImplemented and (self.a, self.b) == (o.a, o.b)

    def __hash__(self):
        return hash((self.p, self.a, self.b))

    def __repr__(self):
        return "%d+%deps" % (self.a, self.b)


class DualRing:
    def __init__(self, p):
        self.p = p
        self.name = "F%d[eps]" % p

    def __call__(self, x):
        return x if isinstance(x, DualNumber) else DualNumber(self.p, x)

    def one(self):
        return DualNumber(self.p, 1)

    def maximal_ideal(self):
        return [DualNumber(self.p, 0, b) for b in range(self.p)]

    def teichmuller(self, alpha):
        return DualNumber(self.p, alpha)

    def residue(self, x):
        return x.a

    def size(self):
        return self.p ** 2


class _ZRing:
    """Z/p^m through WittElem, with the extra hooks used here."""

    def __init__(self, p, m):
        self.w = WittRing(p, m)
        self.p, self.m = p, m
        self.name = "Z/%d" % p ** m

    def __call__(self, x):
        return self.w(x)

    def one(self):
        return self.w.one()

    def maximal_ideal(self):
        return [self.w(self.p * i) for i in range(self.p ** (self.m - 1))]

    def teichmuller(self, alpha):
        return self.w.teichmuller(alpha)

    def residue(self, x):
        return int(x) % self.p

    def size(self):
        return self.p ** self.m


def coefficient_ring(kind: str, p: int):
    """``zp2``, ``zp3`` or ``dual``."""
    if kind == "zp2":
        return _ZRing(p, 2)
    if kind == "zp3":
        return _ZRing(p, 3)
    if kind == "dual":
        return DualRing(p)
    raise ValueError("unknown coefficient ring %r" % kind)


def classify(p: int, q: int, alpha: int) -> str:
    """Which presentation applies: 'i', 'ii', 'iii', or 'excluded' / 'unclassified'."""
    if q % p == 0 or alpha % p == 0:
        raise ValueError("need p not dividing q and alpha a unit")
    a2 = alpha * alpha % p
    if q * a2 % p == 1:
        return "excluded"          # q alpha = alpha^-1: the residual twist is trivial
    if a2 == 1:
        if q % p == p - 1:
            return "iii"
        if q * q % p != 1:
            return "ii"
        return "unclassified"
    if q * q * a2 % p != 1:
        return "i"
    return "unclassified"


@dataclass(frozen=True)
class TameParams:
    p: int
    q: int
    alpha: int
    ring_kind: str = "zp2"

    def __post_init__(self):
        if self.q % self.p == 0:
            raise ValueError("q must be prime to p")
        if self.alpha % self.p == 0:
            raise ValueError("alpha must be a unit")

    @property
    def case(self) -> str:
        return classify(self.p, self.q, self.alpha)

    def ring(self):
        return coefficient_ring(self.ring_kind, self.p)


@dataclass(frozen=True)
class TameLift:
    s: object
    a: object
    t1: object
    t2: object
    d: object

    def tau(self):
        return [[self.a, self.t1], [self.t2, self.d]]

    def key(self):
        return (self.s, self.a, self.t1, self.t2, self.d)


class LiftCapExceeded(RuntimeError):
    pass


def matrix_power(M, e: int):
    """Repeated squaring for 2x2 matrices of ring elements."""
    one = M[0][0] * 0 + 1
    zero = one * 0
    out = [[one, zero], [zero, one]]
    base = M
    while e:
        if e & 1:
            out = _mm(out, base)
        base = _mm(base, base)
        e >>= 1
    return out


def _mm(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


def _sigma_ratio(params: TameParams, ring, s):
    """x / y for sigma = diag(x, y), i.e. q a0^2 (1+s)^2."""
    a0 = ring.teichmuller(params.alpha)
    u = a0 * (1 + s)
    return ring(params.q) * u * u


def enumerate_lifts(params: TameParams, cap: int | None = None) -> list:
    """All normalised lifts, found by scanning (s, a, t1, t2) over the maximal ideal."""
    ring = params.ring()
    m = ring.maximal_ideal()
    cap = LIFT_CAP if cap is None else cap
    if len(m) > cap:
        raise LiftCapExceeded("maximal ideal has %d elements, cap %d" % (len(m), cap))
    q = params.q
    if isinstance(ring, _ZRing):
        return _enumerate_int(params, ring)
    hcache = {}
    out = []
    for s in m:
        r = _sigma_ratio(params, ring, s)
        ri = r.inverse()
        for ea, t1, t2 in product(m, repeat=3):
            a = 1 + ea
            d = (1 + t1 * t2) / a
            t = a + d
            if t not in hcache:
                hcache[t] = (h_eval(q, t), h_eval(q - 1, t))
            hq, hq1 = hcache[t]
            # sigma tau sigma^-1 = [[a, r t1], [t2 / r, d]] against h_q tau - h_{q-1}
            if a != hq * a - hq1 or d != hq * d - hq1:
                continue
            if r * t1 != hq * t1 or t2 * ri != hq * t2:
                continue
            out.append(TameLift(s, a, t1, t2, d))
    return out


def _enumerate_int(params: TameParams, ring: "_ZRing") -> list:
    """Same scan as enumerate_lifts on plain integers mod p^m."""
    N, p, q = ring.w.N, ring.p, params.q
    a0 = int(ring.teichmuller(params.alpha))
    m = range(0, N, p)
    hcache = {}
    out = []
    for s in m:
        r = q * pow(a0 * (1 + s), 2, N) % N
        ri = pow(r, -1, N)
        for ea in m:
            a = 1 + ea
            ai = pow(a, -1, N)
            for t1, t2 in product(m, repeat=2):
                d = (1 + t1 * t2) * ai % N
                t = (a + d) % N
                if t not in hcache:
                    hcache[t] = (h_eval(q, t, N), h_eval(q - 1, t, N))
                hq, hq1 = hcache[t]
                if (a - hq * a + hq1) % N or (d - hq * d + hq1) % N:
                    continue
                if (r * t1 - hq * t1) % N or (t2 * ri - hq * t2) % N:
                    continue
                w = ring.w
                out.append(TameLift(w(s), w(a), w(t1), w(t2), w(d)))
    return out


def hensel_sqrt(x, ring=None):
    """The square root of 1 + x congruent to 1, for x in the maximal ideal (p odd)."""
    target = 1 + x
    y = target * 0 + 1
    half = (y + 1).inverse()
    prev = None
    for _ in range(64):
        y = (y + target / y) * half
        if y == prev:
            break
        prev = y
    if y * y != target:
        raise ArithmeticError("square root did not converge")
    return y


def versal_points(params: TameParams) -> set:
    """A-points of the expected versal ring, written as lift tuples."""
    ring = params.ring()
    m = ring.maximal_ideal()
    case = params.case
    p, q = params.p, params.q
    pts = set()
    if case == "i":
        if q % p == 1:
            for S, T in product(m, repeat=2):
                a = 1 + T
                if a ** q == a:
                    pts.add((S, a, a * 0, a * 0, a.inverse()))
        else:
            for S in m:
                one = ring.one()
                pts.add((S, one, one * 0, one * 0, one))
    elif case == "ii":
        for S, T in product(m, repeat=2):
            if S * T == 0:
                one = ring.one()
                pts.add((S, one, T, one * 0, one))
    elif case == "iii":
        qq = ring(q)
        for S, T1, T2 in product(m, repeat=3):
            a = hensel_sqrt(T1 * T2)
            h = h_eval(q, 2 * a)
            u = qq * (1 + S) * (1 + S)
            if T1 * (u - h) == 0 and T2 * (1 - u * h) == 0:
                pts.add((S, a, T1, T2, a))
    else:
        raise ValueError("no versal presentation for case %r" % case)
    return pts


@dataclass
class VersalReport:
    case: str
    ring: str
    lifts: int
    points: int
    match: bool | None
    only_in_lifts: list = field(default_factory=list)
    only_in_points: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "case": self.case, "ring": self.ring, "lifts": self.lifts, "points": self.points,
            "match": self.match, "only_in_lifts": [repr(x) for x in self.only_in_lifts[:10]],
            "only_in_points": [repr(x) for x in self.only_in_points[:10]], "notes": self.notes,
        }


def match_versal(params: TameParams, lifts) -> VersalReport:
    """Compare enumerated lifts with the points of the presentation for their case."""
    ring = params.ring()
    case = params.case
    got = {l.key() for l in lifts}
    if case not in ("i", "ii", "iii"):
        return VersalReport(case, ring.name, len(got), 0, None,
                            notes=["no presentation is asserted for these residual data"])
    pts = versal_points(params)
    notes = []
    if case == "iii":
        notes.append("a = d is taken as the square root of 1 + t1 t2 congruent to 1")
    return VersalReport(case, ring.name, len(got), len(pts), got == pts,
                        sorted(got - pts, key=repr), sorted(pts - got, key=repr), notes)


def tangent_dimension(params: TameParams, lifts=None) -> int:
    """Dimension of the lift set over F_p[eps]; checks it is a linear subspace."""
    if params.ring_kind != "dual":
        raise ValueError("tangent space needs the dual numbers")
    lifts = enumerate_lifts(params) if lifts is None else lifts
    p = params.p
    vecs = {(l.s.b, l.a.b, l.t1.b, l.t2.b) for l in lifts}
    for u, v in product(vecs, repeat=2):
        if tuple((x + y) % p for x, y in zip(u, v)) not in vecs:
            raise ArithmeticError("the lift set is not closed under addition")
    dim, size = 0, 1
    while size < len(vecs):
        size *= p
        dim += 1
    if size != len(vecs):
        raise ArithmeticError("lift count %d is not a power of %d" % (len(vecs), p))
    return dim


def conjugate_lift(lift: TameLift, u) -> TameLift:
    """Conjugate by diag(u, 1); sigma is unchanged."""
    return TameLift(lift.s, lift.a, u * lift.t1, lift.t2 / u, lift.d)


def check_tau_power(params: TameParams, lift: TameLift) -> bool:
    """h_q formula for tau^q agrees with repeated squaring."""
    return power_via_h(lift.tau(), params.q) == matrix_power(lift.tau(), params.q)
