"""Companion forms modulo p^n.

A weight-k' eigenform g is a companion of f mod p^n when
a_q(f) = q^(k-1) a_q(g) mod p^n for almost all primes q.  Existence is
decided on the saturated lattice of cuspidal modular symbols: the joint kernel
K of the operators T_q - g_q acting on it mod p^n contains the reduction of a
primitive eigenvector of any such g, so if K lies in p times the lattice (its
p^(n-1) multiple vanishes) no companion exists at that level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .linalg import HowellBasis, intersect_mod, left_kernel_mod, scale_mod, span_mod
from .modsym import (Eigenform, _lattice, dim_formula, gamma0_index, primes_upto,
                     rational_eigenforms)

__all__ = [
    "target_weight", "sturm_bound", "companion_bound", "CongruenceResult", "congruence_check",
    "InsufficientCoefficients", "TwistedSystem", "twisted_system", "KernelResult", "kernel_test",
    "HypothesisFlags", "hypothesis_check", "fundamental_discriminants", "kronecker",
    "cm_detect", "CompanionReport", "companion_search", "greenberg_report", "GreenbergReport",
]

FOUND, RULED_OUT, INCONCLUSIVE, UNSUPPORTED = "FOUND", "RULED_OUT", "INCONCLUSIVE", "UNSUPPORTED"


def target_weight(k: int, p: int, n: int) -> int:
    """Least k' >= 2 with k + k' = 2 mod (p-1) p^(n-1)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    M = (p - 1) * p ** (n - 1)
    kp = (2 - k) % M
    while kp < 2:
        kp += M
    return kp


def sturm_bound(k: int, N: int) -> int:
    return -(-k * gamma0_index(N) // 12)


def companion_bound(k: int, kp: int, N: int) -> int:
    """Congruence bound across two weights: the Sturm bound of the larger one."""
    return sturm_bound(max(k, kp), N)


class InsufficientCoefficients(ValueError):
    pass


@dataclass
class CongruenceResult:
    passed: bool
    first_failure: int | None
    checked: list          # (m, a_m(f), a_m(g))

    def __bool__(self):
        return self.passed


def congruence_check(f: Eigenform, g: Eigenform, p: int, n: int, B: int) -> CongruenceResult:
    """a_m(f) = m^(k-1) a_m(g) mod p^n for all m <= B prime to pN."""
    if f.bound < B or g.bound < B:
        raise InsufficientCoefficients("need %d coefficients, have %d and %d" % (B, f.bound, g.bound))
    mod = p ** n
    bad_level = p * f.N
    checked = []
    for m in range(1, B + 1):
        if gcd(m, bad_level) != 1:
            continue
        af, ag = f.a(m), g.a(m)
        checked.append((m, af, ag))
        if (af - pow(m, f.k - 1, mod) * ag) % mod:
            return CongruenceResult(False, m, checked)
    return CongruenceResult(True, None, checked)


@dataclass(frozen=True)
class TwistedSystem:
    """Target eigenvalues g_q mod p^n for the companion, one per prime q."""

    p: int
    n: int
    values: tuple           # ((q, g_q), ...)

    def items(self):
        return self.values

    def as_dict(self):
        return dict(self.values)


def twisted_system(f: Eigenform, p: int, n: int, B: int, twist: bool = True) -> TwistedSystem:
    """g_q = a_q(f) (q^(k-1))^-1 mod p^n for primes q <= B, q prime to pN.

    ``twist=False`` gives a_q(f) itself (the system of f).
    """
    mod = p ** n
    vals = []
    for q in primes_upto(B):
        if q == p or f.N % q == 0:
            continue
        if q > f.bound:
            raise InsufficientCoefficients("a_%d missing" % q)
        a = f.a(q) % mod
        if twist:
            a = a * pow(pow(q, f.k - 1, mod), -1, mod) % mod
        vals.append((q, a))
    return TwistedSystem(p, n, tuple(vals))


@dataclass
class KernelResult:
    weight: int
    level: int
    p: int
    n: int
    kernel: HowellBasis          # the joint kernel K
    witness: HowellBasis         # p^(n-1) K; zero iff no companion at this level
    primes: list                 # primes intersected, in order
    lattice_rank: int

    @property
    def is_zero(self) -> bool:
        return self.witness.is_zero()


def kernel_test(kp: int, N: int, p: int, n: int, system: TwistedSystem, stop_early: bool = True):
    """Intersect ker(T_q - g_q) mod p^n on the cuspidal lattice of weight kp, level N.

    Returns the Howell basis of p^(n-1) K, which is zero exactly when the joint
    kernel K lies in p times the lattice; a companion eigenform would give an
    element of K outside it.  Use :func:`kernel_test_full` for K itself.
    """
    return kernel_test_full(kp, N, p, n, system, stop_early).witness


def kernel_test_full(kp: int, N: int, p: int, n: int, system: TwistedSystem,
                     stop_early: bool = True) -> KernelResult:
    if (system.p, system.n) != (p, n):
        raise ValueError("system is mod %d^%d, test is mod %d^%d" % (system.p, system.n, p, n))
    if dim_formula(kp, N) == 0:
        empty = HowellBasis(p, n, 0, ())
        return KernelResult(kp, N, p, n, empty, empty, [], 0)
    L = _lattice(kp, N, p)
    d = L.rank
    K = span_mod(p, n, [[int(i == j) for j in range(d)] for i in range(d)], d)
    used = []
    for q, t in system.items():
        if N % q == 0:
            continue
        T = L.reduce_prime(q, p, n).scalar_sub(t)
        K = intersect_mod(K, left_kernel_mod(T))
        used.append(q)
        W = scale_mod(K, p ** (n - 1))
        if stop_early and W.is_zero():
            break
    W = scale_mod(K, p ** (n - 1))
    return KernelResult(kp, N, p, n, K, W, used, d)


@dataclass
class HypothesisFlags:
    p: int
    ap: int
    p_prime_to_level: bool
    ordinary: bool
    ap_not_pm1: bool
    lc1: bool
    p_minus_1_divides_k: bool
    companion_count: int | None = None       # mod-p companions at weight k'(1), levels dividing N
    companion_unique: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def supported(self) -> bool:
        return self.p_prime_to_level and self.ordinary and self.ap_not_pm1 and self.lc1 \
            and self.p_minus_1_divides_k

    def to_dict(self):
        return {
            "p": self.p, "a_p": self.ap, "p_prime_to_level": self.p_prime_to_level,
            "ordinary": self.ordinary, "a_p_not_pm1": self.ap_not_pm1, "lc1": self.lc1,
            "p_minus_1_divides_k": self.p_minus_1_divides_k,
            "mod_p_companion_count": self.companion_count,
            "mod_p_companion_unique": self.companion_unique, "notes": list(self.notes),
        }


def _divisors(N):
    return [d for d in range(1, N + 1) if N % d == 0]


def mod_p_companions(f: Eigenform, p: int, bound: int | None = None):
    """Eigensystems of weight k'(1) at levels dividing N congruent mod p to the twist of f.

    Returns (count, details).  Rational newforms are checked coefficient by
    coefficient; a non-rational block counts when the mod-p kernel of its
    level is not accounted for by the rational newforms found there.
    """
    kp = target_weight(f.k, p, 1)
    B = bound or companion_bound(f.k, kp, f.N)
    system = twisted_system(f, p, 1, B)
    count, details = 0, []
    for M in _divisors(f.N):
        if dim_formula(kp, M) == 0:
            continue
        res = rational_eigenforms(kp, M, B)
        hits = [g for g in res.newforms if congruence_check(f, g, p, 1, B).passed]
        count += len(hits)
        details.extend({"level": M, "label": g.label, "kind": "rational"} for g in hits)
        # whatever the kernel sees beyond the new rational hits and old forms is unexplained
        kr = kernel_test_full(kp, M, p, 1, TwistedSystem(p, 1, tuple(
            (q, t) for q, t in system.items() if M % q)), stop_early=False)
        old_hits = sum(mult for g, mult in res.oldforms
                       if congruence_check(f, _as_level(g, f.N), p, 1, B).passed)
        extra = len(kr.kernel) - 2 * len(hits) - old_hits
        if extra > 0:
            count += 1
            details.append({"level": M, "kind": "unexplained kernel", "dimension": extra})
    return count, details


def _as_level(g: Eigenform, N: int) -> Eigenform:
    return Eigenform(g.label, g.k, N, g.coeffs, g.source)


def hypothesis_check(f: Eigenform, p: int, count_companions: bool = True) -> HypothesisFlags:
    if f.bound < p:
        raise InsufficientCoefficients("a_%d missing" % p)
    ap = f.a(p)
    flags = HypothesisFlags(
        p=p, ap=ap,
        p_prime_to_level=f.N % p != 0,
        ordinary=ap % p != 0,
        ap_not_pm1=ap % p not in (1, p - 1),
        lc1=(ap * ap - 1) % p != 0,
        p_minus_1_divides_k=f.k % (p - 1) == 0,
    )
    flags.notes.append("the image condition on the residual representation is not checked")
    if count_companions and flags.supported:
        count, details = mod_p_companions(f, p)
        flags.companion_count = count
        flags.companion_unique = count == 1
        flags.notes.extend("companion: %s" % d for d in details)
    return flags


# --------------------------------------------------------------------------
# CM

def _squarefree(n):
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def fundamental_discriminants(N: int) -> list:
    """Negative fundamental discriminants D with |D| dividing 4N."""
    return [-d for d in _divisors(4 * N) if is_fundamental(-d)]


def kronecker(D: int, q: int) -> int:
    """(D / q) for a prime q."""
    if q == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % q
    if r == 0:
        return 0
    return 1 if pow(r, (q - 1) // 2, q) == 1 else -1


def cm_detect(f: Eigenform, B: int | None = None, discriminants=None) -> dict:
    """For each D: does a_q vanish at every prime q <= B inert in Q(sqrt D)?"""
    B = f.bound if B is None else min(B, f.bound)
    Ds = fundamental_discriminants(f.N) if discriminants is None else list(discriminants)
    per = {}
    for D in Ds:
        inert = [q for q in primes_upto(B) if f.N % q and kronecker(D, q) == -1]
        ok = bool(inert) and all(f.a(q) == 0 for q in inert)
        per[D] = {"inert_primes": inert, "vanishes": ok}
    cands = [D for D, r in per.items() if r["vanishes"]]
    return {"bound": B, "discriminants": per, "candidates": cands,
            "verdict": ("CM by %s" % ", ".join(map(str, cands))) if cands else "no CM detected"}


# --------------------------------------------------------------------------
# reports

@dataclass
class CompanionReport:
    label: str
    k: int
    N: int
    p: int
    n: int
    target_weight: int
    bound: int
    verdict: str
    levels: list = field(default_factory=list)      # per divisor level kernel data
    certificate: dict | None = None
    hypotheses: dict | None = None
    caveats: list = field(default_factory=list)

    def to_dict(self):
        return {
            "form": self.label, "weight": self.k, "level": self.N, "p": self.p, "n": self.n,
            "target_weight": self.target_weight, "bound": self.bound, "verdict": self.verdict,
            "levels": self.levels, "certificate": self.certificate,
            "hypotheses": self.hypotheses, "caveats": self.caveats,
        }


def _kernel_summary(r: KernelResult) -> dict:
    return {"level": r.level, "lattice_rank": r.lattice_rank, "primes": r.primes,
            "kernel_rows": [list(map(int, row)) for row in r.kernel.rows] if len(r.kernel) <= 8
            else "%d rows" % len(r.kernel),
            "kernel_generators": len(r.kernel), "witness_zero": r.is_zero}


def companion_search(f: Eigenform, p: int, n: int, bound: int | None = None,
                     flags: HypothesisFlags | None = None, eigenform_weight_cap: int = 12) -> CompanionReport:
    """Decide whether f has a weight-k'(n) companion mod p^n at some level dividing N."""
    kp = target_weight(f.k, p, n)
    B = bound or companion_bound(f.k, kp, f.N)
    flags = flags or hypothesis_check(f, p, count_companions=False)
    rep = CompanionReport(f.label, f.k, f.N, p, n, kp, B, INCONCLUSIVE, hypotheses=flags.to_dict(),
                          caveats=["the image condition on the residual representation is assumed"])
    if not (flags.p_prime_to_level and flags.ordinary):
        rep.verdict = UNSUPPORTED
        rep.caveats.append("f must be ordinary at p and p must not divide the level")
        return rep
    usable = min(B, f.bound)
    if usable < B:
        rep.caveats.append("only a_1..a_%d available: kernel primes are limited to q <= %d"
                           % (f.bound, usable))
    system = twisted_system(f, p, n, usable)
    any_candidate = False
    for M in _divisors(f.N):
        res = kernel_test_full(kp, M, p, n, system)
        rep.levels.append(_kernel_summary(res))
        if not res.is_zero:
            any_candidate = True
    if not any_candidate:
        rep.verdict = RULED_OUT
        return rep
    # a candidate exists: look for a rational eigenform that realises it
    if usable < B:
        rep.caveats.append("a congruence certificate needs a_1..a_%d" % B)
    elif kp <= eigenform_weight_cap:
        for M in _divisors(f.N):
            for g in rational_eigenforms(kp, M, B).newforms:
                c = congruence_check(f, g, p, n, B)
                if c.passed:
                    rep.verdict = FOUND
                    rep.certificate = {"companion": g.label, "weight": g.k, "level": g.N,
                                       "coefficients": list(g.coeffs),
                                       "checked": [list(x) for x in c.checked]}
                    return rep
    rep.caveats.append("nonzero kernel without a rational eigenform realising it")
    return rep


@dataclass
class GreenbergReport:
    label: str
    p: int
    n_max: int
    hypotheses: dict
    reports: list
    summary: str
    splits_up_to: int
    cm: dict
    caveats: list

    def to_dict(self):
        return {"form": self.label, "p": self.p, "n_max": self.n_max, "hypotheses": self.hypotheses,
                "reports": [r.to_dict() for r in self.reports], "summary": self.summary,
                "largest_n_with_companion": self.splits_up_to, "cm": self.cm, "caveats": self.caveats}


def greenberg_report(f: Eigenform, p: int, n_max: int, bound: int | None = None) -> GreenbergReport:
    """Companion search for n = 1..n_max and what it says about splitting at p."""
    flags = hypothesis_check(f, p)
    cm = cm_detect(f)
    caveats = ["splitting is inferred from the companion/splitting equivalence, which needs p-1 | k, "
               "ordinarity, a_p != +-1 mod p and a large residual image (not checked)"]
    reports = []
    if not flags.supported:
        for n in range(1, n_max + 1):
            kp = target_weight(f.k, p, n)
            reports.append(CompanionReport(f.label, f.k, f.N, p, n, kp,
                                           bound or companion_bound(f.k, kp, f.N), UNSUPPORTED,
                                           hypotheses=flags.to_dict()))
        failed = [k for k, v in flags.to_dict().items()
                  if isinstance(v, bool) and not v and k not in ("mod_p_companion_unique",)]
        return GreenbergReport(f.label, p, n_max, flags.to_dict(), reports,
                               "unsupported: hypotheses fail (%s); no splitting claim" % ", ".join(failed),
                               0, cm, caveats)
    if flags.companion_unique is False:
        caveats.append("the mod-p companion is not unique")
    last_found, ruled_at = 0, None
    for n in range(1, n_max + 1):
        if ruled_at is not None:
            kp = target_weight(f.k, p, n)
            r = CompanionReport(f.label, f.k, f.N, p, n, kp, bound or companion_bound(f.k, kp, f.N),
                                RULED_OUT, hypotheses=flags.to_dict(),
                                caveats=["implied: no splitting mod %d^%d forces none mod %d^%d"
                                         % (p, ruled_at, p, n)])
            reports.append(r)
            continue
        r = companion_search(f, p, n, bound, flags)
        reports.append(r)
        if r.verdict == FOUND:
            last_found = n
        elif r.verdict == RULED_OUT:
            ruled_at = n
        else:
            break
    if ruled_at is not None:
        summary = ("companion at n=%d, none at n=%d: f does not split mod %d^%d"
                   % (last_found, ruled_at, p, ruled_at)) if last_found else \
            "no companion at n=%d: f does not split mod %d^%d" % (ruled_at, p, ruled_at)
    elif last_found == n_max:
        summary = "companions found for all n <= %d: f splits mod %d^%d" % (n_max, p, n_max)
        if not cm["candidates"]:
            summary += "; no CM detected, so this would contradict the local non-semisimplicity conjecture"
    else:
        summary = "inconclusive at n=%d (companion found up to n=%d)" % (len(reports), last_found)
    return GreenbergReport(f.label, p, n_max, flags.to_dict(), reports, summary, last_found, cm, caveats)
