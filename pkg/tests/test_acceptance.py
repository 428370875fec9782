"""Acceptance criteria, one test per criterion; a summary line per criterion is
printed at the end of the run (see conftest.py)."""

import io
import itertools
import json
import random
import time

import numpy as np

from modcomp import gl2
from modcomp.cli import main
from modcomp.companion import (companion_bound, congruence_check, kernel_test_full, target_weight,
                               twisted_system)
from modcomp.formats import bundled
from modcomp.linalg import intersect_mod, span_mod
from modcomp.modsym import build_space, dim_formula
from modcomp.tame import TameParams, enumerate_lifts, match_versal, tangent_dimension
from modcomp.witt import WittRing

FIXTURES = {(4, 21): "f_21_4.json", (2, 21): "g_21_2.json", (4, 57): "f_57_4.json",
            (2, 57): "g_57_2.json"}


def _cli(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, json.loads(out.getvalue())


def test_criterion_1_printed_expansions_reproduced(record):
    for (k, N), name in FIXTURES.items():
        printed = list(bundled(name).coeffs)
        t0 = time.perf_counter()
        code, rep = _cli(["msym", "eigenforms", "--k", str(k), "--N", str(N), "--bound", "50"])
        dt = time.perf_counter() - t0
        assert code == 0
        hits = [f["label"] for f in rep["result"]["newforms"] if f["coefficients"] == printed]
        assert len(hits) == 1, (k, N)
        assert dt < 60
        record("%d.%d -> %s in %.1fs" % (N, k, hits[0], dt))


def test_criterion_2_mod5_congruences(record):
    for N in (21, 57):
        f, g = bundled(FIXTURES[(4, N)]), bundled(FIXTURES[(2, N)])
        B = companion_bound(4, 2, N)
        r = congruence_check(f, g, 5, 1, B)
        assert r.passed
        assert congruence_check(f, g, 5, 1, 50).passed     # all printed coefficients too
        record("level %d: %d values checked up to B=%d, and up to 50" % (N, len(r.checked), B))


def test_criterion_3_no_weight18_companion_mod25(record):
    t0 = time.perf_counter()
    for N in (21, 57):
        f = bundled(FIXTURES[(4, N)])
        kp = target_weight(4, 5, 2)
        assert kp == 18
        B = companion_bound(f.k, kp, N)
        usable = min(B, f.bound)
        system = twisted_system(f, 5, 2, usable)
        for M in [d for d in range(1, N + 1) if N % d == 0]:
            res = kernel_test_full(kp, M, 5, 2, system)
            assert res.is_zero, (N, M)
            record("M=%d: rank %d, zero after T_q for q in %s" % (M, res.lattice_rank, res.primes))
        if usable < B:
            record("level %d: bound %d but primes limited to q <= %d" % (N, B, usable))
    dt = time.perf_counter() - t0
    assert dt < 600
    record("%.1fs" % dt)


def test_criterion_4_h1_gl2_f5(record):
    t0 = time.perf_counter()
    G = gl2.gl2_group(WittRing(5, 1))
    assert G.order == 480
    dims = {i: gl2.h1_dimension(G, i, pairs="all") for i in (0, 1, 3)}
    dt = time.perf_counter() - t0
    assert dims == {0: 0, 1: 0, 3: 0}
    assert dt < 300
    record("dims %s, %d unknowns per twist before tree elimination, %.1fs"
           % (dims, 3 * G.order, dt))


def test_criterion_5_tame_presentations(record):
    for p, q, alpha, ring, case in [(5, 11, 2, "zp2", "i"), (5, 11, 2, "dual", "i"),
                                    (5, 2, 1, "zp2", "ii"), (5, 2, 1, "dual", "ii")]:
        params = TameParams(p, q, alpha, ring)
        rep = match_versal(params, enumerate_lifts(params))
        assert rep.case == case and rep.match, (q, alpha, ring)
        record("case %s %s: %d = %d" % (case, rep.ring, rep.lifts, rep.points))
    params = TameParams(5, 19, 1, "dual")
    rep = match_versal(params, enumerate_lifts(params))
    dim = tangent_dimension(params)
    assert rep.match and dim == 3
    record("case iii tangent dim %d" % dim)


def test_criterion_6_closure_p3(record):
    expect = {2: 648, 3: 17496}
    for n in (2, 3):
        R = WittRing(3, n)
        gens = [gl2.mat(R, [[1, 1], [0, 1]]), gl2.mat(R, [[4, 0], [1, 7]])]
        G = gl2.subgroup_closure(gens, R)
        assert G.order == expect[n] == 24 * 3 ** (3 * (n - 1))
        assert gl2.contains_sl2(G)
        record("mod %d: %d" % (3 ** n, G.order))


def _brute(rows, N=9):
    out = {(0, 0)}
    for r in rows:
        out = {((a + c * r[0]) % N, (b + c * r[1]) % N) for a, b in out for c in range(N)}
    return out


def test_criterion_7_property_suites(record):
    # h_n identities
    for n in range(1, 201):
        h, h1, h0 = gl2.h_poly(n), gl2.h_poly(n + 1), gl2.h_poly(n - 1) if n > 1 else None
        assert h(2) == n
        for t in range(-4, 5):
            prev = h0(t) if h0 else 0
            assert h1(t) == t * h(t) - prev and h(t) ** 2 - h1(t) * prev == 1
    record("h_n for n <= 200")
    # power_via_h against repeated multiplication
    rng = random.Random(20260101)
    for _ in range(1000):
        N = rng.choice([9, 25, 27, 49, 125])
        p = next(x for x in (3, 5, 7) if N % x == 0)
        a = rng.randrange(N // p) * p + rng.randrange(1, p)
        b, c = rng.randrange(N), rng.randrange(N)
        d = (1 + b * c) * pow(a, -1, N) % N
        e = rng.randrange(0, 80)
        M = np.array([[a, b], [c, d]], dtype=object)
        P = np.identity(2, dtype=object)
        for _ in range(e):
            P = P.dot(M) % N
        assert gl2.power_via_h([[a, b], [c, d]], e, N) == P.tolist()
    record("1000 random powers")
    # dimension grid and Hecke commutativity on every space built
    grid = [(k, N) for k in (2, 4, 6, 8) for N in range(1, 41)] + [(12, 1), (18, 21), (18, 57)]
    for k, N in grid:
        S = build_space(k, N)
        assert S.dim == 2 * dim_formula(k, N), (k, N)
        if S.dim:
            T = [S.prime_hecke(q) for q in ((2, 3, 5) if k <= 8 else (2, 3))]
            for A, B in itertools.combinations(T, 2):
                assert A * B == B * A, (k, N)
    record("%d spaces" % len(grid))
    # Howell spans and intersections over (Z/9)^2
    vecs = list(itertools.product(range(9), repeat=2))
    for v in vecs:
        assert _brute([v]) == _brute(span_mod(3, 2, [list(v)], 2).rows)
    for _ in range(400):
        a = [rng.choice(vecs) for _ in range(rng.randrange(3))]
        b = [rng.choice(vecs) for _ in range(rng.randrange(3))]
        A, B = span_mod(3, 2, [list(x) for x in a], 2), span_mod(3, 2, [list(x) for x in b], 2)
        assert _brute(A.rows) == _brute(a)
        assert _brute(intersect_mod(A, B).rows) == _brute(a) & _brute(b)
    record("81 cyclic spans, 400 random intersections")
