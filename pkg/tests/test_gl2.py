import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modcomp import gl2
from modcomp.gl2 import (AdModule, ClosureCapExceeded, conj_identity, contains_sl2, gl2_group,
                         h1_dimension, h_eval, h_poly, mat, power_via_h, restriction_rank,
                         sl2_group, subgroup_closure, sylow_subgroup, transvection_order,
                         transvection_preimage_orders)
from modcomp.witt import WittRing


def pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def psub(a, b):
    n = max(len(a), len(b))
    a, b = list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b))
    out = [x - y for x, y in zip(a, b)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


H = {n: list(h_poly(n).coeffs) for n in range(1, 202)}
H[0] = [0]


def test_small_h():
    assert str(h_poly(1)) == "1" and str(h_poly(2)) == "T"
    assert str(h_poly(3)) == "T^2 - 1"
    assert str(h_poly(4)) == "T^3 - 2T"
    with pytest.raises(ValueError):
        h_poly(0)


@pytest.mark.parametrize("n", range(1, 201))
def test_h_identities(n):
    # recursion, value at 2 and -2, and the determinant identity h_n^2 - h_{n+1} h_{n-1} = 1
    assert H[n + 1] == psub(pmul([0, 1], H[n]), H[n - 1])
    assert h_poly(n)(2) == n
    assert h_poly(n)(-2) == (-1) ** (n + 1) * n
    assert psub(pmul(H[n], H[n]), pmul(H[n + 1], H[n - 1])) == [1]
    assert h_eval(n, 7, 25) == h_poly(n)(7) % 25


def naive_power(M, n, N):
    R = [[1, 0], [0, 1]]
    for _ in range(n):
        R = [[(R[0][0] * M[0][0] + R[0][1] * M[1][0]) % N, (R[0][0] * M[0][1] + R[0][1] * M[1][1]) % N],
             [(R[1][0] * M[0][0] + R[1][1] * M[1][0]) % N, (R[1][0] * M[0][1] + R[1][1] * M[1][1]) % N]]
    return R


@st.composite
def sl2_mod(draw):
    N = draw(st.sampled_from([9, 25, 27, 49, 125]))
    p = _p(N)
    a = draw(st.integers(0, N // p - 1)) * p + draw(st.integers(1, p - 1))
    b, c = draw(st.integers(0, N - 1)), draw(st.integers(0, N - 1))
    d = (1 + b * c) * pow(a, -1, N) % N
    return N, [[a, b], [c, d]], draw(st.integers(0, 60))


def _p(N):
    return next(p for p in (3, 5, 7) if N % p == 0)


@settings(max_examples=1000, deadline=None)
@given(sl2_mod())
def test_power_via_h_matches_repeated_multiplication(t):
    N, M, n = t
    assert power_via_h(M, n, N) == naive_power(M, n, N)


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.integers(0, 8)] * 6), st.integers(1, 30))
def test_power_via_h_over_witt_ring(x, n):
    R = WittRing(3, 2, 2)
    a, b, c = R(x[0:2]), R(x[2:4]), R(x[4:6])
    if not a.is_unit():
        a = a + 1 if (a + 1).is_unit() else R.one()
    d = (1 + b * c) / a
    M = [[a, b], [c, d]]
    P = power_via_h(M, n)
    Q = [[R.one(), R.zero()], [R.zero(), R.one()]]
    for _ in range(n):
        Q = [[Q[0][0] * a + Q[0][1] * c, Q[0][0] * b + Q[0][1] * d],
             [Q[1][0] * a + Q[1][1] * c, Q[1][0] * b + Q[1][1] * d]]
    assert P == Q


def test_power_via_h_examples():
    assert power_via_h([[1, 1], [0, 1]], 7, 9) == [[1, 7], [0, 1]]
    assert power_via_h([[1, 0], [0, 1]], 13) == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        power_via_h([[2, 0], [0, 1]], 3, 9)


# --- closures ---------------------------------------------------------------

def sl2_order(p, n, f=1):
    q = p ** f
    return q * (q * q - 1) * q ** (3 * (n - 1))


@pytest.mark.parametrize("p,n,f", [(3, 1, 1), (3, 2, 1), (5, 1, 1), (2, 2, 1), (3, 1, 2), (2, 1, 2), (7, 1, 1)])
def test_sl2_order_formula(p, n, f):
    assert sl2_group(WittRing(p, n, f)).order == sl2_order(p, n, f)


def test_gl2_orders():
    assert gl2_group(WittRing(5, 1)).order == 480
    assert gl2_group(WittRing(3, 2)).order == 648 * 6


def test_closure_examples():
    R3 = WittRing(3, 1)
    gens = [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]
    assert subgroup_closure([mat(R3, g) for g in gens], R3).order == 24
    R9 = WittRing(3, 2)
    assert subgroup_closure([mat(R9, g) for g in gens], R9).order == 648
    assert subgroup_closure([mat(R9, [[1, 0], [0, 1]])], R9).order == 1
    with pytest.raises(ClosureCapExceeded):
        subgroup_closure([mat(R9, g) for g in gens], R9, cap=100)
    with pytest.raises(ValueError):
        subgroup_closure([mat(R9, [[3, 0], [0, 1]])], R9)


def test_contains_sl2():
    R = WittRing(5, 1)
    borel = subgroup_closure([mat(R, [[1, 1], [0, 1]]), mat(R, [[2, 0], [0, 3]])], R)
    assert borel.order == 20 and not contains_sl2(borel)
    assert contains_sl2(gl2_group(R))


def test_transvection_orders():
    assert transvection_order(5, 2) == 25
    assert transvection_order(7, 2) == 49
    counts = transvection_preimage_orders(3, 2)
    assert counts == {9: 18, 3: 9}
    with pytest.raises(ValueError):
        transvection_order(3, 2)
    assert transvection_order(3, 2, A=[[0, 0], [0, 0]]) == 9


def test_conj_identity():
    for x, a, b, c in itertools.product(range(0, 25, 4), range(0, 25, 6), range(3), range(0, 25, 7)):
        assert conj_identity(x, a, b, c, 25)


# --- cohomology ---------------------------------------------------------------

def _apply(m, v, p):
    return m @ v % p


def brute_z1_dim(G, twist):
    """Dimension of Z^1 by trying every assignment on the generators (tiny groups)."""
    M = AdModule(G.ring, twist)
    p, d = M.p, M.dim_fp
    rho = [M.action_matrix(g) for g in G.elements]
    mul = gl2._fast_ops(G.ring)
    table = [[G.index[mul(g, h)] for h in G.elements] for g in G.elements]
    gens = [G.index[s] for s in G.generators]
    count = 0
    for vals in itertools.product(range(p), repeat=d * len(gens)):
        xi = {0: np.zeros(d, np.int64)}
        for t, s in enumerate(gens):
            xi[s] = np.array(vals[t * d:(t + 1) * d])
        frontier = list(xi)
        ok = True
        while frontier and ok:
            nxt = []
            for g in frontier:
                for t, s in enumerate(gens):
                    gs = table[g][s]
                    v = (xi[g] + _apply(rho[g], xi[s], p)) % p
                    if gs in xi:
                        if np.any(xi[gs] != v):
                            ok = False
                            break
                    else:
                        xi[gs] = v
                        nxt.append(gs)
                if not ok:
                    break
            frontier = nxt
        if ok and xi.get(0) is not None and not np.any(xi[0]):
            ok = all(np.all(xi[table[g][h]] == (xi[g] + _apply(rho[g], xi[h], p)) % p)
                     for g in range(G.order) for h in range(G.order))
        count += ok
    return round(np.log(count) / np.log(p))


def test_h1_against_brute_force():
    G = sl2_group(WittRing(3, 1))
    M = AdModule(G.ring, 0)
    inv = sum(1 for v in itertools.product(range(3), repeat=3)
              if all(np.all(M.action_matrix(g) @ np.array(v) % 3 == np.array(v)) for g in G.elements))
    b1 = 3 - round(np.log(inv) / np.log(3))
    assert h1_dimension(G, 0) == brute_z1_dim(G, 0) - b1


def test_h1_values():
    assert h1_dimension(sl2_group(WittRing(5, 1)), 0) == 1
    assert h1_dimension(sl2_group(WittRing(3, 1)), 0) == 0
    assert [h1_dimension(gl2_group(WittRing(3, 1)), i) for i in (0, 1)] == [0, 0]
    assert h1_dimension(sl2_group(WittRing(3, 1, 2)), 0) == 0


@pytest.mark.parametrize("i", range(4))
def test_pairs_modes_agree(i):
    G = gl2_group(WittRing(3, 1))
    assert h1_dimension(G, i, pairs="all") == h1_dimension(G, i, pairs="generators")


def test_ad_action_is_a_homomorphism():
    G = gl2_group(WittRing(5, 1))
    mul = gl2._fast_ops(G.ring)
    for i in (0, 1, 2):
        M = AdModule(G.ring, i)
        for g, h in zip(G.elements[::37], G.elements[5::41]):
            lhs = M.action_matrix(mul(g, h))
            rhs = M.action_matrix(g) @ M.action_matrix(h) % 5
            assert np.all(lhs == rhs)


def test_sylow_and_restriction():
    G = gl2_group(WittRing(5, 1))
    S = sylow_subgroup(G)
    assert len(S) == 5
    assert restriction_rank(G, 2, S) == 1
