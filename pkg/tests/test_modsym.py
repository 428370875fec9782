import itertools
from math import gcd

import pytest
from flint import fmpq_mat

from modcomp.linalg import charpoly
from modcomp.modsym import (BudgetExceeded, Eigenform, ModularSymbols, P1List, build_space,
                            coefficients_from_primes, dim_formula, gamma0_index,
                            heilbronn_merel, integral_reduce, p1_enumerate, rational_eigenforms,
                            star_decompose)


def eta_product(factors, B):
    """q^shift prod (1 - q^(m n))^e for factors {m: e}, coefficients a_1..a_B (shift 1)."""
    c = [0] * (B + 1)
    c[0] = 1
    for m, e in factors.items():
        for n in range(1, B // m + 1):
            for _ in range(e):
                for i in range(B, m * n - 1, -1):
                    c[i] -= c[i - m * n]
    return c[:B]          # a_{i+1} = c[i]


GRID = [(k, N) for k in (2, 4, 6) for N in range(1, 31)] + \
       [(k, N) for k in (8, 12) for N in (1, 2, 3, 5, 7, 11, 13)] + [(2, 57), (4, 57), (2, 37), (2, 43)]


@pytest.mark.parametrize("k,N", GRID)
def test_cuspidal_dimension(k, N):
    S = build_space(k, N)
    assert S.dim == 2 * dim_formula(k, N)


def test_dim_formula_values():
    # genus of X_0(N) and classical weight-k level-1 dimensions
    assert [dim_formula(2, N) for N in (11, 21, 27, 37, 57, 64, 100)] == [1, 1, 1, 2, 5, 3, 7]
    assert [dim_formula(k, 1) for k in (12, 24, 36)] == [1, 2, 3]
    assert gamma0_index(21) == 32 and len(p1_enumerate(21)) == 32


def test_p1():
    P = P1List(12)
    assert len(P.points) == gamma0_index(12)
    for c, d in itertools.product(range(12), repeat=2):
        j = P.index(c, d)
        assert (j is None) == (gcd(gcd(c, d), 12) != 1)
        if j is not None:
            u = 5     # unit scaling gives the same point
            assert P.index(u * c, u * d) == j


@pytest.mark.parametrize("k,N", [(2, 11), (4, 6), (6, 5), (2, 30), (8, 3)])
def test_manin_relations_hold(k, N):
    M = ModularSymbols(k, N)
    S, T = (0, -1, 1, 0), (0, -1, 1, -1)
    T2 = (-1, 1, -1, 0)
    zero = fmpq_mat(1, M.dim)
    for s in range(M.nsym):
        x = {s: 1}
        two = dict(x)
        for t, c in M.act(s, S).items():
            two[t] = two.get(t, 0) + c
        assert M.image(two) == zero
        three = dict(x)
        for h in (T, T2):
            for t, c in M.act(s, h).items():
                three[t] = three.get(t, 0) + c
        assert M.image(three) == zero


SPACES = [(2, 11), (2, 21), (4, 21), (2, 57), (6, 10), (12, 1), (4, 27), (2, 37), (8, 7)]


@pytest.mark.parametrize("k,N", SPACES)
def test_hecke_commute(k, N):
    S = build_space(k, N)
    ops = {q: S.prime_hecke(q) for q in (2, 3, 5, 7, 11)}
    for a, b in itertools.combinations(ops, 2):
        assert ops[a] * ops[b] == ops[b] * ops[a]
    st = S.star()
    for T in ops.values():
        assert st * T == T * st
    assert st * st == fmpq_mat([[int(i == j) for j in range(S.dim)] for i in range(S.dim)])


@pytest.mark.parametrize("k,N", [(2, 11), (4, 21), (2, 15), (6, 4)])
def test_composite_heilbronn_matches_recursion(k, N):
    M = ModularSymbols(k, N)
    for m in (4, 6, 9, 10):
        assert M.heilbronn_matrix(m) == M.hecke_matrix(m)


def test_heilbronn_counts():
    assert len(heilbronn_merel(2)) == 4
    assert all(a * d - b * c == 5 for a, b, c, d in heilbronn_merel(5))


@pytest.mark.parametrize("k,N,factors", [
    (2, 11, {1: 2, 11: 2}),
    (12, 1, {1: 24}),
    (2, 14, {1: 1, 2: 1, 7: 1, 14: 1}),
    (2, 15, {1: 1, 3: 1, 5: 1, 15: 1}),
    (4, 8, {2: 4, 4: 4}),
])
def test_eigenform_matches_eta_product(k, N, factors):
    B = 40
    forms = rational_eigenforms(k, N, B).newforms
    expect = eta_product(factors, B + 1)
    assert len(forms) == 1
    assert list(forms[0].coeffs) == expect[:B]


def test_level_27_cm_form():
    f = rational_eigenforms(2, 27, 30).newforms[0]
    assert list(f.coeffs) == eta_product({3: 2, 9: 2}, 31)[:30]
    assert all(f.a(q) == 0 for q in (2, 5, 11, 17, 23, 29))


def test_delta_charpoly():
    S = build_space(12, 1)
    x = charpoly(S.prime_hecke(2))
    assert x == charpoly(fmpq_mat([[-24, 0], [0, -24]]))
    assert charpoly(S.prime_hecke(3)) == charpoly(fmpq_mat([[252, 0], [0, 252]]))


def test_level_21_and_57_newforms():
    f = rational_eigenforms(2, 21, 10).newforms
    assert [list(g.coeffs) for g in f] == [[1, -1, 1, -1, -2, -1, -1, 3, 1, 2]]
    s4 = rational_eigenforms(4, 21, 10)
    assert [g.label for g in s4.newforms] == ["21.4.a", "21.4.b"]
    assert list(s4.newforms[0].coeffs) == [1, -3, -3, 1, -18, 9, 7, 21, 9, 54]
    assert [(g.label, m) for g, m in s4.oldforms] == [("7.4.a", 4)]
    assert [d for d, _ in s4.nonrational] == [4]
    s57 = rational_eigenforms(2, 57, 10)
    assert len(s57.newforms) == 3
    assert any(list(g.coeffs[:5]) == [1, -2, -1, 2, -3] for g in s57.newforms)


def test_eigenvectors_are_eigen():
    for f in rational_eigenforms(2, 37, 20).newforms:
        assert f.first_violation() is None


def test_star_decomposition():
    S = build_space(4, 21)
    plus, minus = star_decompose(S)
    assert plus.nrows() == minus.nrows() == S.dim // 2


def test_integral_reduction_consistent():
    S = build_space(4, 21)
    Lg, Tg = integral_reduce(S, 5, 2, ms=(2, 3), local=False)
    Ll, Tl = integral_reduce(S, 5, 2, ms=(2, 3), local=True)
    assert Lg.rank == Ll.rank == S.dim
    for T in (Tg, Tl):
        assert T[2] @ T[3] == T[3] @ T[2]
    # the two lattices agree after localising at 5: same characteristic polynomial mod 25
    for m in (2, 3):
        cg = [int(c) % 25 for c in charpoly(fmpq_mat(Tg[m].entries.tolist())).coeffs()]
        cl = [int(c) % 25 for c in charpoly(fmpq_mat(Tl[m].entries.tolist())).coeffs()]
        assert cg == cl
    A = fmpq_mat(Lg.hecke_z(2))
    assert charpoly(A) == charpoly(S.prime_hecke(2))


def test_coefficients_from_primes():
    f = rational_eigenforms(2, 11, 30).newforms[0]
    ap = f.prime_coeffs()
    assert coefficients_from_primes(ap, 2, 11, 30) == list(f.coeffs)


def test_first_violation():
    f = Eigenform("t", 2, 11, eta_product({1: 2, 11: 2}, 20))
    assert f.first_violation() is None
    c = list(f.coeffs)
    c[5] += 1
    assert Eigenform("t", 2, 11, c).first_violation() == 6
    c = list(f.coeffs)
    c[0] = 0
    assert Eigenform("t", 2, 11, c).first_violation() == 1


def test_errors(monkeypatch):
    with pytest.raises(ValueError):
        ModularSymbols(3, 5)
    import modcomp.modsym as ms
    monkeypatch.setattr(ms, "MAX_SYMBOLS", 10)
    with pytest.raises(BudgetExceeded):
        ModularSymbols(4, 13)
