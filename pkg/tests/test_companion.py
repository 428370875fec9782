import pytest
from hypothesis import given, settings, strategies as st

from modcomp.companion import (INCONCLUSIVE, RULED_OUT, UNSUPPORTED, FOUND, InsufficientCoefficients,
                               cm_detect, companion_bound, companion_search, congruence_check,
                               fundamental_discriminants, greenberg_report, hypothesis_check,
                               is_fundamental, kernel_test, kernel_test_full, kronecker,
                               mod_p_companions, sturm_bound, target_weight, twisted_system)
from modcomp.formats import bundled
from modcomp.linalg import contains_mod
from modcomp.modsym import Eigenform, rational_eigenforms

F21, G21 = bundled("f_21_4.json"), bundled("g_21_2.json")
F57, G57 = bundled("f_57_4.json"), bundled("g_57_2.json")
PRIMES = [3, 5, 7, 11, 13]


def test_target_weight_examples():
    assert target_weight(4, 5, 1) == 2
    assert target_weight(4, 5, 2) == 18
    assert target_weight(2, 3, 1) == 2
    with pytest.raises(ValueError):
        target_weight(1, 5, 1)


@given(st.integers(2, 60), st.sampled_from(PRIMES), st.integers(1, 3))
def test_target_weight_minimal(k, p, n):
    M = (p - 1) * p ** (n - 1)
    kp = target_weight(k, p, n)
    assert kp >= 2 and (k + kp - 2) % M == 0
    assert all((k + j - 2) % M for j in range(2, kp))


def test_sturm_bound():
    assert sturm_bound(18, 21) == 48
    assert sturm_bound(2, 11) == 2
    assert sturm_bound(4, 21) == 11
    assert companion_bound(4, 18, 21) == 48


def test_congruence_examples():
    r = congruence_check(F21, G21, 5, 1, 11)
    assert r.passed and (2, -3, -1) in r.checked
    assert congruence_check(F57, G57, 5, 1, sturm_bound(4, 57)).passed
    assert (-1 - 8 * (-2)) % 5 == 0
    c = list(G21.coeffs)
    c[3] += 1       # a_4
    bad = Eigenform("bad", 2, 21, c)
    assert congruence_check(F21, bad, 5, 1, 11).first_failure == 4
    with pytest.raises(InsufficientCoefficients):
        congruence_check(F21, G21, 5, 1, 60)


coeffs = st.lists(st.integers(-500, 500), min_size=20, max_size=20)


@settings(max_examples=200)
@given(coeffs, coeffs, st.sampled_from([3, 5, 7]), st.integers(2, 6))
def test_congruence_mod_p2_implies_mod_p(a, b, p, k):
    f, g = Eigenform("f", k, 1, [1] + a[1:]), Eigenform("g", 2, 1, [1] + b[1:])
    # force many congruences mod p^2 by construction half of the time
    g2 = Eigenform("g", 2, 1, [1] + [(x * pow(m + 1, k - 1, p * p)) for m, x in enumerate(b[1:], 1)])
    for h in (g, g2):
        if congruence_check(f, h, p, 2, 20).passed:
            assert congruence_check(f, h, p, 1, 20).passed


def test_twisted_system():
    s = twisted_system(F21, 5, 1, 11)
    assert [q for q, _ in s.items()] == [2, 11]
    assert s.as_dict()[2] == (-3 * pow(8, -1, 5)) % 5 == G21.a(2) % 5
    u = twisted_system(F21, 5, 2, 11, twist=False)
    assert u.as_dict()[2] == -3 % 25


def test_kernel_level21_weight2_nonzero():
    res = kernel_test_full(2, 21, 5, 1, twisted_system(F21, 5, 1, 11))
    assert not res.is_zero and res.lattice_rank == 2


def test_kernel_level21_weight18_zero():
    W = kernel_test(18, 21, 5, 2, twisted_system(F21, 5, 2, 48))
    assert W.is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("f", [F21, F57], ids=["21", "57"])
def test_self_system_kernel_nonzero(f, n):
    s = twisted_system(f, 5, n, 30, twist=False)
    res = kernel_test_full(4, f.N, 5, n, s)
    assert not res.is_zero


def test_kernel_monotone_under_reduction():
    s2 = twisted_system(F21, 5, 2, 30, twist=False)
    s1 = twisted_system(F21, 5, 1, 30, twist=False)
    K2 = kernel_test_full(4, 21, 5, 2, s2, stop_early=False).kernel
    K1 = kernel_test_full(4, 21, 5, 1, s1, stop_early=False).kernel
    assert not K2.is_zero()
    for row in K2.rows:
        assert contains_mod(K1, [x % 5 for x in row])


def test_kernel_system_mismatch():
    with pytest.raises(ValueError):
        kernel_test(2, 21, 5, 2, twisted_system(F21, 5, 1, 11))


def test_hypotheses():
    h = hypothesis_check(F21, 5)
    assert (h.ap % 5, h.ordinary, h.ap_not_pm1, h.lc1) == (2, True, True, True)
    assert h.companion_count == 1 and h.companion_unique
    h = hypothesis_check(F57, 5)
    assert h.ap % 5 == 3 and h.supported and h.companion_unique
    synth = Eigenform("s", 4, 1, [1, 1, 1, 1, 1, 1])
    assert not hypothesis_check(synth, 5, count_companions=False).ap_not_pm1


def test_mod_p_companions_level21():
    count, details = mod_p_companions(F21, 5)
    assert count == 1 and details[0]["label"] == "21.2.a"


def test_found_matches_direct_check():
    # the weight-2 cusp space at level 21 has dimension 1
    r = companion_search(F21, 5, 1)
    assert r.verdict == FOUND and r.certificate["companion"] == "21.2.a"
    (g,) = rational_eigenforms(2, 21, r.bound).newforms
    assert congruence_check(F21, g, 5, 1, r.bound).passed


def test_search_unsupported():
    r = companion_search(F21, 7, 1)
    assert r.verdict == UNSUPPORTED
    c = list(F21.coeffs)
    c[4] = 25                      # a_5 divisible by 5
    r = companion_search(Eigenform("s", 4, 21, c), 5, 1)
    assert r.verdict == UNSUPPORTED


def test_search_ruled_out_level21():
    r = companion_search(F21, 5, 2)
    assert r.verdict == RULED_OUT and r.target_weight == 18 and r.bound == 48
    assert all(lv["witness_zero"] for lv in r.levels)
    assert [lv["level"] for lv in r.levels] == [1, 3, 7, 21]


def test_inconclusive_without_rational_realisation():
    # with eigenform reconstruction switched off a nonzero kernel cannot be certified
    r = companion_search(F21, 5, 1, eigenform_weight_cap=0)
    assert r.verdict == INCONCLUSIVE


def test_greenberg_level21():
    g = greenberg_report(F21, 5, 2)
    assert [r.verdict for r in g.reports] == [FOUND, RULED_OUT]
    assert g.summary.startswith("companion at n=1, none at n=2")
    assert g.cm["verdict"] == "no CM detected"
    g3 = greenberg_report(F21, 5, 3)
    assert [r.verdict for r in g3.reports] == [FOUND, RULED_OUT, RULED_OUT]


def test_greenberg_unsupported():
    c = list(F21.coeffs)
    c[4] = 25
    g = greenberg_report(Eigenform("s", 4, 21, c), 5, 2)
    assert {r.verdict for r in g.reports} == {UNSUPPORTED}
    assert g.summary.startswith("unsupported")


def test_cm():
    assert cm_detect(F21)["verdict"] == "no CM detected"
    assert cm_detect(F57)["verdict"] == "no CM detected"
    f27 = rational_eigenforms(2, 27, sturm_bound(2, 27) + 20).newforms[0]
    out = cm_detect(f27)
    assert -3 in out["candidates"]


def test_discriminants():
    assert is_fundamental(-3) and is_fundamental(-4) and is_fundamental(-8)
    assert not is_fundamental(-12) and not is_fundamental(-9)
    assert fundamental_discriminants(21) == [-3, -4, -7, -84]
    assert [kronecker(-3, q) for q in (2, 3, 5, 7)] == [-1, 0, -1, 1]
