"""Companions of the weight-4 newform of level 21 modulo 5 and 25."""

from modcomp.companion import (companion_bound, congruence_check, greenberg_report,
                               kernel_test_full, target_weight, twisted_system)
from modcomp.formats import bundled
from modcomp.modsym import rational_eigenforms

# The weight-4 space at level 21 has two rational newforms; ours has a_2 = -3.
forms = rational_eigenforms(4, 21, 50)
f = next(g for g in forms.newforms if g.a(2) == -3)
print(f.label, f.coeffs[:10])
assert f.coeffs == bundled("f_21_4.json").coeffs

# Mod 5 the companion has weight 2; the weight-2 space is one-dimensional.
k1 = target_weight(4, 5, 1)
(g,) = rational_eigenforms(k1, 21, 50).newforms
B = companion_bound(4, k1, 21)
print("weight", k1, "bound", B, "congruent:", congruence_check(f, g, 5, 1, B).passed)

# Mod 25 the companion would have weight 18.  Kernels of T_q - g_q on the
# weight-18 cuspidal lattice, at every level dividing 21:
k2 = target_weight(4, 5, 2)
system = twisted_system(f, 5, 2, companion_bound(4, k2, 21))
for M in (1, 3, 7, 21):
    r = kernel_test_full(k2, M, 5, 2, system)
    print("level %2d rank %3d primes %s -> %s" % (M, r.lattice_rank, r.primes,
                                                  "no companion" if r.is_zero else "candidate"))

print(greenberg_report(f, 5, 2).summary)
