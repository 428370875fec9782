"""Level 57: three weight-2 newforms, only one of them a companion mod 5."""

from modcomp.companion import companion_search, congruence_check, hypothesis_check
from modcomp.formats import bundled
from modcomp.modsym import rational_eigenforms

f = bundled("f_57_4.json")
flags = hypothesis_check(f, 5)
print("a_5 =", flags.ap, "ordinary:", flags.ordinary, "unique mod-5 companion:", flags.companion_unique)

for g in rational_eigenforms(2, 57, 50).newforms:
    ok = congruence_check(f, g, 5, 1, 27).passed
    print(g.label, g.coeffs[:6], "companion" if ok else "")

# The weight-18 check needs a_q up to the bound 120, but only 50 coefficients
# are bundled; the report says so in its caveats.
r = companion_search(f, 5, 2)
print(r.verdict, [lv["primes"] for lv in r.levels])
for c in r.caveats:
    print("caveat:", c)
