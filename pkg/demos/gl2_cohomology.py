"""h_n polynomials, closures in GL_2(Z/p^n) and H^1 of ad^0(i)."""

from modcomp import gl2
from modcomp.witt import WittRing

for n in range(1, 7):
    print("h_%d = %s" % (n, gl2.h_poly(n)))

# [[1,1],[0,1]] with a lift of [[1,0],[1,1]] already generates SL_2(Z/3^n).
for n in (1, 2, 3):
    R = WittRing(3, n)
    G = gl2.subgroup_closure([gl2.mat(R, [[1, 1], [0, 1]]), gl2.mat(R, [[4, 0], [1, 7]])], R)
    print("mod 3^%d: order %d, contains SL_2: %s" % (n, G.order, gl2.contains_sl2(G)))

# Lifts of the transvection mod 9 do not all have the same order.
print("orders of lifts mod 9:", gl2.transvection_preimage_orders(3, 2))
print("mod 25:", gl2.transvection_order(5, 2))

G = gl2.gl2_group(WittRing(5, 1))
print("H^1(GL_2(F_5), ad^0(i)):", [gl2.h1_dimension(G, i, pairs="generators") for i in range(4)])
print("H^1(SL_2(F_5), ad^0):", gl2.h1_dimension(gl2.sl2_group(WittRing(5, 1)), 0))
print("H^1(SL_2(F_9), ad^0):", gl2.h1_dimension(gl2.sl2_group(WittRing(3, 1, 2)), 0))
