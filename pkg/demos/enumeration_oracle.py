"""Brute-force enumeration of small trees versus the moment recurrences.

For small leaf counts every reachable leaf-depth multiset can be listed
with its exact rational probability. The moments computed from that full
distribution must agree exactly with the closed-form recurrences; this is
the strongest correctness check in the package because the two computations
share no code path.
"""

from fractions import Fraction

import yuledepth as yd

print("exact distributions of the depth multiset (depth^count notation):")
for k in range(1, 7):
    dist = yd.enumerate_distribution(k)
    pretty = {
        " ".join(f"{d}^{c}" for d, c in ms): str(p) for ms, p in sorted(dist.entries.items())
    }
    print(f"  k={k}: {pretty}")
print()

print("enumeration moments versus recurrence moments (all exact rationals):")
eg, es, eg2 = yd.moment_table_exact(8)
print(f"{'k':>2}  {'E[G_k]':>9} {'E[S_k]':>11} {'E[G_k^2]':>12}  agree")
for k in range(1, 9):
    o_eg, o_es, o_eg2 = yd.distribution_moments(yd.enumerate_distribution(k))
    same = (o_eg, o_es, o_eg2) == (eg[k], es[k], eg2[k])
    print(f"{k:>2}  {str(o_eg):>9} {str(o_es):>11} {str(o_eg2):>12}  {same}")
print()

va4 = yd.distribution_var_avg(yd.enumerate_distribution(4))
print(f"Var(G_4/4) from enumeration: {va4} (= {float(va4):.10f})")
assert va4 == Fraction(1, 72)
print("matches the recurrence table:", abs(yd.var_avg_depth(4) - float(va4)) < 1e-15)
