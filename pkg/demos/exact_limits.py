"""The two variance limits and why their sum is exactly 7.

The across-tree variance of the average leaf depth G(t)/Z(t) splits, by the
law of total variance with respect to the leaf count Z(t), into

    Var(G/Z) = E[Var(G/Z | Z)]  +  Var(E[G/Z | Z])
             -> 7 - 2*pi^2/3    +  2*pi^2/3         =  7.

This script prints both limits, checks the cancellation, and shows the
discrete-k convergence of Var(G_k/k) toward its limit.
"""

import yuledepth as yd

ecv = yd.limit_expected_cond_variance()
vce = yd.limit_var_cond_expectation()

print("limit of E[Var(G/Z | Z)]  (within a leaf count): ", f"{ecv:.12f}")
print("limit of Var(E[G/Z | Z])  (between leaf counts): ", f"{vce:.12f}")
print("sum:                                              ", f"{ecv + vce:.12f}")
print()

print("convergence of Var(G_k/k) to 7 - 2*pi^2/3:")
print(f"{'k':>9}  {'Var(G_k/k)':>14}  {'gap to limit':>14}")
for row in yd.run_convergence_table([10, 100, 1_000, 10_000, 100_000, 1_000_000]):
    print(f"{row.k:>9}  {row.var_avg:>14.10f}  {row.gap:>14.3e}")
print()

print("law-of-total-variance decomposition at finite time (lambda = 1):")
print(f"{'t':>5}  {'E[Var|Z]':>12}  {'Var(E|Z)':>12}  {'total':>12}  {'mean G/Z':>10}")
for t in (1, 2, 4, 6, 8, 10, 15, 20):
    tp = yd.theory_point(1.0, float(t))
    print(
        f"{t:>5}  {tp.expected_cond_variance:>12.6f}  "
        f"{tp.var_cond_expectation:>12.6f}  {tp.total_variance:>12.6f}  "
        f"{tp.mean_avg_depth:>10.4f}"
    )
print()
print("the total tends to 7; the mean average depth tends to 2*lambda*t - 2")
