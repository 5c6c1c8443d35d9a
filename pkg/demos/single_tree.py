"""Watching single trees grow, in jump-chain steps and in continuous time.

Shows the live state (the depth histogram with its cached aggregates), the
exact one-step update rules, and how an observed continuous-time replicate
compares with the analytic expectations at the same time.
"""

import numpy as np

import yuledepth as yd

rng = np.random.default_rng(7)

print("embedded jump chain, one split at a time:")
state = yd.new_tree()
print(f"  k={state.z}: depths={state.depth_counts}  (g={state.g}, s={state.s})")
for _ in range(7):
    state = yd.step(state, rng)
    state.validate()  # full recount must reproduce the cached z, g, s
    print(f"  k={state.z}: depths={state.depth_counts}  (g={state.g}, s={state.s})")
print()

print("the same chain run to 10^5 leaves in compiled code:")
big = yd.run_discrete(yd.SimConfig(k_target=100_000, seed=1))
print(f"  z={big.z}, mean depth={big.avg_depth:.4f}, "
      f"expected E[G_k]/k={yd.expected_g(big.z) / big.z:.4f}")
print(f"  distinct depths occupied: {len(big.depth_counts)} "
      f"(from {min(big.depth_counts)} to {max(big.depth_counts)})")
print()

print("continuous time at lambda=1: one replicate per observation time")
print(f"{'t':>4} {'Z':>7} {'G/Z':>9} {'E[G/Z]':>9} {'N*':>4}")
for t in (1.0, 2.0, 4.0, 6.0, 8.0):
    out = yd.run_continuous(yd.SimConfig(lam=1.0, t_end=t, seed=42, replicate_index=int(t)))
    print(f"{t:>4} {out.z:>7} {out.avg_depth:>9.4f} "
          f"{yd.mean_avg_depth(1.0, t):>9.4f} {out.random_leaf_depth:>4}")
print()
print("Z grows like e^(lambda t); for one tree G/Z hugs 2*lambda*t - 2,")
print("and the depth N* of a single random leaf scatters around the same mean.")
