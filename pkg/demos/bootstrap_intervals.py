"""Bootstrap percentile intervals for a variance, on simulated tree data.

Resamples an ensemble of per-tree average depths with replacement,
recomputes the variance per resample, and reads the CI off the percentile
ranks. Fixed seeds make every number here reproducible.
"""

import numpy as np

import yuledepth as yd

lam, t, reps = 1.0, 5.0, 4000
ens = yd.simulate_ensemble(lam, t, reps, seed=123)
theory = yd.theory_point(lam, t).total_variance

print(f"{reps} trees at lambda={lam:g}, t={t:g}")
print(f"sample Var(G/Z) = {yd.sample_variance(ens.avg_depth):.4f} "
      f"(analytic value {theory:.4f})")

for b in (200, 1000, 5000):
    s = yd.bootstrap_ci_variance(ens.avg_depth, b=b, alpha=0.05, seed=9)
    print(f"  b={b:>5}: 95% CI [{s.ci_low:.4f}, {s.ci_high:.4f}] "
          f"width {s.ci_high - s.ci_low:.4f}")

print("\nCI width shrinks with the ensemble size (one bootstrap per size):")
for n in (250, 1000, 4000):
    sub = yd.simulate_ensemble(lam, t, n, seed=321)
    s = yd.bootstrap_ci_variance(sub.avg_depth, b=1000, alpha=0.05, seed=9)
    print(f"  n={n:>5}: variance {s.variance:.4f}, "
          f"CI [{s.ci_low:.4f}, {s.ci_high:.4f}], width {s.ci_high - s.ci_low:.4f}")

rng = np.random.default_rng(77)
flat = rng.normal(size=500) * 0.0 + 3.25
s = yd.bootstrap_ci_variance(flat, b=500, seed=1)
print(f"\ndegenerate all-equal input: variance {s.variance}, CI [{s.ci_low}, {s.ci_high}]")
