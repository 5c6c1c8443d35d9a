"""Small-scale reproduction of the two variance curves.

Panel (a): Var(N*), the variance of a single random leaf's depth, grows
linearly with slope about 2*lambda. Panel (b): Var(G/Z), the across-tree
variance of the per-tree mean depth, flattens out near 7 regardless of
lambda. Bootstrap percentile CIs come from the stats module; the theory
column is the law-of-total-variance value from the exact module.

Defaults keep this quick (about a minute); pass a replicate count to push
it toward the full-scale run, e.g. ``python demos/figure_reproduction.py 10000``.
An optional PNG is written when matplotlib is importable.
"""

import sys

import yuledepth as yd

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 1500

spec = yd.FigureSpec(lambdas=(1.0, 1.3), t_grid=None, reps=reps, seed=20260810)
print(f"running {reps} replicates per cell over matched lambda*t = 1..10 ...")
rows = yd.run_figure(spec)

print(f"\n{'lam':>4} {'t':>6} {'Var(N*)':>9} {'Var(G/Z)':>9} "
      f"{'CI_low':>8} {'CI_high':>8} {'theory':>8}")
for r in rows:
    print(f"{r.lam:>4.1f} {r.t:>6.2f} {r.var_nstar:>9.3f} {r.var_avg:>9.3f} "
          f"{r.var_avg_lo:>8.3f} {r.var_avg_hi:>8.3f} {r.theory_total:>8.3f}")

last = [r for r in rows if abs(r.lam * r.t - 10.0) < 1e-9]
print("\nat lambda*t = 10:")
for r in last:
    print(f"  lambda={r.lam:g}: Var(G/Z) = {r.var_avg:.3f}, "
          f"95% CI [{r.var_avg_lo:.3f}, {r.var_avg_hi:.3f}], theory {r.theory_total:.3f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the PNG")
else:
    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(10, 4))
    colors = {1.0: "tab:red", 1.3: "tab:blue"}
    for lam in spec.lambdas:
        sel = [r for r in rows if r.lam == lam]
        ts = [r.t for r in sel]
        ax_a.plot(ts, [r.var_nstar for r in sel], "o-", color=colors[lam],
                  label=f"lambda={lam:g}")
        ax_a.plot(ts, [2 * lam * t for t in ts], "--", color=colors[lam], alpha=0.5)
        ax_b.plot(ts, [r.var_avg for r in sel], "o-", color=colors[lam],
                  label=f"lambda={lam:g}")
        ax_b.fill_between(ts, [r.var_avg_lo for r in sel],
                          [r.var_avg_hi for r in sel], color=colors[lam], alpha=0.2)
    ax_b.axhline(7.0, color="k", ls=":", lw=1)
    ax_a.set_xlabel("t"); ax_a.set_ylabel("Var(N*)"); ax_a.legend()
    ax_b.set_xlabel("t"); ax_b.set_ylabel("Var(G/Z)"); ax_b.legend()
    ax_a.set_title("random-leaf depth variance ~ 2*lambda*t")
    ax_b.set_title("per-tree mean depth variance -> 7")
    fig.tight_layout()
    fig.savefig("figure_reproduction.png", dpi=120)
    print("\nwrote figure_reproduction.png")
