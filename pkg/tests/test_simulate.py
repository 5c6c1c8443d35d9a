import math

import numpy as np
import pytest

from yuledepth import (
    CapacityError,
    SimConfig,
    new_tree,
    run_continuous,
    run_discrete,
    sample_random_leaf_depth,
    step,
)
from yuledepth._streams import sim_rng
from yuledepth.exact import moment_table, _z_pmf_vector


class PresetRng:
    """Feeds step() a fixed sequence of uniforms to force a branch."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def test_new_tree_initial_state():
    t = new_tree()
    assert t.depth_counts == {0: 1}
    assert (t.z, t.g, t.s) == (1, 0, 0)
    assert t.avg_depth == 0.0
    t.validate()


def test_first_two_steps_are_deterministic():
    rng = np.random.default_rng(123)
    t1 = step(new_tree(), rng)
    assert t1.depth_counts == {1: 2}
    assert (t1.z, t1.g, t1.s) == (2, 2, 2)
    t2 = step(t1, rng)
    assert t2.depth_counts == {1: 1, 2: 2}
    assert (t2.z, t2.g, t2.s) == (3, 5, 9)
    t2.validate()


def test_step_k4_branches_forced():
    # from {1:1, 2:2}: picking the depth-1 leaf (prob 1/3) gives {2:4},
    # picking a depth-2 leaf (prob 2/3) gives {1:1, 2:1, 3:2}
    base = run_discrete(SimConfig(k_target=3, seed=0))
    shallow = step(base, PresetRng([0.2]))  # 3 * 0.2 < 1 -> depth 1
    assert shallow.depth_counts == {2: 4}
    assert (shallow.z, shallow.g, shallow.s) == (4, 8, 16)
    deep = step(base, PresetRng([0.5]))  # 1 <= 3 * 0.5 -> depth 2
    assert deep.depth_counts == {1: 1, 2: 1, 3: 2}
    assert (deep.z, deep.g, deep.s) == (4, 9, 23)


def test_step_k4_branch_fractions():
    n = 3000
    hits = 0
    for rep in range(n):
        st = run_discrete(SimConfig(k_target=4, seed=101, replicate_index=rep))
        if st.depth_counts == {2: 4}:
            hits += 1
        else:
            assert st.depth_counts == {1: 1, 2: 1, 3: 2}
    # Binomial(3000, 1/3): sd ~ 25.8; allow 5 sd
    assert abs(hits - n / 3) < 5 * math.sqrt(n * (1 / 3) * (2 / 3))


def test_cache_coherence_along_random_walks():
    for chain in range(25):
        rng = np.random.default_rng(chain)
        st = new_tree()
        for _ in range(60):
            st = step(st, rng)
        st.validate()  # full recount must match cached z, g, s


def test_run_discrete_matches_repeated_step():
    # the compiled runner and the reference step() consume the same stream
    cfg = SimConfig(k_target=40, seed=77, replicate_index=3)
    fast = run_discrete(cfg)
    rng = sim_rng(cfg.seed, cfg.replicate_index)
    slow = new_tree()
    for _ in range(39):
        slow = step(slow, rng)
    assert fast.depth_counts == slow.depth_counts
    assert (fast.z, fast.g, fast.s) == (slow.z, slow.g, slow.s)


def test_run_discrete_k1_and_k3():
    assert run_discrete(SimConfig(k_target=1, seed=5)).depth_counts == {0: 1}
    st = run_discrete(SimConfig(k_target=3, seed=5))
    assert (st.z, st.g, st.s) == (3, 5, 9)


def test_run_discrete_mean_g_at_k4():
    n = 4000
    total = 0
    for rep in range(n):
        total += run_discrete(SimConfig(k_target=4, seed=2024, replicate_index=rep)).g
    mean = total / n
    # E[G_4] = 26/3, Var(G_4) = 2/9
    se = math.sqrt(2 / 9 / n)
    assert abs(mean - 26 / 3) < 5 * se


def test_run_continuous_t0():
    out = run_continuous(SimConfig(lam=1.0, t_end=0.0, seed=9))
    assert (out.z, out.g, out.s) == (1, 0, 0)
    assert out.avg_depth == 0.0
    assert out.random_leaf_depth == 0


def test_run_continuous_bitwise_determinism():
    cfg = SimConfig(lam=1.3, t_end=4.0, seed=31, replicate_index=11)
    a = run_continuous(cfg)
    b = run_continuous(cfg)
    assert a == b
    c = run_continuous(SimConfig(lam=1.3, t_end=4.0, seed=31, replicate_index=12))
    assert c != a


def test_histogram_growth_is_transparent():
    cfg = SimConfig(lam=1.0, t_end=6.0, seed=404, replicate_index=2)
    assert run_continuous(cfg, _hist_size=2) == run_continuous(cfg)


def test_capacity_error_continuous():
    cfg = SimConfig(lam=1.0, t_end=10.0, seed=8, max_leaves=50)
    with pytest.raises(CapacityError) as exc:
        run_continuous(cfg)
    err = exc.value
    assert err.leaves == 50
    assert err.time_reached is not None and 0 < err.time_reached < 10.0


def test_capacity_error_discrete():
    with pytest.raises(CapacityError):
        run_discrete(SimConfig(k_target=100, seed=8, max_leaves=50))


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(lam=0.0, t_end=1.0)
    with pytest.raises(ValueError):
        SimConfig(lam=1.0)  # neither mode set
    with pytest.raises(ValueError):
        SimConfig(lam=1.0, t_end=1.0, k_target=5)  # both modes set
    with pytest.raises(ValueError):
        SimConfig(lam=1.0, t_end=-0.5)
    with pytest.raises(ValueError):
        SimConfig(lam=1.0, k_target=0)


def test_sample_random_leaf_depth_forced_and_uniform():
    st = run_discrete(SimConfig(k_target=3, seed=0))  # {1:1, 2:2}
    assert sample_random_leaf_depth(st, PresetRng([0.0])) == 1
    assert sample_random_leaf_depth(st, PresetRng([0.99])) == 2
    rng = np.random.default_rng(55)
    draws = [sample_random_leaf_depth(st, rng) for _ in range(3000)]
    ones = draws.count(1)
    assert abs(ones - 1000) < 5 * math.sqrt(3000 * (1 / 3) * (2 / 3))
    assert set(draws) == {1, 2}


def test_leaf_count_geometric_law():
    # lambda*t = ln 2 makes Z geometric with success probability 1/2
    reps = 20_000
    t_end = math.log(2)
    zs = np.array([
        run_continuous(SimConfig(lam=1.0, t_end=t_end, seed=606, replicate_index=r)).z
        for r in range(reps)
    ])
    kmax = 11
    observed = np.bincount(np.minimum(zs, kmax + 1), minlength=kmax + 2)[1:]
    probs = np.array([2.0 ** -k for k in range(1, kmax + 1)] + [2.0 ** -kmax])
    expected = reps * probs
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    # chi-square 1% critical value for 12 dof
    assert chi2 < 26.217


def test_random_leaf_depth_moments_match_mixture():
    # E[N*] and Var(N*) from simulation versus the exact mixture over Z:
    # conditional on Z = k the multiset law is the k-leaf jump chain, so
    # E[N*] = sum_k (E[G_k]/k) P(Z=k) and E[N*^2] = sum_k (E[S_k]/k) P(Z=k).
    lam, t_end, reps = 1.0, 3.0, 4000
    kcap = 4000  # P(Z > kcap) ~ q^kcap ~ 1e-87 at lambda*t = 3
    table = moment_table(kcap)
    pmf = _z_pmf_vector(kcap, lam, t_end)
    k = np.arange(1, kcap + 1)
    m1 = float(np.sum(table.eg[1:] / k * pmf))
    m2 = float(np.sum(table.es[1:] / k * pmf))
    exact_var = m2 - m1 * m1
    ns = np.array([
        run_continuous(SimConfig(lam=lam, t_end=t_end, seed=77, replicate_index=r)
                       ).random_leaf_depth
        for r in range(reps)
    ], dtype=float)
    se_mean = math.sqrt(exact_var / reps)
    assert abs(ns.mean() - m1) < 5 * se_mean
    sample_var = float(np.var(ns, ddof=1))
    se_var = exact_var * math.sqrt(3.0 / reps)  # mild-kurtosis scale
    assert abs(sample_var - exact_var) < 5 * se_var


def test_rate_only_sets_the_clock():
    # (lambda=2, t=1) and (lambda=1, t=2) share the law; compare mean Z
    reps = 3000
    za = np.array([
        run_continuous(SimConfig(lam=2.0, t_end=1.0, seed=13, replicate_index=r)).z
        for r in range(reps)
    ])
    zb = np.array([
        run_continuous(SimConfig(lam=1.0, t_end=2.0, seed=14, replicate_index=r)).z
        for r in range(reps)
    ])
    # E[Z] = e^2, Var(Z) = e^2(e^2 - 1) for the geometric law
    se = math.sqrt(2 * math.exp(2) * (math.exp(2) - 1) / reps)
    assert abs(za.mean() - zb.mean()) < 5 * se
