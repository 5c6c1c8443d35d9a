import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import spence

from yuledepth import (
    AccuracyError,
    dilog,
    expected_cond_variance,
    expected_g,
    expected_g2,
    expected_s,
    limit_expected_cond_variance,
    limit_var_cond_expectation,
    mean_avg_depth,
    mean_harmonic_sum,
    moment_table,
    moment_table_exact,
    theory_point,
    var_avg_depth,
    var_cond_expectation,
    z_pmf,
)
from yuledepth.exact import _z_pmf_vector

LIM_ECV = 7.0 - 2.0 * math.pi ** 2 / 3.0
LIM_VCE = 2.0 * math.pi ** 2 / 3.0


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(b))


# ---------------------------------------------------------------------------
# jump-chain moments
# ---------------------------------------------------------------------------


def test_hand_values_small_k():
    assert expected_g(1) == 0.0 and expected_s(1) == 0.0 and expected_g2(1) == 0.0
    assert rel_err(expected_g(2), 2) < 1e-14
    assert rel_err(expected_s(2), 2) < 1e-14
    assert rel_err(expected_g2(2), 4) < 1e-14
    assert rel_err(expected_g(3), 5) < 1e-14
    assert rel_err(expected_s(3), 9) < 1e-14
    assert rel_err(expected_g2(3), 25) < 1e-14
    assert rel_err(expected_g(4), 26 / 3) < 1e-14
    assert rel_err(expected_s(4), 62 / 3) < 1e-14
    assert rel_err(expected_g2(4), 226 / 3) < 1e-14
    assert abs(var_avg_depth(4) - 1 / 72) < 1e-15
    for k in (1, 2, 3):
        assert var_avg_depth(k) == 0.0


def test_expected_g_closed_form():
    for k in (2, 7, 100, 12345):
        direct = 2.0 * k * sum(1.0 / i for i in range(2, k + 1))
        assert rel_err(expected_g(k), direct) < 1e-12


def test_one_step_identities_on_the_table():
    # E[G_{k+1}] = (k+1)/k E[G_k] + 2
    # E[S_{k+1}] = (k+1)/k E[S_k] + 4 E[G_k]/k + 2
    # E[G_{k+1}^2] = (k+2)/k E[G_k^2] + E[S_k]/k + 4 + 4(k+1)/k E[G_k]
    table = moment_table(5000)
    k = np.arange(1, 5000, dtype=float)
    eg, es, eg2 = table.eg, table.es, table.eg2
    lhs_g = eg[2:]
    rhs_g = (k + 1) / k * eg[1:-1] + 2.0
    assert np.max(np.abs(lhs_g - rhs_g) / np.maximum(1.0, np.abs(lhs_g))) < 1e-12
    lhs_s = es[2:]
    rhs_s = (k + 1) / k * es[1:-1] + 4.0 * eg[1:-1] / k + 2.0
    assert np.max(np.abs(lhs_s - rhs_s) / np.maximum(1.0, np.abs(lhs_s))) < 1e-12
    lhs_q = eg2[2:]
    rhs_q = (k + 2) / k * eg2[1:-1] + es[1:-1] / k + 4.0 + 4.0 * (k + 1) / k * eg[1:-1]
    assert np.max(np.abs(lhs_q - rhs_q) / np.maximum(1.0, np.abs(lhs_q))) < 1e-12


def test_table_monotone_and_nonnegative():
    table = moment_table(20_000)
    assert np.all(np.diff(table.eg[1:]) >= 0)
    assert np.all(np.diff(table.es[1:]) >= 0)
    assert np.all(np.diff(table.eg2[1:]) >= 0)
    assert np.all(table.var_avg[1:] >= 0)


def test_rational_recurrence_matches_float_table():
    eg, es, eg2 = moment_table_exact(64)
    table = moment_table(64)
    for k in range(1, 65):
        assert rel_err(table.eg[k], float(eg[k])) < 1e-13
        assert rel_err(table.es[k], float(es[k])) < 1e-13
        assert rel_err(table.eg2[k], float(eg2[k])) < 1e-13


def test_rational_recurrence_hand_values():
    eg, es, eg2 = moment_table_exact(8)
    assert eg[4] == Fraction(26, 3)
    assert es[4] == Fraction(62, 3)
    assert eg2[4] == Fraction(226, 3)
    va4 = eg2[4] / 16 - (eg[4] / 4) ** 2
    assert va4 == Fraction(1, 72)
    # deterministic chain through k = 3
    assert (eg[3], es[3], eg2[3]) == (Fraction(5), Fraction(9), Fraction(25))


def test_var_avg_convergence_to_limit():
    table = moment_table(1_000_000)
    frozen = {
        1_000: 0.4082907916,
        10_000: 0.4186061914,
        100_000: 0.4200519295,
        1_000_000: 0.4202379472,
    }
    for k, v in frozen.items():
        assert abs(table.var_avg[k] - v) < 1e-8
    gaps = [LIM_ECV - table.var_avg[k] for k in frozen]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-2
    # contraction on a doubling grid
    ks = [2 ** p for p in range(3, 19)]
    dg = [abs(LIM_ECV - table.var_avg[k]) for k in ks]
    assert all(b < a for a, b in zip(dg, dg[1:]))


def test_domain_errors():
    for fn in (expected_g, expected_s, expected_g2, var_avg_depth):
        with pytest.raises(ValueError):
            fn(0)
    with pytest.raises(ValueError):
        moment_table(0)
    with pytest.raises(ValueError):
        z_pmf(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        z_pmf(1, 0.0, 1.0)
    with pytest.raises(ValueError):
        z_pmf(1, 1.0, -1.0)
    with pytest.raises(ValueError):
        mean_harmonic_sum(-1.0, 1.0)
    with pytest.raises(ValueError):
        var_cond_expectation(1.0, -2.0)
    with pytest.raises(ValueError):
        expected_cond_variance(0.0, 1.0)


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------


def test_limit_values_and_sum():
    ecv = limit_expected_cond_variance()
    vce = limit_var_cond_expectation()
    assert abs(ecv - 0.42026373260709) < 1e-12
    assert abs(vce - 6.57973626739291) < 1e-12
    assert abs((ecv + vce) - 7.0) <= 1e-12


def test_limit_series_identities():
    # limit of E[Var(G/Z|Z)] assembles as 5 + 2 + 4(pi^2/6 - 1) - (4/3)(pi^2 - 3)
    pieces = 5.0 + 2.0 + 4.0 * (math.pi ** 2 / 6.0 - 1.0) - (4.0 / 3.0) * (math.pi ** 2 - 3.0)
    assert abs(pieces - limit_expected_cond_variance()) < 1e-12
    # limit of Var(E[G/Z|Z]) equals 4 * zeta(2); bracket the tail rigorously:
    # sum_{k>N} 1/k^2 lies strictly between 1/(N+1) and 1/N
    n = 200_000
    partial = float(np.sum(1.0 / np.arange(1, n + 1, dtype=float) ** 2))
    lo, hi = 4.0 * (partial + 1.0 / (n + 1)), 4.0 * (partial + 1.0 / n)
    assert lo < limit_var_cond_expectation() < hi


# ---------------------------------------------------------------------------
# continuous-time laws
# ---------------------------------------------------------------------------


def test_z_pmf_values():
    assert z_pmf(1, 1.0, 0.0) == 1.0
    assert z_pmf(5, 1.0, 0.0) == 0.0
    for k in range(1, 12):
        assert abs(z_pmf(k, 1.0, math.log(2)) - 2.0 ** -k) < 1e-15
    # lambda*t invariance
    assert z_pmf(7, 2.0, 1.75) == z_pmf(7, 1.0, 3.5)


def test_z_pmf_normalizes():
    for lam, t in ((1.0, 0.3), (1.0, 1.0), (2.0, 2.5), (1.3, 5.0)):
        q = -math.expm1(-lam * t)
        kmax = 4000
        total = float(np.sum(_z_pmf_vector(kmax, lam, t))) + q ** kmax
        assert abs(total - 1.0) < 1e-12


def test_mean_harmonic_sum_values():
    assert mean_harmonic_sum(1.0, 0.0) == 1.0
    assert mean_harmonic_sum(2.0, 1.75) == mean_harmonic_sum(1.0, 3.5)
    assert abs(mean_harmonic_sum(1.0, math.log(2)) - 2.0 * math.log(2)) < 1e-14
    # large-t behavior: lambda*t plus a vanishing correction
    diff = mean_harmonic_sum(1.0, 30.0) - 30.0
    assert 0.0 < diff < 1e-10
    assert abs(mean_avg_depth(1.0, math.log(2)) - (4.0 * math.log(2) - 2.0)) < 1e-14


def test_mean_harmonic_sum_against_series():
    # independent oracle: sum_k H_k P(Z=k), truncated where the geometric
    # tail is astronomically small
    kmax = 2_000_000
    h = np.cumsum(1.0 / np.arange(1, kmax + 1, dtype=float))
    for lt in (1.0, 5.0, 10.0):
        series = float(np.sum(h * _z_pmf_vector(kmax, 1.0, lt)))
        assert abs(mean_harmonic_sum(1.0, lt) - series) < 1e-8


def test_dilog_against_scipy_and_closed_forms():
    for x in (0.0, 0.05, 0.3, 0.5, 0.7, 0.9, 0.99, 0.9999999, 1.0 - 1e-12, 1.0):
        assert abs(dilog(x) - spence(1.0 - x)) < 5e-15
    assert abs(dilog(0.5) - (math.pi ** 2 / 12 - math.log(2) ** 2 / 2)) < 1e-15
    assert dilog(1.0) == math.pi ** 2 / 6
    with pytest.raises(ValueError):
        dilog(-0.1)
    with pytest.raises(ValueError):
        dilog(1.1)


def test_var_cond_expectation_closed_form_at_half():
    # q = 1/2 at lambda*t = ln 2 collapses to 2*pi^2/3 - 12 ln^2 2
    val = var_cond_expectation(1.0, math.log(2))
    closed = 2.0 * math.pi ** 2 / 3.0 - 12.0 * math.log(2) ** 2
    assert abs(val - closed) < 1e-12
    assert abs(val - 0.8143001003744894) < 1e-12


def test_var_cond_expectation_limit_and_invariance():
    assert abs(var_cond_expectation(1.0, 20.0) - LIM_VCE) < 1e-3
    assert abs(var_cond_expectation(1.0, 20.0) - LIM_VCE) < 1e-5
    assert var_cond_expectation(1.0, 0.0) == 0.0
    # exact lambda*t invariance when the products share the same float
    assert var_cond_expectation(2.0, 1.75) == var_cond_expectation(1.0, 3.5)
    assert np.all(np.diff([var_cond_expectation(1.0, t) for t in (0.5, 1, 2, 5, 10, 20)]) > 0)


def _mixture_oracle(lam, t, kmax=200_000):
    table = moment_table(kmax)
    return float(np.sum(table.var_avg[1:] * _z_pmf_vector(kmax, lam, t)))


def test_expected_cond_variance_against_direct_sum():
    # plain long summation as an oracle; valid while the geometric tail
    # at kmax is negligible (lambda*t <= 8 here)
    for lt in (0.5, 1.0, 2.0, 5.0, 8.0):
        assert abs(expected_cond_variance(1.0, lt) - _mixture_oracle(1.0, lt)) < 1e-9


def test_expected_cond_variance_limit_and_edges():
    assert expected_cond_variance(1.0, 0.0) == 0.0
    val = expected_cond_variance(1.0, 20.0, tol=1e-3)
    assert abs(val - LIM_ECV) < 1e-3
    grid = [0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0]
    vals = [expected_cond_variance(1.0, t) for t in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))  # diagnostic monotonicity
    assert all(v >= 0 for v in vals)


def test_expected_cond_variance_accuracy_error():
    # at lambda*t = 20 the geometric tail cannot certify 1e-10 within the
    # table cap; the error carries the achieved bound
    with pytest.raises(AccuracyError) as exc:
        expected_cond_variance(1.0, 20.0)
    assert exc.value.achieved < 1e-3
    assert exc.value.requested == 1e-10


def test_theory_point_decomposition_and_limit():
    tp = theory_point(1.0, 10.0)
    assert tp.total_variance == tp.var_cond_expectation + tp.expected_cond_variance
    assert tp.var_cond_expectation >= 0 and tp.expected_cond_variance >= 0
    assert abs(tp.mean_avg_depth - mean_avg_depth(1.0, 10.0)) == 0.0
    oracle = _mixture_oracle(1.0, 10.0, kmax=1_000_000) + var_cond_expectation(1.0, 10.0)
    assert abs(tp.total_variance - oracle) < 1e-6
    for lt in (20.0, 25.0):
        assert abs(theory_point(1.0, lt).total_variance - 7.0) < 1e-2
    assert abs(theory_point(1.0, 20.0).total_variance - 7.0) < 1e-3


def test_theory_point_rate_invariance():
    a = theory_point(1.0, 5.0)
    b = theory_point(1.3, 5.0 / 1.3)
    assert abs(a.total_variance - b.total_variance) < 1e-9
    assert abs(a.mean_avg_depth - b.mean_avg_depth) < 1e-9
