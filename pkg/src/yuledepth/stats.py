"""Ensemble estimators and bootstrap percentile confidence intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._streams import SeedLike, bootstrap_rng

DEFAULT_B_RESAMPLES = 1000
DEFAULT_ALPHA = 0.05

# resamples processed per vectorized chunk; bounds peak memory at
# roughly _CHUNK * n floats
_CHUNK = 128


@dataclass(frozen=True)
class EnsembleSummary:
    """Sample mean/variance with a bootstrap percentile CI for the variance."""

    n: int
    mean: float
    variance: float
    ci_low: float
    ci_high: float
    alpha: float
    b_resamples: int


def sample_variance(values) -> float:
    """Unbiased (n-1 divisor) sample variance, two-pass."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("sample_variance needs a 1-d sequence of length >= 2")
    return float(np.var(x, ddof=1))


def _nearest_rank(sorted_stats: np.ndarray, quantile: float) -> float:
    # nearest-rank: value at index ceil(q*b) of the sorted resamples, 1-based
    b = sorted_stats.shape[0]
    idx = max(1, math.ceil(quantile * b))
    return float(sorted_stats[idx - 1])


def bootstrap_ci_variance(
    values,
    b: int = DEFAULT_B_RESAMPLES,
    alpha: float = DEFAULT_ALPHA,
    seed: SeedLike = 0,
) -> EnsembleSummary:
    """Percentile bootstrap CI for the sample variance.

    Draws ``b`` resamples with replacement of the full sample size,
    recomputes the variance on each, and reads the alpha/2 and 1-alpha/2
    nearest-rank percentiles off the sorted resample statistics. The
    resampling stream is keyed by (seed, "bootstrap"), independent of the
    simulation streams, and fixed (values, seed, b) reproduce the CI
    bit-exactly. A degenerate all-equal input yields the CI [0, 0].
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("bootstrap_ci_variance needs a 1-d sequence of length >= 2")
    if b < 100:
        raise ValueError(f"b must be >= 100, got {b}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    n = x.size
    rng = bootstrap_rng(seed)
    stats = np.empty(b)
    for start in range(0, b, _CHUNK):
        m = min(_CHUNK, b - start)
        idx = rng.integers(0, n, size=(m, n))
        stats[start : start + m] = np.var(x[idx], axis=1, ddof=1)
    stats.sort()
    return EnsembleSummary(
        n=n,
        mean=float(x.mean()),
        variance=float(np.var(x, ddof=1)),
        ci_low=_nearest_rank(stats, alpha / 2.0),
        ci_high=_nearest_rank(stats, 1.0 - alpha / 2.0),
        alpha=alpha,
        b_resamples=b,
    )
