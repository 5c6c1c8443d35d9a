"""Brute-force enumeration of the jump chain over depth multisets.

Ground truth for small leaf counts: starting from the one-leaf tree, every
reachable depth multiset is expanded by splitting each distinct depth d
with probability count_d / k, in exact rational arithmetic. States are
keyed by their canonical form, a tuple of (depth, count) pairs sorted by
depth, so identical multisets reached along different paths merge.

The state space grows quickly with k (it is a tree of integer-partition
like objects), hence the default cap of 8 leaves, where a few dozen states
remain. Within the cap the oracle is exact: probabilities are Fractions
summing to exactly 1 and moments are exact rationals, which is what makes
it a genuinely independent check of the moment recurrences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Multiset = tuple[tuple[int, int], ...]  # sorted ((depth, count), ...)

DEFAULT_K_ENUM_MAX = 8


@dataclass(frozen=True)
class DepthDistribution:
    """Exact distribution over leaf-depth multisets at a fixed leaf count."""

    k: int
    entries: dict[Multiset, Fraction]

    def total_probability(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))


def _split(ms: Multiset, depth: int) -> Multiset:
    d = dict(ms)
    if d[depth] == 1:
        del d[depth]
    else:
        d[depth] -= 1
    d[depth + 1] = d.get(depth + 1, 0) + 2
    return tuple(sorted(d.items()))


def enumerate_distribution(k: int, *, k_enum_max: int = DEFAULT_K_ENUM_MAX) -> DepthDistribution:
    """Exact distribution of the depth multiset at ``k`` leaves.

    Raises ValueError below 1 and RuntimeError above the cap (state-space
    growth; raise ``k_enum_max`` deliberately if you have the memory).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > k_enum_max:
        raise RuntimeError(
            f"enumeration capped at k_enum_max={k_enum_max}; requested k={k}"
        )
    dist: dict[Multiset, Fraction] = {((0, 1),): Fraction(1)}
    for leaves in range(1, k):
        nxt: dict[Multiset, Fraction] = {}
        for ms, p in dist.items():
            for depth, count in ms:
                child = _split(ms, depth)
                nxt[child] = nxt.get(child, Fraction(0)) + p * Fraction(count, leaves)
        dist = nxt
    return DepthDistribution(k=k, entries=dist)


def multiset_g(ms: Multiset) -> int:
    return sum(d * c for d, c in ms)


def multiset_s(ms: Multiset) -> int:
    return sum(d * d * c for d, c in ms)


def distribution_moments(dist: DepthDistribution) -> tuple[Fraction, Fraction, Fraction]:
    """(E[G_k], E[S_k], E[G_k^2]) as exact rationals."""
    eg = Fraction(0)
    es = Fraction(0)
    eg2 = Fraction(0)
    for ms, p in dist.entries.items():
        g = multiset_g(ms)
        eg += p * g
        es += p * multiset_s(ms)
        eg2 += p * g * g
    return eg, es, eg2


def distribution_var_avg(dist: DepthDistribution) -> Fraction:
    """Var(G_k/k) as an exact rational."""
    eg, _, eg2 = distribution_moments(dist)
    k = dist.k
    return eg2 / (k * k) - (eg / k) ** 2
