"""Pure birth (Yule) tree simulation tracking the leaf-depth multiset.

The process starts at time 0 with a root that is the first leaf. Each leaf,
independently, splits into two children after an Exp(lambda) waiting time;
the children sit one edge deeper than their parent. Nothing about the tree
topology matters for depth statistics, so the live state is just a histogram
``depth -> number of leaves at that depth`` plus three cached aggregates:

    z = number of leaves
    g = sum of leaf depths
    s = sum of squared leaf depths

Both views of the process are provided:

* the embedded jump chain, indexed by leaf count k (``run_discrete``), where
  each step picks a leaf uniformly at random and splits it, and
* continuous time (``run_continuous``), a Gillespie scheme where with z
  leaves the next split arrives after an Exp(lambda * z) holding time and
  the state is observed at ``t_end`` (the holding time straddling ``t_end``
  is discarded, so the observation is the state strictly before the first
  split after ``t_end``).

Splitting a leaf at depth d changes the aggregates by exactly

    z += 1,  g += d + 2,  s += d*d + 4*d + 2

since one depth-d leaf is replaced by two at depth d+1. These integer
identities hold step by step with no rounding, which is what the tests
lean on.

The hot loop is compiled with numba when available and consumes scalars
straight from a ``numpy.random.Generator``, so results are bit-identical
whether or not the JIT is active and regardless of thread scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._streams import SeedLike, sim_rng

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


DEFAULT_MAX_LEAVES = 10_000_000

# Kernel status codes.
_DONE = 0
_GROW = 1  # histogram array too small for depth d+1; caller must enlarge
_CAPACITY = 2


class CapacityError(RuntimeError):
    """Raised when a run would exceed its ``max_leaves`` cap.

    ``leaves`` is the leaf count when the cap was hit; ``time_reached`` is
    the simulated time of the last executed split (None in discrete mode).
    """

    def __init__(
        self,
        leaves: int,
        max_leaves: int,
        time_reached: Optional[float] = None,
        cell: Optional[tuple[float, float]] = None,
    ):
        self.leaves = leaves
        self.max_leaves = max_leaves
        self.time_reached = time_reached
        self.cell = cell
        where = "" if time_reached is None else f" at t={time_reached:.6g}"
        at_cell = "" if cell is None else f" in cell (lambda={cell[0]:g}, t={cell[1]:g})"
        super().__init__(f"leaf count would exceed max_leaves={max_leaves}{where}{at_cell}")


@dataclass
class TreeState:
    """Leaf-depth multiset with cached aggregates.

    ``depth_counts`` maps depth (edges to the root) to the number of leaves
    at that depth; entries with count 0 are never retained. The caches
    satisfy z = sum(counts), g = sum(d * count), s = sum(d^2 * count).
    """

    depth_counts: dict[int, int] = field(default_factory=lambda: {0: 1})
    z: int = 1
    g: int = 0
    s: int = 0

    def recount(self) -> tuple[int, int, int]:
        """Recompute (z, g, s) from the histogram (full recount)."""
        z = sum(self.depth_counts.values())
        g = sum(d * c for d, c in self.depth_counts.items())
        s = sum(d * d * c for d, c in self.depth_counts.items())
        return z, g, s

    def validate(self) -> None:
        """Assert every structural invariant; cheap enough for tests."""
        assert self.z >= 1, "tree must have at least one leaf"
        assert all(c >= 1 for c in self.depth_counts.values()), "zero-count entry retained"
        assert all(d >= 0 for d in self.depth_counts), "negative depth"
        assert (self.z, self.g, self.s) == self.recount(), "cached aggregates out of sync"
        assert self.g * self.g <= self.z * self.s, "Cauchy-Schwarz violated"

    @property
    def avg_depth(self) -> float:
        return self.g / self.z


@dataclass(frozen=True)
class SimOutcome:
    """One replicate observed at ``t_end``.

    ``avg_depth`` is g/z, the per-tree mean leaf depth; ``random_leaf_depth``
    is the depth of one uniformly chosen leaf of the final tree.
    """

    t_end: float
    z: int
    g: int
    s: int
    avg_depth: float
    random_leaf_depth: int


@dataclass
class SimConfig:
    """Configuration for one replicate.

    Exactly one of ``t_end`` (continuous mode) and ``k_target`` (discrete
    mode) must be set. ``lam`` is the split rate, so the mean waiting time
    of a single leaf is 1/lam. The RNG stream is keyed by
    (seed, replicate_index); identical keys reproduce identical runs.
    """

    lam: float = 1.0
    t_end: Optional[float] = None
    k_target: Optional[int] = None
    seed: SeedLike = 0
    replicate_index: int = 0
    max_leaves: int = DEFAULT_MAX_LEAVES

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if (self.t_end is None) == (self.k_target is None):
            raise ValueError("exactly one of t_end / k_target must be set")
        if self.t_end is not None and self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if self.k_target is not None and self.k_target < 1:
            raise ValueError(f"k_target must be >= 1, got {self.k_target}")
        if self.replicate_index < 0:
            raise ValueError("replicate_index must be >= 0")
        if self.max_leaves < 1:
            raise ValueError("max_leaves must be >= 1")


def new_tree() -> TreeState:
    """Initial state: the root is the first (and only) leaf, at depth 0."""
    return TreeState()


def step(state: TreeState, rng: np.random.Generator) -> TreeState:
    """One jump-chain step: split a uniformly chosen leaf.

    A leaf at depth d is chosen with probability count_d / z, removed, and
    replaced by two leaves at depth d+1. Returns the new state; the input
    is not modified. This is the readable reference path; the bulk runners
    below do the same walk in compiled code.
    """
    assert state.z >= 1 and state.z == sum(state.depth_counts.values()), (
        "step() called on an incoherent TreeState"
    )
    target = rng.random() * state.z
    cum = 0.0
    chosen = -1
    for d in sorted(state.depth_counts):
        cum += state.depth_counts[d]
        if cum > target:
            chosen = d
            break
    if chosen < 0:  # floating guard, take the deepest occupied bin
        chosen = max(state.depth_counts)
    counts = dict(state.depth_counts)
    if counts[chosen] == 1:
        del counts[chosen]
    else:
        counts[chosen] -= 1
    counts[chosen + 1] = counts.get(chosen + 1, 0) + 2
    return TreeState(
        depth_counts=counts,
        z=state.z + 1,
        g=state.g + chosen + 2,
        s=state.s + chosen * chosen + 4 * chosen + 2,
    )


def sample_random_leaf_depth(state: TreeState, rng: np.random.Generator) -> int:
    """Depth of one uniformly chosen leaf (probability count_d / z)."""
    target = rng.random() * state.z
    cum = 0.0
    for d in sorted(state.depth_counts):
        cum += state.depth_counts[d]
        if cum > target:
            return d
    return max(state.depth_counts)


# ---------------------------------------------------------------------------
# compiled bulk runners
# ---------------------------------------------------------------------------
#
# Both kernels are resumable: they return _GROW when the histogram array has
# no slot for depth d+1, the driver doubles the array and re-enters without
# consuming any extra randomness (the pending split depth is carried across
# the call boundary). One split consumes exactly one uniform for the holding
# time (continuous mode only) and one uniform for the leaf choice, in that
# order, so a run's draw sequence is a pure function of its Generator.


@njit(cache=True, nogil=True)
def _continuous_kernel(gen, hist, z, g, s, t, dmin, dmax, pending_d, lam, t_end, max_leaves):
    size = hist.shape[0]
    if pending_d >= 0:
        d = pending_d
        hist[d] -= 1
        hist[d + 1] += 2
        if hist[dmin] == 0:
            dmin += 1
        if d + 1 > dmax:
            dmax = d + 1
        z += 1
        g += d + 2
        s += d * d + 4 * d + 2
    while True:
        u = gen.random()
        tau = -math.log1p(-u) / (lam * z)
        if t + tau > t_end:
            return (_DONE, z, g, s, t, dmin, dmax, -1)
        if z >= max_leaves:
            return (_CAPACITY, z, g, s, t, dmin, dmax, -1)
        t += tau
        target = gen.random() * z
        cum = 0.0
        d = dmin
        while d < dmax:
            cum += hist[d]
            if cum > target:
                break
            d += 1
        if d + 1 >= size:
            return (_GROW, z, g, s, t, dmin, dmax, d)
        hist[d] -= 1
        hist[d + 1] += 2
        if hist[dmin] == 0:
            dmin += 1
        if d + 1 > dmax:
            dmax = d + 1
        z += 1
        g += d + 2
        s += d * d + 4 * d + 2


@njit(cache=True, nogil=True)
def _discrete_kernel(gen, hist, z, g, s, dmin, dmax, pending_d, k_target):
    size = hist.shape[0]
    if pending_d >= 0:
        d = pending_d
        hist[d] -= 1
        hist[d + 1] += 2
        if hist[dmin] == 0:
            dmin += 1
        if d + 1 > dmax:
            dmax = d + 1
        z += 1
        g += d + 2
        s += d * d + 4 * d + 2
    while z < k_target:
        target = gen.random() * z
        cum = 0.0
        d = dmin
        while d < dmax:
            cum += hist[d]
            if cum > target:
                break
            d += 1
        if d + 1 >= size:
            return (_GROW, z, g, s, dmin, dmax, d)
        hist[d] -= 1
        hist[d + 1] += 2
        if hist[dmin] == 0:
            dmin += 1
        if d + 1 > dmax:
            dmax = d + 1
        z += 1
        g += d + 2
        s += d * d + 4 * d + 2
    return (_DONE, z, g, s, dmin, dmax, -1)


@njit(cache=True, nogil=True)
def _sample_depth_kernel(gen, hist, z, dmin, dmax):
    target = gen.random() * z
    cum = 0.0
    d = dmin
    while d < dmax:
        cum += hist[d]
        if cum > target:
            return d
        d += 1
    return dmax


def _hist_to_counts(hist: np.ndarray, dmin: int, dmax: int) -> dict[int, int]:
    return {d: int(hist[d]) for d in range(dmin, dmax + 1) if hist[d] > 0}


_INITIAL_HIST = 512


def run_continuous(config: SimConfig, *, _hist_size: int = _INITIAL_HIST) -> SimOutcome:
    """Simulate one replicate to ``config.t_end`` and observe it there.

    Raises CapacityError (carrying the time reached) if the leaf count
    would exceed ``config.max_leaves`` before ``t_end``.
    """
    if config.t_end is None:
        raise ValueError("run_continuous requires a config with t_end set")
    gen = sim_rng(config.seed, config.replicate_index)
    hist = np.zeros(_hist_size, dtype=np.int64)
    hist[0] = 1
    z, g, s, t, dmin, dmax, pending = 1, 0, 0, 0.0, 0, 0, -1
    while True:
        status, z, g, s, t, dmin, dmax, pending = _continuous_kernel(
            gen, hist, z, g, s, t, dmin, dmax, pending,
            config.lam, config.t_end, config.max_leaves,
        )
        if status == _GROW:
            hist = np.concatenate([hist, np.zeros(hist.shape[0], dtype=np.int64)])
            continue
        if status == _CAPACITY:
            raise CapacityError(int(z), config.max_leaves, time_reached=float(t))
        break
    nstar = int(_sample_depth_kernel(gen, hist, z, dmin, dmax))
    z, g, s = int(z), int(g), int(s)
    assert 0 <= g <= z * dmax and 0 <= s <= z * dmax * dmax, "aggregate overflow"
    return SimOutcome(
        t_end=config.t_end, z=z, g=g, s=s, avg_depth=g / z, random_leaf_depth=nstar
    )


def run_discrete(config: SimConfig, *, _hist_size: int = _INITIAL_HIST) -> TreeState:
    """Run the embedded jump chain until the tree has ``k_target`` leaves."""
    if config.k_target is None:
        raise ValueError("run_discrete requires a config with k_target set")
    if config.k_target > config.max_leaves:
        raise CapacityError(config.k_target, config.max_leaves)
    gen = sim_rng(config.seed, config.replicate_index)
    hist = np.zeros(_hist_size, dtype=np.int64)
    hist[0] = 1
    z, g, s, dmin, dmax, pending = 1, 0, 0, 0, 0, -1
    while True:
        status, z, g, s, dmin, dmax, pending = _discrete_kernel(
            gen, hist, z, g, s, dmin, dmax, pending, config.k_target
        )
        if status == _GROW:
            hist = np.concatenate([hist, np.zeros(hist.shape[0], dtype=np.int64)])
            continue
        break
    z, g, s = int(z), int(g), int(s)
    assert 0 <= g <= z * dmax and 0 <= s <= z * dmax * dmax, "aggregate overflow"
    return TreeState(depth_counts=_hist_to_counts(hist, dmin, dmax), z=z, g=g, s=s)
