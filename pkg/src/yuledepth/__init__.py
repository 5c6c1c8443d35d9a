"""Leaf-depth statistics of pure birth (Yule) trees.

Three independent layers cross-check one another:

* :mod:`yuledepth.exact` - closed-form moment recurrences over the embedded
  jump chain, the continuous-time laws driven by the geometric leaf-count
  distribution, and the variance limits whose sum is exactly 7;
* :mod:`yuledepth.enumeration` - exact rational brute force over all depth
  multisets reachable at small leaf counts;
* :mod:`yuledepth.simulate` / :mod:`yuledepth.experiments` - reproducible
  Monte Carlo simulation of the process itself, with ensemble statistics
  and bootstrap confidence intervals in :mod:`yuledepth.stats`.

The headline fact being verified numerically: the across-tree variance of
the per-tree average leaf depth G(t)/Z(t) converges to 7, split by the law
of total variance into 2*pi^2/3 (between leaf counts) plus 7 - 2*pi^2/3
(within a leaf count).
"""

from .enumeration import (
    DepthDistribution,
    distribution_moments,
    distribution_var_avg,
    enumerate_distribution,
)
from .exact import (
    AccuracyError,
    MomentTable,
    TheoryPoint,
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
from .experiments import (
    ConvergenceRow,
    EnsembleResult,
    FigureRow,
    FigureSpec,
    run_convergence_table,
    run_figure,
    simulate_ensemble,
)
from .simulate import (
    CapacityError,
    SimConfig,
    SimOutcome,
    TreeState,
    new_tree,
    run_continuous,
    run_discrete,
    sample_random_leaf_depth,
    step,
)
from .stats import EnsembleSummary, bootstrap_ci_variance, sample_variance

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CapacityError",
    "ConvergenceRow",
    "DepthDistribution",
    "EnsembleResult",
    "EnsembleSummary",
    "FigureRow",
    "FigureSpec",
    "MomentTable",
    "SimConfig",
    "SimOutcome",
    "TheoryPoint",
    "TreeState",
    "bootstrap_ci_variance",
    "dilog",
    "distribution_moments",
    "distribution_var_avg",
    "enumerate_distribution",
    "expected_cond_variance",
    "expected_g",
    "expected_g2",
    "expected_s",
    "limit_expected_cond_variance",
    "limit_var_cond_expectation",
    "mean_avg_depth",
    "mean_harmonic_sum",
    "moment_table",
    "moment_table_exact",
    "new_tree",
    "run_continuous",
    "run_convergence_table",
    "run_discrete",
    "run_figure",
    "sample_random_leaf_depth",
    "sample_variance",
    "simulate_ensemble",
    "step",
    "theory_point",
    "var_avg_depth",
    "var_cond_expectation",
    "z_pmf",
]
