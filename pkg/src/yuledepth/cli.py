"""Command-line front end.

Subcommands::

    exact-moments   per-k moment table as CSV (k,EG,ES,EG2,var_avg)
    limits          the two variance limits and their sum (must be 7)
    simulate        one replicate ensemble as CSV (rep,z,g,s,avg_depth,nstar)
    figure          variance curves with bootstrap CIs and theory columns
    convergence     Var(G_k/k) and its gap to the limit at chosen k values

Output is plain comma-separated UTF-8 with LF line endings, a header row,
and fixed significant-digit number formatting, so identical invocations
produce byte-identical files. Every numeric flag is range-checked at parse
time. A flat ``key=value`` file passed with --config mirrors any flag;
explicit flags win on conflict.
"""

from __future__ import annotations

import argparse
import sys
from typing import IO, Callable, Optional

from . import exact
from .experiments import (
    DEFAULT_LAMBDAS,
    DEFAULT_REPS,
    FigureSpec,
    run_convergence_table,
    run_figure,
)
from .simulate import DEFAULT_MAX_LEAVES, CapacityError, SimConfig, run_continuous
from .stats import DEFAULT_ALPHA, DEFAULT_B_RESAMPLES

#: fixed, documented default seed so default runs are reproducible
DEFAULT_SEED = 20260810

DEFAULT_CSV_PRECISION = 12
DEFAULT_K_POINTS = (1_000, 10_000, 100_000, 1_000_000)


# ---------------------------------------------------------------------------
# flag parsing helpers (range checks happen here, at parse time)
# ---------------------------------------------------------------------------


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {s}")
    return v


def _nonneg_float(s: str) -> float:
    v = float(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return v


def _alpha(s: str) -> float:
    v = float(s)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {s}")
    return v


def _lambda_list(s: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(part) for part in s.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad lambda list {s!r}") from err
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("lambdas must be positive")
    return vals


def _t_grid(s: str) -> tuple[float, ...]:
    parts = s.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"--t-grid expects a:b:step, got {s!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad t-grid {s!r}") from err
    if a < 0 or b < a or step <= 0:
        raise argparse.ArgumentTypeError("t-grid needs 0 <= a <= b and step > 0")
    n = int((b - a) / step + 1e-9) + 1
    return tuple(a + i * step for i in range(n))


def _k_points(s: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(p) for p in s.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad k list {s!r}") from err
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("k points must be >= 1")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("k points must be increasing")
    return vals


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"bad boolean {s!r}")


# casters used when the same option arrives through a --config file
_CONFIG_CASTERS: dict[str, Callable[[str], object]] = {
    "lambda": _positive_float,
    "lambdas": _lambda_list,
    "t": _nonneg_float,
    "t-grid": _t_grid,
    "k-max": _positive_int,
    "k-points": _k_points,
    "reps": _positive_int,
    "seed": lambda s: int(s),
    "bootstrap": _positive_int,
    "alpha": _alpha,
    "threads": _positive_int,
    "max-leaves": _positive_int,
    "out": str,
    "csv-precision": _positive_int,
    "csv": _bool,
}


def _read_config(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_CASTERS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            entries[key] = value.strip()
    return entries


def _merge(args: argparse.Namespace, dest: str, key: str, default):
    """Resolve one option: explicit flag, then config file, then default."""
    val = getattr(args, dest)
    if val is not None:
        return val
    cfg = getattr(args, "_config", {})
    if key in cfg:
        return _CONFIG_CASTERS[key](cfg[key])
    return default


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def _fmt(v, precision: int) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        raise TypeError("no boolean payloads in CSV")
    if isinstance(v, (int,)):
        return str(v)
    return f"{float(v):.{precision}g}"


def _write_csv(stream: IO[str], header: list[str], rows, precision: int) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v, precision) for v in row) + "\n")


class _Output:
    """stdout or a file, opened UTF-8 with LF endings."""

    def __init__(self, path: Optional[str]):
        self.path = path
        self._fh: Optional[IO[str]] = None

    def __enter__(self) -> IO[str]:
        if self.path is None or self.path == "-":
            return sys.stdout
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        return self._fh

    def __exit__(self, *exc) -> None:
        if self._fh is not None:
            self._fh.close()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_exact_moments(args: argparse.Namespace) -> int:
    k_max = _merge(args, "k_max", "k-max", 100)
    precision = _merge(args, "csv_precision", "csv-precision", DEFAULT_CSV_PRECISION)
    out = _merge(args, "out", "out", None)
    table = exact.moment_table(k_max)
    rows = (
        (k, table.eg[k], table.es[k], table.eg2[k], table.var_avg[k])
        for k in range(1, k_max + 1)
    )
    with _Output(out) as fh:
        _write_csv(fh, ["k", "EG", "ES", "EG2", "var_avg"], rows, precision)
    return 0


def _cmd_limits(args: argparse.Namespace) -> int:
    precision = _merge(args, "csv_precision", "csv-precision", DEFAULT_CSV_PRECISION)
    out = _merge(args, "out", "out", None)
    as_csv = _merge(args, "csv", "csv", False)
    ecv = exact.limit_expected_cond_variance()
    vce = exact.limit_var_cond_expectation()
    total = ecv + vce
    err = abs(total - 7.0)
    ok = err <= 1e-12
    with _Output(out) as fh:
        if as_csv:
            _write_csv(
                fh,
                ["name", "value"],
                [
                    ("expected_cond_variance_limit", ecv),
                    ("var_cond_expectation_limit", vce),
                    ("total_variance_limit", total),
                ],
                precision,
            )
        else:
            fh.write(f"expected_cond_variance_limit = {ecv:.{precision}g}\n")
            fh.write(f"var_cond_expectation_limit   = {vce:.{precision}g}\n")
            fh.write(f"total_variance_limit         = {total:.{precision}g}\n")
            fh.write(f"sum check |total - 7| = {err:.3g} "
                     f"({'OK' if ok else 'FAIL'} at 1e-12)\n")
    if not ok:
        print("limit sum check failed", file=sys.stderr)
        return 1
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    lam = _merge(args, "lam", "lambda", 1.0)
    t = _merge(args, "t", "t", None)
    if t is None:
        print("simulate: --t is required", file=sys.stderr)
        return 2
    reps = _merge(args, "reps", "reps", DEFAULT_REPS)
    seed = _merge(args, "seed", "seed", DEFAULT_SEED)
    max_leaves = _merge(args, "max_leaves", "max-leaves", DEFAULT_MAX_LEAVES)
    precision = _merge(args, "csv_precision", "csv-precision", DEFAULT_CSV_PRECISION)
    out = _merge(args, "out", "out", None)

    failures = 0
    rows = []
    for rep in range(reps):
        # replicate streams match cell 0 of a figure run with the same seed,
        # so a single-cell figure is exactly this ensemble plus stats
        cfg = SimConfig(lam=lam, t_end=t, seed=(seed, 0), replicate_index=rep,
                        max_leaves=max_leaves)
        try:
            o = run_continuous(cfg)
        except CapacityError as err:
            failures += 1
            print(f"simulate: rep {rep}: {err}", file=sys.stderr)
            rows.append((rep, float("nan"), float("nan"), float("nan"),
                         float("nan"), float("nan")))
            continue
        rows.append((rep, o.z, o.g, o.s, o.avg_depth, o.random_leaf_depth))
    with _Output(out) as fh:
        _write_csv(fh, ["rep", "z", "g", "s", "avg_depth", "nstar"], rows, precision)
    return 1 if failures else 0


def _cmd_figure(args: argparse.Namespace) -> int:
    lambdas = _merge(args, "lam", "lambdas", DEFAULT_LAMBDAS)
    t_grid = _merge(args, "t_grid", "t-grid", None)
    reps = _merge(args, "reps", "reps", DEFAULT_REPS)
    seed = _merge(args, "seed", "seed", DEFAULT_SEED)
    b = _merge(args, "bootstrap", "bootstrap", DEFAULT_B_RESAMPLES)
    alpha = _merge(args, "alpha", "alpha", DEFAULT_ALPHA)
    threads = _merge(args, "threads", "threads", 1)
    max_leaves = _merge(args, "max_leaves", "max-leaves", DEFAULT_MAX_LEAVES)
    precision = _merge(args, "csv_precision", "csv-precision", DEFAULT_CSV_PRECISION)
    out = _merge(args, "out", "out", None)

    spec = FigureSpec(
        lambdas=lambdas, t_grid=t_grid, reps=reps, seed=seed,
        b_resamples=b, alpha=alpha, max_leaves=max_leaves,
    )
    rows = run_figure(spec, threads=threads)
    payload = (
        (r.lam, r.t, r.var_nstar, r.var_nstar_lo, r.var_nstar_hi,
         r.var_avg, r.var_avg_lo, r.var_avg_hi, r.mean_avg,
         r.theory_total, r.theory_mean)
        for r in rows
    )
    header = ["lambda", "t", "var_nstar", "var_nstar_lo", "var_nstar_hi",
              "var_avg", "var_avg_lo", "var_avg_hi", "mean_avg",
              "theory_total", "theory_mean"]
    with _Output(out) as fh:
        _write_csv(fh, header, payload, precision)
    return 0


def _cmd_convergence(args: argparse.Namespace) -> int:
    k_max = _merge(args, "k_max", "k-max", None)
    k_points = _merge(args, "k_points", "k-points", None)
    precision = _merge(args, "csv_precision", "csv-precision", DEFAULT_CSV_PRECISION)
    out = _merge(args, "out", "out", None)
    if k_points is None:
        pts = [k for k in DEFAULT_K_POINTS if k_max is None or k <= k_max]
        if k_max is not None and (not pts or pts[-1] != k_max):
            pts.append(k_max)
    else:
        pts = list(k_points)
        if k_max is not None:
            pts = [k for k in pts if k <= k_max]
    rows = run_convergence_table(pts)
    with _Output(out) as fh:
        _write_csv(fh, ["k", "var_avg", "gap"],
                   ((r.k, r.var_avg, r.gap) for r in rows), precision)
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=str, default=None,
                   help="output path (default: standard output)")
    p.add_argument("--csv-precision", dest="csv_precision", type=_positive_int,
                   default=None, help="significant digits (default 12)")
    p.add_argument("--config", type=str, default=None,
                   help="flat key=value file mirroring flags; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yuledepth",
        description="Leaf-depth statistics of pure birth trees: exact tables, "
                    "limits, Monte Carlo ensembles, and figure-ready CSV.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact-moments", help="moment table as CSV")
    p.add_argument("--k-max", dest="k_max", type=_positive_int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_exact_moments)

    p = sub.add_parser("limits", help="variance limits; their sum must be 7")
    p.add_argument("--csv", dest="csv", action="store_const", const=True,
                   default=None, help="machine-readable name,value output")
    _add_common(p)
    p.set_defaults(func=_cmd_limits)

    p = sub.add_parser("simulate", help="replicate ensemble at one (lambda, t)")
    p.add_argument("--lambda", dest="lam", type=_positive_float, default=None)
    p.add_argument("--t", dest="t", type=_nonneg_float, default=None)
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-leaves", dest="max_leaves", type=_positive_int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("figure", help="variance curves with CIs and theory columns")
    p.add_argument("--lambda", dest="lam", type=_lambda_list, default=None,
                   help="comma-separated rates (default 1.0,1.3)")
    p.add_argument("--t-grid", dest="t_grid", type=_t_grid, default=None,
                   help="a:b:step shared time grid "
                        "(default: lambda*t = 1..10 matched per rate)")
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--bootstrap", type=_positive_int, default=None,
                   help="bootstrap resamples (default 1000)")
    p.add_argument("--alpha", type=_alpha, default=None)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--max-leaves", dest="max_leaves", type=_positive_int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("convergence", help="Var(G_k/k) gap to the limit")
    p.add_argument("--k-points", dest="k_points", type=_k_points, default=None,
                   help="comma-separated increasing k values "
                        "(default 1e3,1e4,1e5,1e6)")
    p.add_argument("--k-max", dest="k_max", type=_positive_int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_convergence)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = _read_config(args.config) if args.config else {}
    except (OSError, ValueError) as err:
        print(f"yuledepth: config: {err}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (CapacityError, exact.AccuracyError, ValueError) as err:
        print(f"yuledepth: {args.command}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"yuledepth: {args.command}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
