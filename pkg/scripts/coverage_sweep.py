"""Sweep subset density and print window coverage at fixed k, s, N.

Usage: python3 scripts/coverage_sweep.py [k] [s] [N]
"""

import sys

from waringlab.harness import ExperimentConfig, coverage_experiment
from waringlab.zk import zk_estimate


def main() -> None:
    k = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    s = int(sys.argv[2]) if len(sys.argv) > 2 else 44
    N = int(sys.argv[3]) if len(sys.argv) > 3 else 20_000

    z_up = zk_estimate(k, 1e-3).upper
    threshold = (1.0 - 1.0 / (2.0 * z_up)) ** (1.0 / k)
    print(f"k = {k}, s = {s}, N = {N}, density threshold = {threshold:.4f}")
    print(f"{'density':>8}  {'coverage':>9}  {'first gap':>9}  {'|A|':>6}")
    for pct in (100, 95, 90, 85, 80, 70, 60, 50):
        cfg = ExperimentConfig(
            k=k, N=N, s=s, n_min=s, density=pct / 100, seed=pct,
            subset_mode="exact_count" if pct < 100 else "full",
        )
        rep = coverage_experiment(cfg)
        cov = next(c for c in rep.checks if c.name == "window_coverage_full")
        gap = cov.measured["first_gap"]
        print(
            f"{pct / 100:>8.2f}  {cov.measured['coverage']:>9.4f}  "
            f"{gap if gap is not None else '-':>9}  {cov.measured['subset_size']:>6}"
        )


if __name__ == "__main__":
    main()
