"""Print enclosures for the singular constant next to the pinned table.

Usage: python3 scripts/zk_table.py [precision]
"""

import sys

from waringlab.zk import REFERENCE_VALUES, zeta_sandwich, zk_estimate


def main() -> None:
    precision = float(sys.argv[1]) if len(sys.argv) > 1 else 1e-3
    print(f"{'k':>2}  {'lower':>12}  {'upper':>12}  {'table':>8}  {'zeta lo':>12}")
    for k in range(2, 10):
        est = zk_estimate(k, precision)
        ref = REFERENCE_VALUES.get(k)
        lo, _ = zeta_sandwich(k)
        print(
            f"{k:>2}  {est.lower:>12.9f}  {est.upper:>12.9f}  "
            f"{ref if ref is not None else '':>8}  {lo:>12.9f}"
        )


if __name__ == "__main__":
    main()
