"""Run the dense-model pipeline on weighted k-th powers and print the report.

Usage: python3 scripts/transference_demo.py [log2_N] [k] [s]

The default (squares, s = 8) fails the window check: the weighted
square support sits on one parity class mod 2, so the s-fold
convolution is exactly zero at odd targets. Run with k = 3 for a
contrast where the obstruction is absent.
"""

import sys

from waringlab.circle import all_kth_powers, build_f_b
from waringlab.residues import build_w_context
from waringlab.transference import transference_demo


def main() -> None:
    log2_n = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    k = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    s = int(sys.argv[3]) if len(sys.argv) > 3 else 8
    N = 1 << log2_n
    ctx = build_w_context(k, 2)
    f = build_f_b(all_kth_powers(4 * N + 1, k), N, ctx, 1)
    report = transference_demo([f] * s, 0.5, 0.3, 4 * N)

    print(f"N = 2^{log2_n}, k = {k}, s = {s}")
    print(f"means     : {[round(m, 4) for m in report.means]}")
    print(f"eta       : {[round(e, 6) for e in report.etas]}")
    print(f"K_hat     : {report.K_hat:.6f}")
    print(f"delta used: {report.delta_used} (retries {report.retries})")
    print(f"bohr sizes: {report.bohr_sizes}")
    print(f"window    : {report.window}")
    print(f"min conv  : {report.min_convolution:.6g}")
    print(f"holds     : {report.holds}")
    for note in report.notes:
        print(f"note      : {note}")


if __name__ == "__main__":
    main()
