"""Mantissa bits the worst-case analysis demands, next to what the practical run uses.

    python3 scripts/precision_table.py > bits.csv
"""

import argparse
import csv
import sys

import numpy as np

from smalleig.driver import compute_parameters, preprocess, required_precision
from smalleig.matrix import RngStream


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 16, 32, 64])
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.1, 0.01, 0.001])
    ap.add_argument("--phi", type=float, default=0.2)
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "delta", "phi", "eps", "zeta", "m1", "m2", "required_bits", "hardware_bits"])
    for n in args.sizes:
        M = np.random.default_rng(n).standard_normal((n, n)) + 0j
        for delta in args.deltas:
            pre = preprocess(M, delta, args.phi, RngStream(n))
            g = pre.global_data
            led = compute_parameters(delta / 2, args.phi / 3, g)
            bits = required_precision(led, g).bits
            out.writerow([n, delta, args.phi, f"{g.eps:.3e}", f"{g.zeta:.3e}", led.m1, led.m2, bits, 53])


if __name__ == "__main__":
    main()
