"""How often the distance estimate lands in [0.9d, 1.1d] as the power m shrinks below its prescribed value.

    python3 scripts/distspec_bracket.py --instances 50 > bracket.csv
"""

import argparse
import cmath
import csv
import math
import sys

import numpy as np

from smalleig.distspec import choose_m, dist_spec
from smalleig.matrix import RngStream
from smalleig.verify.instances import shattered_instance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.01, 0.05, 0.1, 0.25, 0.5, 1.0])
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args(argv)

    cases = []
    for k in range(args.instances):
        n = 2 + k % (args.max_n - 1)
        inst = shattered_instance(n, RngStream(k, (77,)))
        gen = np.random.default_rng(k)
        s = inst.eigenvalues[0] + inst.gap * gen.uniform(0.05, 0.5) * cmath.exp(2j * math.pi * gen.uniform())
        d = float(np.min(np.abs(inst.eigenvalues - s)))
        cases.append((inst, s, d, choose_m(inst.eps, inst.zeta, n, inst.p)))

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["fraction_of_m", "mean_m", "inside_fraction", "worst_ratio"])
    for f in args.fractions:
        inside, worst, ms = 0, 1.0, []
        for inst, s, d, m in cases:
            mm = max(1, math.ceil(f * m))
            ms.append(mm)
            r = dist_spec(inst.H, s, mm) / d
            inside += 0.9 <= r <= 1.1
            worst = max(worst, r, 1 / r)
        out.writerow([f, f"{np.mean(ms):.1f}", f"{inside / len(cases):.3f}", f"{worst:.3f}"])


if __name__ == "__main__":
    main()
