"""Compare the series tail probabilities with the Monte Carlo oracle.

Usage: python scripts/check_pvalue_oracle.py [--paths N] [--steps K] [--seed S]
"""

import argparse
import time

import numpy as np

from ecce.pvalues import TailKind, expected_null_constants, mc_oracle, tail_maxabs, tail_range

XS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=10**6)
    ap.add_argument("--steps", type=int, default=4096)
    ap.add_argument("--seed", type=int, default=2021)
    args = ap.parse_args()

    t0 = time.time()
    means = dict(zip(TailKind, expected_null_constants()))
    for kind, tail in ((TailKind.MAX_ABS, tail_maxabs), (TailKind.RANGE, tail_range)):
        est = mc_oracle(kind, np.array(XS), args.paths, args.steps, args.seed)
        print(f"{kind.value}: oracle mean {est.mean_statistic:.5f} (exact {means[kind]:.5f})")
        for x, p, se in zip(XS, est.estimate, est.std_error):
            q = tail(x).p
            print(f"  x={x:<4} series={q:.6f} oracle={p:.6f} z={(p - q) / se:+.2f}")
    print(f"elapsed {time.time() - t0:.1f} s")


if __name__ == "__main__":
    main()
