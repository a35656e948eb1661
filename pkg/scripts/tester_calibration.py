"""Rejection frequency and distinct queries of the domain-reduction tester over seeds.

    python scripts/tester_calibration.py --runs 200
"""
import argparse
import csv

import numpy as np

from monored.fixtures import anti_majority, centrist_continuous
from monored.reduction import ProductMeasure
from monored.testers import TesterConfig, levin_tester


def cases():
    yield "anti_majority_1000", anti_majority(1000), None, dict(epsilon=0.2)
    yield "centrist_d16", centrist_continuous(16), ProductMeasure.named("uniform", 16), dict(epsilon=0.1, k=64)
    yield "centrist_d64", centrist_continuous(64), ProductMeasure.named("uniform", 64), dict(epsilon=0.1, k=16)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--out", default="tester_calibration.csv")
    args = ap.parse_args()

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["case", "reject_freq", "mean_queries"])
        for name, f, measure, params in cases():
            verdicts = [levin_tester(f, TesterConfig(seed=s, **params), measure) for s in range(args.runs)]
            freq = float(np.mean([v.rejected for v in verdicts]))
            q = float(np.mean([v.queries_used for v in verdicts]))
            w.writerow([name, freq, q])
            fh.flush()
            print(f"{name:20s} reject {freq:.3f}  mean distinct queries {q:.0f}")


if __name__ == "__main__":
    main()
