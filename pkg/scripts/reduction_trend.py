"""Mean restricted distance of anti-majority against k, next to the exact distance.

    python scripts/reduction_trend.py --n 50 --trials 1000 --out trend.csv
"""
import argparse
import csv

from monored.fixtures import anti_majority
from monored.matching import distance_to_monotonicity
from monored.reduction import estimate_expected_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 4, 8, 16, 32, 64])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="reduction_trend.csv")
    args = ap.parse_args()

    f = anti_majority(args.n)
    eps_f = float(distance_to_monotonicity(f))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "mean", "ci95", "eps_f", "gap"])
        for k in args.k:
            est = estimate_expected_distance(f, k, args.trials, seed=args.seed)
            w.writerow([k, est.mean, est.ci95, eps_f, eps_f - est.mean])
            fh.flush()
            print(f"k={k:4d}  E[eps_T]={est.mean:.4f} +- {est.ci95:.4f}  gap={eps_f - est.mean:.4f}")


if __name__ == "__main__":
    main()
