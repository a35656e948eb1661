"""Largest stack and worst mass/bound ratio of lex-improved maximum matchings on random grids.

    python scripts/stack_census.py --dims 8 8 --count 1000
"""
import argparse

from monored.fixtures import random_function
from monored.grid import GridDomain
from monored.matching import max_violation_matching
from monored.seeding import derive_rng
from monored.stacks import lex_improve, stack_bound_check, stack_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dims", type=int, nargs="+", default=[8, 8])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--p", type=float, default=0.5, help="probability of a 1")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    domain = GridDomain(args.dims)
    largest = 0
    worst = 0.0
    for i in range(args.count):
        f = random_function(domain, derive_rng(args.seed, i), args.p)
        profile = stack_profile(lex_improve(f, max_violation_matching(f)))
        largest = max(largest, profile.max_stack)
        worst = max(worst, max((r.mass / r.bound for r in stack_bound_check(profile, domain.total_size)), default=0))
    print(f"{args.count} functions on {args.dims}: largest stack {largest}, worst mass/bound {worst:.3f}")


if __name__ == "__main__":
    main()
