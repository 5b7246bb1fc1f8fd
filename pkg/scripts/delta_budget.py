#!/usr/bin/env python
"""Mean 1-NN accuracy of ProbCover over a (budget, delta) grid on a 2-D ring mixture.

Output is a long-format CSV (b, delta, accuracy) ready for a heatmap; the best
delta per budget goes to stderr.

    python scripts/delta_budget.py --budgets 3,10,30 --seeds 10 > delta_budget.csv
"""
import argparse
import sys

from probcover.benchmarks import DELTA_SWEEP, best_delta_per_budget, delta_budget_grid


def _floats(s):
    return [float(t) for t in s.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budgets", default="3,10,30")
    ap.add_argument("--deltas", type=_floats, default=list(DELTA_SWEEP))
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--sep", type=float, default=4.0)
    args = ap.parse_args()

    budgets = [int(t) for t in args.budgets.split(",")]
    grid = delta_budget_grid(budgets, args.deltas, range(args.seeds), sep=args.sep)
    print("b,delta,accuracy")
    for b, row in grid.items():
        for d, acc in zip(args.deltas, row):
            print(f"{b},{d!r},{acc!r}")
    for b, d in best_delta_per_budget(grid, args.deltas).items():
        print(f"# b={b}: best delta {d}", file=sys.stderr)


if __name__ == "__main__":
    main()
