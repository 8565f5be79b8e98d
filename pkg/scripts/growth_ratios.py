"""One-day bias amplification against the sqrt(n p) yardstick.

A balanced-ish start has bias of order sqrt(n); after one day the majority
side recruits about sqrt(n p) times its head start.  This script measures
the day-over-day |bias| ratios for a few (n, p) pairs and prints them next
to sqrt(n p).

    python3 scripts/growth_ratios.py
    python3 scripts/growth_ratios.py --sizes 5000,20000 --p 0.02 --trials 100
"""

from __future__ import annotations

import argparse
import sys

from majdyn import ExperimentConfig, growth_ratio_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2000,10000", help="comma-separated n values")
    ap.add_argument("--p", type=float, default=0.02)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'n':>8} {'p':>8} {'day':>4} {'median ratio':>13} {'sqrt(np)':>9} {'used':>5}")
    for raw in args.sizes.split(","):
        n = int(raw)
        cfg = ExperimentConfig(
            n=n, p=args.p, trials=args.trials, master_seed=args.seed,
            workers=args.workers,
        )
        table = growth_ratio_experiment(cfg)
        for row in table.rows:
            ratio = row["median_ratio"]
            shown = "-" if ratio is None else f"{ratio:.2f}"
            print(f"{n:>8} {args.p:>8.4g} {row['day']:>4} {shown:>13} "
                  f"{row['sqrt_np']:>9.2f} {row['used']:>5}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
