"""Morning/evening census: does a sqrt(n)-sized swing tilt the whole day?

Starts from an exactly balanced split, flips floor(c sqrt(n) + 1/2) negative
vertices, runs one day, and counts vertices whose neighborhoods lean positive
up to a slack of gamma p^{3/2} n.  Reports the excess of that count over n/2,
normalized as alpha = excess / (p n^{3/2}), across a gamma grid.

    python3 scripts/census_excess.py --n 5000 --p 0.02 --trials 50
"""

from __future__ import annotations

import argparse
import sys

from majdyn import ExperimentConfig, OpinionModel, census_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--p", type=float, default=0.02)
    ap.add_argument("--c", type=float, default=1.0, help="swing coefficient")
    ap.add_argument("--gamma-grid", default="0.05,0.1,0.2")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"n={args.n} p={args.p} c={args.c} trials={args.trials} seed={args.seed}")
    header = f"{'gamma':>7} {'excess>0':>9}" + "".join(
        f" {q:>9}" for q in ("alpha q10", "q25", "q50", "q75", "q90")
    )
    print(header)
    for raw in args.gamma_grid.split(","):
        gamma = float(raw)
        cfg = ExperimentConfig(
            n=args.n, p=args.p, trials=args.trials, master_seed=args.seed,
            model=OpinionModel("morning_evening", c=args.c),
            gamma=gamma, c=args.c, workers=args.workers,
        )
        table = census_experiment(cfg)
        quants = "".join(f" {v:>9.4f}" for v in table.alpha_quantiles.values())
        print(f"{gamma:>7.3g} {table.positive_excess_fraction:>9.3f}{quants}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
