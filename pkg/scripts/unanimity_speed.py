"""How fast does a random majority network settle?

Sweeps edge density at fixed n and reports, per density, how often the
dynamics reach unanimity, how many days that takes, and how often the
winning side is the one that started ahead.

    python3 scripts/unanimity_speed.py --n 10000 --trials 50
    python3 scripts/unanimity_speed.py --n 2000 --p-grid 0.005,0.01,0.05 --trials 200
"""

from __future__ import annotations

import argparse
import collections
import sys

from majdyn import ExperimentConfig, run_experiment


def summarize(cfg: ExperimentConfig) -> dict:
    report = run_experiment(cfg)
    agg = report.aggregates
    days = collections.Counter(
        t.unanimity_day for t in report.trials if t.outcome == "unanimous"
    )
    return {
        "p": cfg.resolved_p(),
        "unanimity": agg["unanimity_fraction"],
        "median_day": agg["median_unanimity_day"],
        "sign_match": agg["sign_match_fraction"],
        "day_histogram": dict(sorted(days.items())),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10**4)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--day-cap", type=int, default=64)
    ap.add_argument("--p-grid", default="0.03",
                    help="comma-separated densities (default 0.03)")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"n={args.n} trials={args.trials} seed={args.seed}")
    print(f"{'p':>10} {'unanimity':>10} {'median day':>11} {'sign match':>11}  days")
    for raw in args.p_grid.split(","):
        p = float(raw)
        cfg = ExperimentConfig(
            n=args.n, p=p, trials=args.trials, master_seed=args.seed,
            day_cap=args.day_cap, workers=args.workers,
        )
        row = summarize(cfg)
        hist = " ".join(f"{d}:{c}" for d, c in row["day_histogram"].items())
        med = "-" if row["median_day"] is None else f"{row['median_day']:.1f}"
        match = "-" if row["sign_match"] is None else f"{row['sign_match']:.3f}"
        print(f"{p:>10.4g} {row['unanimity']:>10.3f} {med:>11} {match:>11}  {hist}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
