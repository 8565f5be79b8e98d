"""Command line front end.

Subcommands: run, sweep, census, growth, contraction, verify-lemmas,
gen-graph.  Data goes to stdout (or -o FILE) in CSV by default, JSON behind
--format json; progress and summaries go to stderr.  Exit codes: 0 success,
1 validation error (single-line diagnostic on stderr), 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

from . import harness, probkit
from .graph import sample_gnp, save_graph
from .opinions import OpinionModel

_MODEL_NAMES = {"uniform": "uniform", "fixed": "fixed_discrepancy", "morning": "morning_evening"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit 1
        raise _UsageError(message)


_VERBOSE = True


def _log(msg: str) -> None:
    if _VERBOSE:
        print(msg, file=sys.stderr)


def _build_parser() -> _Parser:
    parser = _Parser(prog="majdyn", description="Majority dynamics experiments on G(n, p).")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add_common(p, with_model=True):
        p.add_argument("--config", help="JSON config file; explicit flags override it")
        p.add_argument("--n", type=int, help="vertex count")
        p.add_argument("--p", type=float, help="edge density")
        p.add_argument("--p-regime", choices=("lower", "upper"),
                       help="density formula instead of --p: lower = n^(-3/5) log n, upper = n^(-1/2)")
        p.add_argument("--p-coefficient", type=float, default=None,
                       help="coefficient for --p-regime (default 1)")
        p.add_argument("--trials", type=int, help="number of Monte Carlo trials")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--day-cap", type=int, help="maximum simulated days")
        p.add_argument("--quenched", action="store_true", default=None,
                       help="fix one graph across all trials")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.add_argument("-q", "--quiet", action="store_true",
                       help="suppress progress logs on stderr")
        if with_model:
            p.add_argument("--model", choices=tuple(_MODEL_NAMES), help="initial opinion model")
            p.add_argument("--d", type=int, help="opinion sum for the fixed model")
            p.add_argument("--c", type=float, help="swing coefficient for the morning model")
            p.add_argument("--gamma", type=float, help="census threshold coefficient")

    p_run = sub.add_parser("run", help="run one experiment and report per-trial rows")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="sweep a d or p grid")
    add_common(p_sweep)
    p_sweep.add_argument("--d-values", help="comma-separated opinion sums to sweep")
    p_sweep.add_argument("--p-values", help="comma-separated densities to sweep")

    p_census = sub.add_parser("census", help="almost-positive excess distribution")
    add_common(p_census)

    p_growth = sub.add_parser("growth", help="one-day bias amplification vs sqrt(n p)")
    add_common(p_growth)

    p_contr = sub.add_parser("contraction", help="minority decay after the bias clears a floor")
    add_common(p_contr)
    p_contr.add_argument("--bias-floor", default="auto",
                         help="integer floor, or 'auto' to derive one from a sampled jumbledness witness")

    p_verify = sub.add_parser("verify-lemmas", help="exact probability toolkit checks")
    p_verify.add_argument("--max-trials", type=int, default=200,
                          help="randomized configurations per check")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--format", choices=("csv", "json"), default="csv")
    p_verify.add_argument("-o", "--output")
    p_verify.add_argument("-q", "--quiet", action="store_true")

    p_gen = sub.add_parser("gen-graph", help="sample one graph and write the binary dump")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--p", type=float, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--output", required=True)
    p_gen.add_argument("-q", "--quiet", action="store_true")

    return parser


def _config_from_args(args) -> harness.ExperimentConfig:
    if args.config:
        cfg = harness.load_config(args.config)
    else:
        if args.n is None:
            raise ValueError("--n is required (or provide --config)")
        cfg = harness.ExperimentConfig(n=args.n, p=args.p)
    overrides = {}
    if args.n is not None:
        overrides["n"] = args.n
    if args.p is not None and args.p_regime is not None:
        raise ValueError("--p and --p-regime are mutually exclusive")
    if args.p is not None:
        overrides["p"] = args.p
        overrides["p_spec"] = None
    if args.p_regime is not None:
        coeff = 1.0 if args.p_coefficient is None else args.p_coefficient
        maker = harness.PSpec.lower if args.p_regime == "lower" else harness.PSpec.upper
        overrides["p_spec"] = maker(coeff)
        overrides["p"] = None
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.day_cap is not None:
        overrides["day_cap"] = args.day_cap
    if args.quenched is not None:
        overrides["quenched"] = args.quenched
    if args.workers is not None:
        overrides["workers"] = args.workers
    if getattr(args, "model", None) is not None:
        overrides["model"] = OpinionModel(_MODEL_NAMES[args.model],
                                          d=args.d if args.d is not None else 0,
                                          c=args.c if args.c is not None else 0.0)
    elif getattr(args, "d", None) is not None:
        overrides["model"] = OpinionModel("fixed_discrepancy", d=args.d)
    if getattr(args, "c", None) is not None:
        overrides["c"] = args.c
    if getattr(args, "gamma", None) is not None:
        overrides["gamma"] = args.gamma
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _emit_rows(rows, columns, args) -> None:
    """Write a list-of-dicts table as CSV or JSON to -o or stdout."""
    if args.format == "json":
        text = json.dumps({"rows": list(rows)}, indent=2, allow_nan=False) + "\n"
    else:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow("" if row[c] is None else row[c] for c in columns)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    report = harness.run_experiment(cfg)
    _log(f"ran {cfg.trials} trials at n={cfg.n} p={cfg.resolved_p():.6g}; "
         f"unanimity fraction {report.aggregates['unanimity_fraction']:.3f}")
    if args.output:
        for written in harness.write_report(report, args.output, args.format):
            _log(f"wrote {written}")
    elif args.format == "json":
        sys.stdout.write(json.dumps(harness.report_to_dict(report), indent=2, allow_nan=False) + "\n")
    else:
        rows = [harness.trial_to_dict(t) for t in report.trials]
        for row in rows:
            row["bias_by_day"] = " ".join(str(b) for b in row["bias_by_day"])
            for col in harness._CSV_COLUMNS:
                row.setdefault(col, None)
        _emit_rows(rows, harness._CSV_COLUMNS, args)
    return 0


def _cmd_sweep(args) -> int:
    if bool(args.d_values) == bool(args.p_values):
        raise ValueError("provide exactly one of --d-values and --p-values")
    if args.p_values and args.p is None and args.p_regime is None and not args.config:
        # base density is irrelevant here; seed it from the grid
        first = next((v for v in args.p_values.split(",") if v.strip()), None)
        if first is None:
            raise ValueError("--p-values is empty")
        args.p = float(first)
    cfg = _config_from_args(args)
    if args.d_values:
        d_values = [int(v) for v in args.d_values.split(",") if v.strip()]
        table = harness.bias_sweep(cfg, d_values)
        columns = ("d", "trials", "unanimity_fraction", "median_unanimity_day",
                   "positive_sign_fraction")
        _emit_rows(table.rows, columns, args)
        return 0
    rows = []
    for raw in args.p_values.split(","):
        if not raw.strip():
            continue
        p = float(raw)
        sub = replace(cfg, p=p, p_spec=None)
        sub.validate()
        report = harness.run_experiment(sub)
        rows.append(
            {
                "p": p,
                "trials": sub.trials,
                "unanimity_fraction": report.aggregates["unanimity_fraction"],
                "median_unanimity_day": report.aggregates["median_unanimity_day"],
            }
        )
    _emit_rows(rows, ("p", "trials", "unanimity_fraction", "median_unanimity_day"), args)
    return 0


def _cmd_census(args) -> int:
    cfg = _config_from_args(args)
    if cfg.model.kind != "morning_evening":
        cfg = replace(cfg, model=OpinionModel("morning_evening", c=cfg.effective_c()))
    if cfg.gamma is None:
        raise ValueError("census requires --gamma")
    cfg.validate()
    table = harness.census_experiment(cfg)
    rows = [{"key": k, "value": v} for k, v in table.alpha_quantiles.items()]
    rows.append({"key": "positive_excess_fraction", "value": table.positive_excess_fraction})
    _emit_rows(rows, ("key", "value"), args)
    return 0


def _cmd_growth(args) -> int:
    cfg = _config_from_args(args)
    table = harness.growth_ratio_experiment(cfg)
    _emit_rows(table.rows, ("day", "median_ratio", "sqrt_np", "used", "skipped_zero_bias"), args)
    return 0


def _cmd_contraction(args) -> int:
    cfg = _config_from_args(args)
    if args.bias_floor == "auto":
        floor = harness.auto_bias_floor(cfg)
        _log(f"auto bias floor: {floor}")
    else:
        floor = int(args.bias_floor)
    table = harness.contraction_experiment(cfg, floor)
    rows = [dict(r, minority_by_day=" ".join(str(v) for v in r["minority_by_day"])) for r in table.rows]
    _emit_rows(rows, ("trial", "t_star", "minority_share_next", "minority_by_day",
                      "monotone_after_jump"), args)
    _log(f"qualifying trials: {table.qualifying}; "
         f"minority share <= 0.45 next day: {table.small_minority_fraction}")
    return 0


def _cmd_verify_lemmas(args) -> int:
    results = probkit.run_lemma_sweeps(max_cases=args.max_trials, seed=args.seed)
    rows = [
        {"check": r.name, "cases": r.cases, "worst": r.worst, "bound": r.bound,
         "result": "PASS" if r.passed else "FAIL"}
        for r in results
    ]
    _emit_rows(rows, ("check", "cases", "worst", "bound", "result"), args)
    failed = [r.name for r in results if not r.passed]
    if failed:
        _log(f"FAILED checks: {', '.join(failed)}")
        return 2
    _log(f"all {len(results)} checks passed")
    return 0


def _cmd_gen_graph(args) -> int:
    g = sample_gnp(args.n, args.p, args.seed)
    save_graph(g, args.output)
    _log(f"wrote {args.output}: n={g.n} edges={g.edge_count}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "census": _cmd_census,
    "growth": _cmd_growth,
    "contraction": _cmd_contraction,
    "verify-lemmas": _cmd_verify_lemmas,
    "gen-graph": _cmd_gen_graph,
}


def main(argv=None) -> int:
    global _VERBOSE
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        _VERBOSE = not getattr(args, "quiet", False)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"majdyn: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError) as exc:
        print(f"majdyn: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"majdyn: failure: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"majdyn: failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
