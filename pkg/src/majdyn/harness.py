"""Monte Carlo experiment harness with reproducible per-trial streams.

Trial i draws its randomness from ``SeedSequence(master_seed, spawn_key=(i,))``
split into graph / opinion / swing substreams, so results are identical for
any worker count and for repeated runs.  By default every trial samples a
fresh graph ("annealed"); ``quenched=True`` fixes one graph across trials.

Reports are plain dataclasses; ``write_report`` emits bit-stable CSV (one
row per trial, aggregates in a sibling file) or a single JSON document with
a fixed key order.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dynamics import run
from .graph import Graph, estimate_jumbledness, sample_gnp
from .opinions import (
    CensusReport,
    OpinionModel,
    apply_swing,
    census,
    sample_fixed_discrepancy,
    sample_morning,
    sample_uniform,
)

SCHEMA_VERSION = 1

_GROWTH_DAYS = (0, 1, 2)
_ALPHA_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class PSpec:
    """Density given as coefficient * n**exponent * log(n)**log_power."""

    coefficient: float = 1.0
    exponent: float = 0.0
    log_power: float = 0.0

    def resolve(self, n: int) -> float:
        if n < 2:
            raise ValueError("regime densities need n >= 2")
        return self.coefficient * n ** self.exponent * math.log(n) ** self.log_power

    @classmethod
    def lower(cls, coefficient: float = 1.0) -> "PSpec":
        """coefficient * n^(-3/5) * log n, the sparse end of the regime."""
        return cls(coefficient, -0.6, 1.0)

    @classmethod
    def upper(cls, coefficient: float = 1.0) -> "PSpec":
        """coefficient * n^(-1/2), the dense end of the regime."""
        return cls(coefficient, -0.5, 0.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment depends on; hashable and picklable."""

    n: int
    p: float | None = None
    p_spec: PSpec | None = None
    trials: int = 1
    master_seed: int = 0
    model: OpinionModel = field(default_factory=OpinionModel)
    gamma: float | None = None
    c: float | None = None
    day_cap: int = 64
    quenched: bool = False
    workers: int = 1
    outputs: tuple[str, ...] = ()

    def resolved_p(self) -> float:
        if (self.p is None) == (self.p_spec is None):
            raise ValueError("exactly one of p and p_spec must be set")
        value = self.p if self.p is not None else self.p_spec.resolve(self.n)
        if not 0.0 < value <= 1.0:
            raise ValueError(f"resolved density {value} outside (0, 1]")
        return value

    def effective_c(self) -> float:
        if self.c is not None:
            return self.c
        return self.model.c

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.day_cap < 1:
            raise ValueError("day_cap must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.gamma is not None and self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.c is not None and self.c < 0:
            raise ValueError("swing coefficient must be non-negative")
        for fmt in self.outputs:
            if fmt not in ("csv", "json"):
                raise ValueError(f"unknown output format {fmt!r}")
        self.resolved_p()
        model = self.model
        if model.kind == "morning_evening" and self.c is not None:
            model = replace(model, c=self.c)
        model.validate(self.n)


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outcome; ``error`` is non-empty when the trial failed
    (failures are recorded, never fatal)."""

    index: int
    seed: int
    edge_count: int
    outcome: str
    sign: int
    period: int
    unanimity_day: int | None
    s0_bias: int
    final_bias: int
    days_simulated: int
    bias_by_day: tuple[int, ...]
    swing_count: int | None = None
    almost_positive: int | None = None
    unstable: int | None = None
    unstable_with_swing: int | None = None
    excess: int | None = None
    alpha_hat: float | None = None
    error: str = ""


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    trials: tuple[TrialRecord, ...]
    aggregates: dict


def _trial_seed_sequence(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def _census_for_trial(cfg: ExperimentConfig, g: Graph, r0, swing, p: float) -> CensusReport | None:
    if cfg.gamma is None or cfg.model.kind != "morning_evening":
        return None
    return census(g, r0, swing, cfg.gamma, p)


def _run_trial(cfg: ExperimentConfig, index: int, shared_graph: Graph | None = None) -> TrialRecord:
    ss = _trial_seed_sequence(cfg.master_seed, index)
    seed_id = int(ss.generate_state(1, np.uint64)[0])
    graph_ss, opinion_ss, swing_ss = ss.spawn(3)
    try:
        p = cfg.resolved_p()
        g = shared_graph if shared_graph is not None else sample_gnp(cfg.n, p, graph_ss)
        census_report = None
        swing_size = None
        if cfg.model.kind == "uniform":
            s0 = sample_uniform(cfg.n, opinion_ss)
        elif cfg.model.kind == "fixed_discrepancy":
            s0 = sample_fixed_discrepancy(cfg.n, cfg.model.d, opinion_ss)
        else:
            r0 = sample_morning(cfg.n, opinion_ss)
            s0, swing = apply_swing(r0, cfg.effective_c(), swing_ss)
            swing_size = int(swing.size)
            census_report = _census_for_trial(cfg, g, r0, swing, p)
        traj = run(g, s0, cfg.day_cap)
        out = traj.outcome
        record = TrialRecord(
            index=index,
            seed=seed_id,
            edge_count=g.edge_count,
            outcome=out.kind,
            sign=out.sign,
            period=out.period,
            unanimity_day=out.day if out.kind == "unanimous" else None,
            s0_bias=traj.days[0].bias,
            final_bias=traj.days[-1].bias,
            days_simulated=len(traj.days) - 1,
            bias_by_day=tuple(d.bias for d in traj.days),
            swing_count=swing_size,
        )
        if census_report is not None:
            record = replace(
                record,
                almost_positive=census_report.almost_positive,
                unstable=census_report.unstable,
                unstable_with_swing=census_report.unstable_with_swing,
                excess=census_report.excess,
                alpha_hat=census_report.excess / (p * cfg.n ** 1.5),
            )
        return record
    except Exception as exc:  # per-trial failures are data, not crashes
        return TrialRecord(
            index=index, seed=seed_id, edge_count=0, outcome="error", sign=0, period=0,
            unanimity_day=None, s0_bias=0, final_bias=0, days_simulated=0,
            bias_by_day=(), error=f"{type(exc).__name__}: {exc}",
        )


def _quantile(sorted_vals: list[float], q: float) -> float:
    """Linear-interpolation quantile on a pre-sorted list."""
    if not sorted_vals:
        raise ValueError("no values")
    pos = q * (len(sorted_vals) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    frac = pos - lo
    return sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac


def compute_aggregates(cfg: ExperimentConfig, trials: tuple[TrialRecord, ...]) -> dict:
    """Deterministic ordered reduction of the per-trial rows; recomputable
    from a written report."""
    agg: dict = {}
    agg["trials"] = len(trials)
    agg["errors"] = sum(1 for t in trials if t.outcome == "error")
    unanimous = [t for t in trials if t.outcome == "unanimous"]
    agg["unanimous"] = len(unanimous)
    agg["unanimity_fraction"] = len(unanimous) / len(trials)
    days = sorted(t.unanimity_day for t in unanimous)
    agg["median_unanimity_day"] = float(statistics.median(days)) if days else None
    signed = [t for t in unanimous if t.s0_bias != 0]
    agg["sign_match_fraction"] = (
        sum(1 for t in signed if t.sign == (1 if t.s0_bias > 0 else -1)) / len(signed)
        if signed
        else None
    )
    for day in _GROWTH_DAYS:
        ratios = []
        skipped = 0
        for t in trials:
            if t.outcome == "error" or len(t.bias_by_day) <= day + 1:
                continue
            b0, b1 = t.bias_by_day[day], t.bias_by_day[day + 1]
            if b0 == 0:
                skipped += 1
                continue
            ratios.append(abs(b1) / abs(b0))
        agg[f"growth_ratio_day{day}_median"] = float(statistics.median(ratios)) if ratios else None
        agg[f"growth_ratio_day{day}_used"] = len(ratios)
        agg[f"growth_ratio_day{day}_skipped_zero_bias"] = skipped
    alphas = sorted(t.alpha_hat for t in trials if t.alpha_hat is not None)
    if alphas:
        for q in _ALPHA_QUANTILES:
            agg[f"alpha_hat_q{int(q * 100):02d}"] = _quantile(alphas, q)
        agg["positive_excess_fraction"] = sum(1 for a in alphas if a > 0) / len(alphas)
    return agg


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run all trials and reduce; deterministic for any ``workers`` value."""
    cfg.validate()
    shared: Graph | None = None
    if cfg.quenched:
        graph_ss = _trial_seed_sequence(cfg.master_seed, cfg.trials)
        shared = sample_gnp(cfg.n, cfg.resolved_p(), graph_ss)
    if cfg.workers == 1:
        records = [_run_trial(cfg, i, shared) for i in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(
                pool.map(_run_trial, [cfg] * cfg.trials, range(cfg.trials), [shared] * cfg.trials)
            )
    trials = tuple(records)
    return ExperimentReport(cfg, trials, compute_aggregates(cfg, trials))


@dataclass(frozen=True)
class GrowthTable:
    """Median one-day bias amplification next to the sqrt(n*p) prediction."""

    rows: tuple[dict, ...]
    sqrt_np: float
    report: ExperimentReport


def growth_ratio_experiment(cfg: ExperimentConfig) -> GrowthTable:
    """Median |S_{t+1}| / |S_t| for t = 0, 1, 2 under iid uniform starts."""
    if cfg.model.kind != "uniform":
        raise ValueError("growth ratios are defined for the uniform model")
    report = run_experiment(cfg)
    sqrt_np = math.sqrt(cfg.n * cfg.resolved_p())
    rows = []
    for day in _GROWTH_DAYS:
        rows.append(
            {
                "day": day,
                "median_ratio": report.aggregates[f"growth_ratio_day{day}_median"],
                "sqrt_np": sqrt_np,
                "used": report.aggregates[f"growth_ratio_day{day}_used"],
                "skipped_zero_bias": report.aggregates[f"growth_ratio_day{day}_skipped_zero_bias"],
            }
        )
    return GrowthTable(tuple(rows), sqrt_np, report)


@dataclass(frozen=True)
class CensusTable:
    alpha_quantiles: dict
    positive_excess_fraction: float
    report: ExperimentReport


def census_experiment(cfg: ExperimentConfig) -> CensusTable:
    """Distribution of the almost-positive excess under the swung balanced
    model; requires gamma and a morning_evening model."""
    if cfg.model.kind != "morning_evening":
        raise ValueError("the census needs the morning_evening model")
    if cfg.gamma is None:
        raise ValueError("the census needs gamma")
    report = run_experiment(cfg)
    quantiles = {
        key: report.aggregates[key]
        for key in (f"alpha_hat_q{int(q * 100):02d}" for q in _ALPHA_QUANTILES)
    }
    return CensusTable(quantiles, report.aggregates["positive_excess_fraction"], report)


@dataclass(frozen=True)
class ContractionTable:
    """Minority decay after the bias first clears ``bias_floor``."""

    rows: tuple[dict, ...]
    bias_floor: int
    qualifying: int
    small_minority_fraction: float | None
    report: ExperimentReport


def contraction_experiment(cfg: ExperimentConfig, bias_floor: int) -> ContractionTable:
    """Track the losing side's share once |bias| reaches ``bias_floor``.

    For each trial with a day t* where |S_{t*}| >= bias_floor and a simulated
    next day, records the minority share on day t*+1 and whether the minority
    count ever grew afterwards.
    """
    if bias_floor < 1:
        raise ValueError("bias_floor must be positive")
    report = run_experiment(cfg)
    n = cfg.n
    rows = []
    small = 0
    for t in report.trials:
        if t.outcome == "error":
            continue
        t_star = next((d for d, b in enumerate(t.bias_by_day) if abs(b) >= bias_floor), None)
        if t_star is None or t_star + 1 >= len(t.bias_by_day):
            continue
        minority = [(n - abs(b)) // 2 for b in t.bias_by_day[t_star:]]
        share_next = minority[1] / n
        monotone = all(b <= a for a, b in zip(minority[1:], minority[2:]))
        rows.append(
            {
                "trial": t.index,
                "t_star": t_star,
                "minority_share_next": share_next,
                "minority_by_day": minority,
                "monotone_after_jump": monotone,
            }
        )
        if share_next <= 0.45:
            small += 1
    frac = small / len(rows) if rows else None
    return ContractionTable(tuple(rows), bias_floor, len(rows), frac, report)


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[dict, ...]


def bias_sweep(cfg: ExperimentConfig, d_values) -> SweepTable:
    """Unanimity probability as a function of the initial opinion sum d.

    Every d reuses the same master seed, so graphs are shared across the
    sweep and rows differ only through the initial states.
    """
    d_values = [int(d) for d in d_values]
    for d in d_values:
        if (cfg.n + d) % 2 != 0:
            raise ValueError(f"d={d} has the wrong parity for n={cfg.n}")
    rows = []
    for d in d_values:
        sub = replace(cfg, model=OpinionModel("fixed_discrepancy", d=d), gamma=None)
        report = run_experiment(sub)
        rows.append(
            {
                "d": d,
                "trials": cfg.trials,
                "unanimity_fraction": report.aggregates["unanimity_fraction"],
                "median_unanimity_day": report.aggregates["median_unanimity_day"],
                "positive_sign_fraction": (
                    sum(1 for t in report.trials if t.outcome == "unanimous" and t.sign > 0)
                    / max(report.aggregates["unanimous"], 1)
                ),
            }
        )
    return SweepTable(tuple(rows))


def auto_bias_floor(cfg: ExperimentConfig, pairs: int = 100) -> int:
    """Contraction floor ceil(8 * beta_hat / (p * sqrt(0.9))) from a sampled
    jumbledness witness on one pilot graph."""
    p = cfg.resolved_p()
    g = sample_gnp(cfg.n, p, _trial_seed_sequence(cfg.master_seed, cfg.trials + 1))
    est = estimate_jumbledness(g, p, pairs=pairs, seed=cfg.master_seed)
    return max(1, math.ceil(8.0 * est.beta_hat / (p * math.sqrt(0.9))))


# -- serialization ----------------------------------------------------------

def pspec_to_dict(spec: PSpec) -> dict:
    return {"coefficient": spec.coefficient, "exponent": spec.exponent, "log_power": spec.log_power}


def model_to_dict(model: OpinionModel) -> dict:
    out: dict = {"kind": model.kind}
    if model.kind == "fixed_discrepancy":
        out["d"] = model.d
    if model.kind == "morning_evening":
        out["c"] = model.c
    return out


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out: dict = {"n": cfg.n}
    if cfg.p is not None:
        out["p"] = cfg.p
    if cfg.p_spec is not None:
        out["p_spec"] = pspec_to_dict(cfg.p_spec)
    out["trials"] = cfg.trials
    out["master_seed"] = cfg.master_seed
    out["model"] = model_to_dict(cfg.model)
    if cfg.gamma is not None:
        out["gamma"] = cfg.gamma
    if cfg.c is not None:
        out["c"] = cfg.c
    out["day_cap"] = cfg.day_cap
    out["quenched"] = cfg.quenched
    # workers is deliberately not echoed: results are worker-count
    # independent, and reports must be byte-identical either way
    if cfg.outputs:
        out["outputs"] = list(cfg.outputs)
    return out


def _check_keys(data: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValueError(f"unknown {where} keys: {', '.join(unknown)}")


def config_from_dict(data: dict) -> ExperimentConfig:
    """Inverse of :func:`config_to_dict`; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ValueError("config must be a mapping")
    _check_keys(
        data,
        ("n", "p", "p_spec", "trials", "master_seed", "model", "gamma", "c",
         "day_cap", "quenched", "workers", "outputs"),
        "config",
    )
    if "n" not in data:
        raise ValueError("config requires n")
    p_spec = None
    if "p_spec" in data:
        _check_keys(data["p_spec"], ("coefficient", "exponent", "log_power"), "p_spec")
        p_spec = PSpec(**data["p_spec"])
    model = OpinionModel()
    if "model" in data:
        _check_keys(data["model"], ("kind", "d", "c", "seed"), "model")
        model = OpinionModel(**data["model"])
    return ExperimentConfig(
        n=int(data["n"]),
        p=data.get("p"),
        p_spec=p_spec,
        trials=int(data.get("trials", 1)),
        master_seed=int(data.get("master_seed", 0)),
        model=model,
        gamma=data.get("gamma"),
        c=data.get("c"),
        day_cap=int(data.get("day_cap", 64)),
        quenched=bool(data.get("quenched", False)),
        workers=int(data.get("workers", 1)),
        outputs=tuple(data.get("outputs", ())),
    )


def load_config(path) -> ExperimentConfig:
    """Read a JSON config file mirroring ExperimentConfig exactly."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        # keep the subclass (FileNotFoundError etc.) so callers can triage
        raise type(exc)(f"cannot read config from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid config file {path}: {exc}") from exc
    return config_from_dict(data)


def trial_to_dict(t: TrialRecord) -> dict:
    out: dict = {
        "index": t.index,
        "seed": t.seed,
        "edge_count": t.edge_count,
        "outcome": t.outcome,
        "sign": t.sign,
        "period": t.period,
        "unanimity_day": t.unanimity_day,
        "s0_bias": t.s0_bias,
        "final_bias": t.final_bias,
        "days_simulated": t.days_simulated,
        "bias_by_day": list(t.bias_by_day),
    }
    if t.swing_count is not None:
        out["swing_count"] = t.swing_count
        out["almost_positive"] = t.almost_positive
        out["unstable"] = t.unstable
        out["unstable_with_swing"] = t.unstable_with_swing
        out["excess"] = t.excess
        out["alpha_hat"] = t.alpha_hat
    if t.error:
        out["error"] = t.error
    return out


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config_to_dict(report.config),
        "trials": [trial_to_dict(t) for t in report.trials],
        "aggregates": report.aggregates,
    }


_CSV_COLUMNS = (
    "index", "seed", "edge_count", "outcome", "sign", "period", "unanimity_day",
    "s0_bias", "final_bias", "days_simulated", "bias_by_day", "swing_count",
    "almost_positive", "unstable", "unstable_with_swing", "excess", "alpha_hat",
    "error",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def aggregates_path(path) -> Path:
    """Sibling file carrying the aggregate rows of a CSV report."""
    p = Path(path)
    return p.with_name(p.stem + ".aggregates" + (p.suffix or ".csv"))


def write_report(report: ExperimentReport, path, fmt: str = "csv") -> list[Path]:
    """Write the report; returns the paths written.

    csv: one row per trial at ``path`` plus aggregates in a sibling
    ``*.aggregates.csv`` file.  json: one document.  Output is bit-stable
    for a fixed report.
    """
    path = Path(path)
    try:
        if fmt == "json":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                json.dump(report_to_dict(report), fh, indent=2, allow_nan=False)
                fh.write("\n")
            return [path]
        if fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(_CSV_COLUMNS)
                for t in report.trials:
                    writer.writerow(_csv_cell(getattr(t, col)) for col in _CSV_COLUMNS)
            agg_file = aggregates_path(path)
            with open(agg_file, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(("key", "value"))
                for key, value in report.aggregates.items():
                    writer.writerow((key, _csv_cell(value)))
            return [path, agg_file]
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    raise ValueError(f"unknown report format {fmt!r}")
