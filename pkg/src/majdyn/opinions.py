"""Initial opinion assignments and the day-one neighborhood census.

Three initial models are supported: iid uniform signs, a fixed opinion sum
(exactly (n+d)/2 positives at random positions), and a balanced start with a
small "swing" perturbation: exactly ceil(n/2) positives, then round(c*sqrt(n))
uniformly chosen -1 vertices flipped to +1.

The census classifies vertices after one un-swung day: vertex v counts as
almost-positive when the signed sum of its neighbors' day-one opinions
exceeds -gamma * p^{3/2} * n (strict, nominal sampling density p), and as
unstable when its day-zero neighbor sum is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import OpinionVector, _neighbor_sums, _pack, majority_step
from .graph import Graph, _rng

MODEL_KINDS = ("uniform", "fixed_discrepancy", "morning_evening")


@dataclass(frozen=True)
class OpinionModel:
    """Which initial assignment to draw.

    d is the opinion sum for "fixed_discrepancy" (parity must match n);
    c scales the swing size for "morning_evening"; seed is only used when
    sampling outside an experiment (the harness derives per-trial seeds).
    """

    kind: str = "uniform"
    d: int = 0
    c: float = 0.0
    seed: int | None = None

    def validate(self, n: int) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown opinion model kind {self.kind!r}")
        if self.kind == "fixed_discrepancy":
            if abs(self.d) > n:
                raise ValueError("opinion sum magnitude cannot exceed n")
            if (n + self.d) % 2 != 0:
                raise ValueError("opinion sum parity must match n")
        if self.kind == "morning_evening":
            if self.c < 0:
                raise ValueError("swing coefficient must be non-negative")
            if swing_count(n, self.c) > n - (n + 1) // 2:
                raise ValueError("swing larger than the available -1 vertices")


def sample_uniform(n: int, seed) -> OpinionVector:
    """iid uniform +-1 opinions."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = _rng(seed)
    return _pack((2 * rng.integers(0, 2, size=n) - 1).astype(np.int8))


def _with_positives(n: int, k: int, rng) -> OpinionVector:
    signs = np.full(n, -1, dtype=np.int8)
    if k:
        signs[rng.choice(n, size=k, replace=False)] = 1
    return _pack(signs)


def sample_morning(n: int, seed) -> OpinionVector:
    """Balanced start: exactly ceil(n/2) positives at uniform positions."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _with_positives(n, (n + 1) // 2, _rng(seed))


def sample_fixed_discrepancy(n: int, d: int, seed) -> OpinionVector:
    """Exactly (n+d)/2 positives at uniform positions; d must have the
    parity of n."""
    OpinionModel("fixed_discrepancy", d=d).validate(n)
    return _with_positives(n, (n + d) // 2, _rng(seed))


def swing_count(n: int, c: float) -> int:
    """round(c*sqrt(n)) with half-up rounding."""
    return int(math.floor(c * math.sqrt(n) + 0.5))


def apply_swing(r0: OpinionVector, c: float, seed) -> tuple[OpinionVector, np.ndarray]:
    """Flip round(c*sqrt(n)) uniformly chosen -1 vertices of ``r0`` to +1.

    Returns the perturbed vector and the sorted flipped vertex ids.  Raises
    when fewer -1 vertices are available than the swing size.
    """
    if c < 0:
        raise ValueError("swing coefficient must be non-negative")
    k = swing_count(r0.n, c)
    signs = r0.signs()
    negatives = np.flatnonzero(signs < 0)
    if k > negatives.size:
        raise ValueError(f"swing of {k} exceeds the {negatives.size} available -1 vertices")
    if k == 0:
        return OpinionVector(r0.n, r0.bits.copy()), np.empty(0, dtype=np.int64)
    swing = np.sort(_rng(seed).choice(negatives, size=k, replace=False))
    signs[swing] = 1
    return _pack(signs), swing


def sample_initial(model: OpinionModel, n: int, seed) -> tuple[OpinionVector, np.ndarray | None]:
    """Draw a day-zero state for ``model``; for "morning_evening" the swing
    set is returned alongside (None for the other kinds)."""
    model.validate(n)
    if model.kind == "uniform":
        return sample_uniform(n, seed), None
    if model.kind == "fixed_discrepancy":
        return sample_fixed_discrepancy(n, model.d, seed), None
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    morning_seed, swing_seed = ss.spawn(2)
    r0 = sample_morning(n, morning_seed)
    swung, swing = apply_swing(r0, model.c, swing_seed)
    return swung, swing


@dataclass(frozen=True)
class CensusReport:
    """Day-one census counts; excess = almost_positive - ceil(n/2)."""

    gamma: float
    threshold: float
    almost_positive: int
    unstable: int
    unstable_with_swing: int
    excess: int


def census(g: Graph, r0: OpinionVector, swing_set, gamma: float, p: float) -> CensusReport:
    """Classify vertices after one day of the un-swung dynamics.

    The day-one state is one majority step from ``r0`` (the swing set plays
    no role in it); almost-positive uses the strict threshold
    -gamma * p^{3/2} * n with the nominal density ``p``.  Unstable vertices
    have day-zero neighbor sum exactly 0; ``unstable_with_swing`` counts the
    unstable vertices adjacent to at least one swing vertex.
    """
    if r0.n != g.n:
        raise ValueError("opinion vector does not match graph size")
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    swing = np.asarray(swing_set, dtype=np.int64)
    if swing.size and (swing.min() < 0 or swing.max() >= g.n):
        raise ValueError("swing vertex id out of range")
    r1 = majority_step(g, r0)
    sums1 = _neighbor_sums(g, r1.signs())
    threshold = -gamma * p ** 1.5 * g.n
    almost_positive = int(np.count_nonzero(sums1 > threshold))
    unstable_mask = _neighbor_sums(g, r0.signs()) == 0
    indicator = np.zeros(g.n, dtype=np.int32)
    indicator[swing] = 1
    touches_swing = (g._adjacency @ indicator) > 0
    return CensusReport(
        gamma=gamma,
        threshold=threshold,
        almost_positive=almost_positive,
        unstable=int(np.count_nonzero(unstable_mask)),
        unstable_with_swing=int(np.count_nonzero(unstable_mask & touches_swing)),
        excess=almost_positive - (g.n + 1) // 2,
    )


def day2_bias_experiment(g: Graph, c: float, seed) -> int:
    """Bias after two days started from a swung balanced state.

    Draws a fresh balanced state and swing from ``seed`` (two independent
    substreams), applies two majority steps, and returns the final opinion
    sum.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    morning_seed, swing_seed = ss.spawn(2)
    r0 = sample_morning(g.n, morning_seed)
    swung, _ = apply_swing(r0, c, swing_seed)
    s1 = majority_step(g, swung)
    s2 = majority_step(g, s1)
    return s2.bias()
