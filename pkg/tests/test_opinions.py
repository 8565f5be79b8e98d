"""Initial opinion models, swing perturbation, and census tests.

The path census expectations are worked out by hand: with r0 = (+,-,+) the
day-one state is (-,+,-), the end vertices see +1 and the center sees -2,
and the gamma=1, p=0.5 threshold is -3/(2*sqrt(2)) ~ -1.06.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete_graph, empty_graph, path_graph
from majdyn import (
    OpinionModel,
    OpinionVector,
    apply_swing,
    census,
    day2_bias_experiment,
    majority_step,
    psi,
    run,
    sample_fixed_discrepancy,
    sample_gnp,
    sample_initial,
    sample_morning,
    sample_uniform,
    swing_count,
)


class TestSampleUniform:
    def test_single_vertex(self):
        assert sample_uniform(1, 0).bias() in (-1, 1)

    def test_deterministic(self):
        assert sample_uniform(50, 3) == sample_uniform(50, 3)

    def test_deviation_probability_matches_normal_tail(self):
        # P[|bias| >= sqrt(n)] tends to 2*psi(1) for iid signs
        n, reps = 10**4, 200
        hits = sum(1 for s in range(reps) if abs(sample_uniform(n, s).bias()) >= math.sqrt(n))
        assert abs(hits / reps - 2.0 * psi(1.0)) <= 0.1

    def test_mean_bias_near_zero(self):
        n, reps = 10**4, 200
        mean = np.mean([sample_uniform(n, s).bias() for s in range(reps)])
        assert abs(mean) <= 4.0 * math.sqrt(n / reps)


class TestSampleMorning:
    def test_exact_positive_count(self):
        for n in (1, 2, 5, 100, 101):
            s = sample_morning(n, 9)
            assert s.positives() == (n + 1) // 2

    def test_bias_parity(self):
        assert sample_morning(4, 0).bias() == 0
        assert sample_morning(5, 0).bias() == 1

    def test_positions_vary_with_seed(self):
        assert sample_morning(100, 1) != sample_morning(100, 2)


class TestFixedDiscrepancy:
    def test_exact_bias(self):
        for d in (-4, 0, 2, 100):
            assert sample_fixed_discrepancy(100, d, 5).bias() == d

    def test_rejects_parity_mismatch(self):
        with pytest.raises(ValueError):
            sample_fixed_discrepancy(100, 3, 0)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            sample_fixed_discrepancy(10, 12, 0)


class TestApplySwing:
    def test_swing_count_rounding(self):
        assert swing_count(100, 1.0) == 10
        assert swing_count(10**4, 0.5) == 50
        assert swing_count(2, 1.0) == 1  # sqrt(2) ~ 1.41 rounds to 1

    def test_c_zero_is_identity(self):
        r0 = sample_morning(64, 3)
        swung, swing = apply_swing(r0, 0.0, 4)
        assert swung == r0
        assert swing.size == 0

    def test_flips_exactly_the_swing_set(self):
        r0 = sample_morning(100, 3)
        swung, swing = apply_swing(r0, 1.0, 4)
        assert swing.size == 10
        assert swung.bias() == r0.bias() + 20
        base, new = r0.signs(), swung.signs()
        assert np.all(base[swing] == -1)
        assert np.all(new[swing] == 1)
        untouched = np.setdiff1d(np.arange(100), swing)
        assert np.array_equal(base[untouched], new[untouched])

    def test_rejects_when_not_enough_negatives(self):
        all_plus = OpinionVector.from_signs(np.ones(100, dtype=np.int8))
        with pytest.raises(ValueError):
            apply_swing(all_plus, 1.0, 0)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**31))
    def test_swing_never_decreases_later_bias(self, seed):
        # coordinatewise monotone dynamics: the swung run dominates daywise
        n = 60
        g = sample_gnp(n, 0.15, seed)
        r0 = sample_morning(n, seed + 1)
        swung, _ = apply_swing(r0, 1.0, seed + 2)
        plain, pert = r0, swung
        for _ in range(5):
            assert pert.bias() >= plain.bias()
            plain = majority_step(g, plain)
            pert = majority_step(g, pert)


class TestSampleInitial:
    def test_uniform_kind(self):
        s, swing = sample_initial(OpinionModel("uniform"), 50, 1)
        assert swing is None
        assert s.n == 50

    def test_fixed_kind(self):
        s, swing = sample_initial(OpinionModel("fixed_discrepancy", d=4), 50, 1)
        assert swing is None
        assert s.bias() == 4

    def test_morning_kind(self):
        s, swing = sample_initial(OpinionModel("morning_evening", c=1.0), 100, 1)
        assert swing is not None and swing.size == 10
        assert s.bias() == 20  # ceil(n/2) positives plus 10 flips

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            sample_initial(OpinionModel("coin"), 10, 0)


class TestCensus:
    def test_path_hand_computed(self):
        g = path_graph(3)
        r0 = OpinionVector.from_signs(np.array([1, -1, 1]))
        rep = census(g, r0, np.array([], dtype=np.int64), gamma=1.0, p=0.5)
        assert rep.threshold == pytest.approx(-3.0 / (2.0 * math.sqrt(2.0)))
        assert rep.almost_positive == 2  # day-one sums (+1, -2, +1) vs -1.06
        assert rep.unstable == 0
        assert rep.unstable_with_swing == 0
        assert rep.excess == 0

    def test_empty_graph_counts(self):
        n = 101
        g = empty_graph(n)
        r0 = sample_morning(n, 0)
        swung, swing = apply_swing(r0, 1.0, 1)
        rep = census(g, r0, swing, gamma=0.5, p=0.3)
        assert rep.almost_positive == n  # all sums are 0 > negative threshold
        assert rep.unstable == n
        assert rep.unstable_with_swing == 0  # nobody has neighbors
        assert rep.excess == n - (n + 1) // 2

    def test_unstable_with_swing_requires_adjacency(self):
        # 0-1-2 path with r0 = (+,+,-): day-zero sums are (1, 0, 1), so
        # vertex 1 is the only unstable vertex and its neighbors are 0 and 2
        g = path_graph(3)
        r0 = OpinionVector.from_signs(np.array([1, 1, -1]))
        rep = census(g, r0, np.array([0]), gamma=0.1, p=0.5)
        assert rep.unstable == 1
        assert rep.unstable_with_swing == 1  # vertex 1 is adjacent to swing vertex 0
        rep = census(g, r0, np.array([2]), gamma=0.1, p=0.5)
        assert rep.unstable_with_swing == 1
        rep = census(g, r0, np.array([], dtype=np.int64), gamma=0.1, p=0.5)
        assert rep.unstable_with_swing == 0

    def test_gamma_zero_uses_strict_positive(self):
        # all day-one sums are 0 on the empty graph: strictly > 0 fails
        g = empty_graph(4)
        r0 = OpinionVector.from_signs(np.array([1, 1, -1, -1]))
        rep = census(g, r0, np.array([], dtype=np.int64), gamma=0.0, p=0.5)
        assert rep.almost_positive == 0

    def test_threshold_monotone_in_gamma(self):
        g = sample_gnp(300, 0.05, 21)
        r0 = sample_morning(300, 22)
        low = census(g, r0, np.array([], dtype=np.int64), gamma=0.1, p=0.05)
        high = census(g, r0, np.array([], dtype=np.int64), gamma=0.5, p=0.05)
        assert high.almost_positive >= low.almost_positive

    def test_day_one_state_matches_majority_step(self):
        g = sample_gnp(150, 0.08, 31)
        r0 = sample_morning(150, 32)
        r1 = majority_step(g, r0)
        signs1 = r1.signs()
        gamma, p = 0.2, 0.08
        threshold = -gamma * p**1.5 * g.n
        expected = sum(
            1 for v in range(g.n) if signs1[g.neighbors_of(v)].sum() > threshold
        )
        rep = census(g, r0, np.array([], dtype=np.int64), gamma=gamma, p=p)
        assert rep.almost_positive == expected

    def test_rejects_bad_arguments(self):
        g = path_graph(3)
        r0 = OpinionVector.from_signs(np.array([1, -1, 1]))
        with pytest.raises(ValueError):
            census(g, r0, [], gamma=-1.0, p=0.5)
        with pytest.raises(ValueError):
            census(g, r0, [], gamma=0.5, p=0.0)
        with pytest.raises(ValueError):
            census(g, r0, [5], gamma=0.5, p=0.5)


class TestDay2Bias:
    def test_complete_graph_goes_unanimous(self):
        # bias 20 at day 0 makes every neighbor sum positive: all +1 by day 1
        assert day2_bias_experiment(complete_graph(100), 1.0, 7) == 100

    def test_empty_graph_keeps_swing_bias(self):
        assert day2_bias_experiment(empty_graph(100), 1.0, 7) == 20

    def test_gnp_amplification_pilot(self):
        # pilot-pinned: two days from a swung balanced start at n=1e4,
        # p=0.02 lands far beyond the swing alone
        n, p, c = 10**4, 0.02, 1.0
        floor = 0.1 * p * n**1.5
        biases = [
            day2_bias_experiment(sample_gnp(n, p, 1000 + t), c, 2000 + t) for t in range(50)
        ]
        positive = sum(1 for b in biases if b > 0)
        assert positive >= 45
        assert float(np.median(biases)) >= floor
