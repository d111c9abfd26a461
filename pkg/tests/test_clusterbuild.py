"""Cluster-factory success models: naive recursion, banked cascade, search."""

from __future__ import annotations

import math

import numpy as np
import pytest

from clusterchain.clusterbuild import (
    FusionSchedule,
    NaiveMultiplex,
    allocate_ghz_counts,
    build_schedule,
    fusion_probabilities,
    improved_pc1_exact,
    improved_pc1_mc,
    min_sources,
    naive_pc1,
    optimize_naive_multiplex,
    pcn,
    pcn_curve,
)
from clusterchain.errors import (
    CapTooSmallError,
    DesignInfeasibleError,
    InvalidConfigurationError,
    TargetUnreachableError,
)


def plain_schedule(k: int) -> FusionSchedule:
    """A schedule with no early-measured photons (hand-oracle scaffolding)."""
    leaves = 2**k
    return FusionSchedule(
        k=k, measured_mask=(False,) * leaves, weights=(1.0,) * leaves
    )


class TestNaiveMultiplex:
    def test_source_accounting(self):
        # 6 photons per GHZ attempt, doubling per fusion level
        assert NaiveMultiplex(n_b=2, n_ghz=3, n_meas=5).sources(2) == 6 * 15 * 16

    def test_validation(self):
        with pytest.raises(InvalidConfigurationError):
            NaiveMultiplex(n_b=0, n_ghz=1, n_meas=1)


class TestNaivePc1:
    def test_unmultiplexed_hand_formula(self, consts):
        # n_b = n_ghz = n_meas = 1, k = 1: the recursion collapses to the
        # plain product of one GHZ heralding, one fusion, and the survival
        # of the 4m+1 early-measured photons.
        m = 1
        p0 = consts.p_ghz
        q1 = (consts.eta_ghz * consts.p_chip) ** 2 / 2.0
        convert = (consts.eta_ghz * consts.p_chip**2) ** (4 * m + 1)
        expected = p0**2 * q1 * convert
        mux = NaiveMultiplex(n_b=1, n_ghz=1, n_meas=1)
        assert naive_pc1(mux, 1, m, consts) == pytest.approx(expected, rel=1e-12)

    def test_banked_equals_flattened_without_fanout(self, consts):
        # with a single attempt at the last fusion the two readings coincide
        mux = NaiveMultiplex(n_b=1, n_ghz=7, n_meas=4)
        banked = naive_pc1(mux, 1, 2, consts, formula="banked")
        flattened = naive_pc1(mux, 1, 2, consts, formula="flattened")
        assert banked == pytest.approx(flattened, rel=1e-14)

    def test_monotone_in_each_depth(self, consts):
        base = NaiveMultiplex(n_b=3, n_ghz=10, n_meas=5)
        val = naive_pc1(base, 3, 2, consts)
        for bump in (
            NaiveMultiplex(4, 10, 5),
            NaiveMultiplex(3, 11, 5),
            NaiveMultiplex(3, 10, 6),
        ):
            assert naive_pc1(bump, 3, 2, consts) > val

    def test_printed_formula_is_audit_only(self, consts):
        value = naive_pc1(
            NaiveMultiplex(2, 2, 2), 2, 1, consts, formula="printed"
        )
        assert 0.0 <= value <= 1.0

    def test_unknown_formula(self, consts):
        with pytest.raises(InvalidConfigurationError):
            naive_pc1(NaiveMultiplex(1, 1, 1), 1, 1, consts, formula="exotic")

    def test_bad_k(self, consts):
        with pytest.raises(InvalidConfigurationError):
            naive_pc1(NaiveMultiplex(1, 1, 1), 0, 1, consts)


class TestOptimizeNaive:
    def test_budget_too_small(self, consts):
        assert optimize_naive_multiplex(6 * 2**3 - 1, 3, 1, consts) == (None, 0.0)

    def test_stays_within_budget(self, consts):
        n_s = 10**6
        mux, best = optimize_naive_multiplex(n_s, 3, 2, consts)
        assert mux is not None
        assert mux.sources(3) <= n_s
        assert 0.0 < best <= 1.0
        assert best == pytest.approx(naive_pc1(mux, 3, 2, consts), rel=1e-12)

    def test_beats_sampled_alternatives(self, consts):
        n_s, k, m = 10**6, 3, 2
        _, best = optimize_naive_multiplex(n_s, k, m, consts)
        for g in range(1, 9):
            for meas in range(1, 9):
                budget = n_s // (6 * g * meas)
                if budget < 2**k:
                    continue
                n_b = 1
                while (2 * (n_b + 1)) ** k <= budget:
                    n_b += 1
                rival = naive_pc1(NaiveMultiplex(n_b, g, meas), k, m, consts)
                assert rival <= best + 1e-12


class TestAllocation:
    def test_largest_remainder_hand_case(self):
        # shares (1/3, 1/6, 1/3, 1/6) of 19: floors (6,3,6,3) leave one
        # unit, granted to the first of the two largest remainders
        out = allocate_ghz_counts(np.array([19]), np.array([2.0, 1.0, 2.0, 1.0]))
        assert out.tolist() == [[7, 3, 6, 3]]

    def test_exact_division(self):
        out = allocate_ghz_counts(np.array([8]), np.ones(4))
        assert out.tolist() == [[2, 2, 2, 2]]

    def test_rows_sum_to_input(self):
        rng = np.random.default_rng(1)
        x = rng.integers(0, 500, size=64)
        weights = rng.uniform(0.5, 3.0, size=16)
        out = allocate_ghz_counts(x, weights)
        np.testing.assert_array_equal(out.sum(axis=1), x)
        assert (out >= 0).all()

    def test_proportional_within_one_unit(self):
        weights = np.array([1.0, 1.0, 2.0])
        out = allocate_ghz_counts(np.array([1001]), weights)[0]
        exact = 1001 * weights / weights.sum()
        assert np.max(np.abs(out - exact)) < 1.0


class TestSchedule:
    def test_measured_leaves_spread(self, consts):
        sched = build_schedule(3, 1, consts)
        assert sched.leaf_banks == 8
        assert sched.measured_leaves == 5
        # floor(i * 8 / 5) for i = 0..4
        expected = {0, 1, 3, 4, 6}
        assert {i for i, f in enumerate(sched.measured_mask) if f} == expected
        heavy = 1.0 / (consts.p_chip * consts.eta_ghz)
        for flagged, weight in zip(sched.measured_mask, sched.weights):
            assert weight == (heavy if flagged else 1.0)

    def test_infeasible_design(self, consts):
        with pytest.raises(DesignInfeasibleError):
            build_schedule(2, 1, consts)  # 5 measured photons, 4 leaves

    def test_bad_m(self, consts):
        with pytest.raises(InvalidConfigurationError):
            build_schedule(3, 0, consts)

    def test_schedule_validation(self):
        with pytest.raises(InvalidConfigurationError):
            FusionSchedule(k=2, measured_mask=(False,) * 3, weights=(1.0,) * 4)
        with pytest.raises(InvalidConfigurationError):
            FusionSchedule(k=1, measured_mask=(False,) * 2, weights=(1.0, 0.0))
        with pytest.raises(InvalidConfigurationError):
            FusionSchedule(k=0, measured_mask=(), weights=())

    def test_fusion_probabilities(self, consts):
        probs = fusion_probabilities(2, consts)
        assert probs[0] == pytest.approx(
            (consts.eta_ghz * consts.p_chip**2) ** 2 * consts.boosted_pair_factor,
            rel=1e-14,
        )
        assert probs[1] == pytest.approx(
            (consts.eta_ghz * consts.p_chip**3) ** 2 * consts.boosted_pair_factor,
            rel=1e-14,
        )
        assert probs[0] > probs[1]  # deeper levels pay more feed-forward


class TestExactPropagation:
    def test_two_bank_hand_oracle(self, consts):
        # deterministic 5 GHZ states split (3, 2); the single fusion sees
        # min(3, 2) = 2 attempts, so P = 1 - (1 - p_1)^2
        p1 = fusion_probabilities(1, consts)[0]
        got = improved_pc1_exact(5, plain_schedule(1), consts, ghz_source=True)
        assert got == pytest.approx(1.0 - (1.0 - p1) ** 2, rel=1e-12)

    def test_perfect_fusions_reduce_to_allocation(self, consts):
        got = improved_pc1_exact(
            5, plain_schedule(1), consts, ghz_source=True, fusion_probs=[1.0]
        )
        assert got == pytest.approx(1.0)

    def test_monotone_in_sources(self, consts):
        sched = build_schedule(3, 1, consts)
        values = [improved_pc1_exact(n_s, sched, consts) for n_s in (600, 1200, 2400)]
        assert values[0] < values[1] < values[2]

    def test_zero_below_one_attempt(self, consts):
        assert improved_pc1_exact(5, build_schedule(3, 1, consts), consts) == 0.0

    def test_cap_too_small(self, consts):
        with pytest.raises(CapTooSmallError):
            improved_pc1_exact(10, plain_schedule(1), consts, cap=3, ghz_source=True)

    def test_generous_cap_matches_default(self, consts):
        sched = build_schedule(3, 1, consts)
        assert improved_pc1_exact(2000, sched, consts, cap=400) == pytest.approx(
            improved_pc1_exact(2000, sched, consts), rel=1e-12
        )

    def test_wrong_probability_count(self, consts):
        with pytest.raises(InvalidConfigurationError):
            improved_pc1_exact(
                100, plain_schedule(2), consts, fusion_probs=[0.5], ghz_source=True
            )


class TestMonteCarlo:
    def test_matches_exact_within_3_sigma(self, consts):
        trials = 40_000
        sched = build_schedule(3, 1, consts)
        exact = improved_pc1_exact(2000, sched, consts)
        est, _ = improved_pc1_mc(2000, sched, consts, trials=trials, seed=3)
        # z-score under the exact success probability (the MC's own standard
        # error degenerates to zero when every trial succeeds)
        se = math.sqrt(exact * (1.0 - exact) / trials)
        assert abs(est - exact) < 3 * se

    def test_deterministic_across_calls(self, consts):
        sched = build_schedule(3, 1, consts)
        a = improved_pc1_mc(1500, sched, consts, trials=30_000, seed=12)
        b = improved_pc1_mc(1500, sched, consts, trials=30_000, seed=12)
        assert a == b

    def test_seed_matters(self, consts):
        sched = build_schedule(3, 1, consts)
        a, _ = improved_pc1_mc(1500, sched, consts, trials=30_000, seed=12)
        b, _ = improved_pc1_mc(1500, sched, consts, trials=30_000, seed=13)
        assert a != b

    def test_validation(self, consts):
        sched = plain_schedule(1)
        with pytest.raises(InvalidConfigurationError):
            improved_pc1_mc(100, sched, consts, trials=0)
        with pytest.raises(InvalidConfigurationError):
            improved_pc1_mc(100, sched, consts, seed=-1)
        assert improved_pc1_mc(5, sched, consts) == (0.0, 0.0)


class TestPcn:
    def test_power(self):
        assert pcn(0.9, 2) == pytest.approx(0.81)
        assert pcn(1.0, 1000) == 1.0

    def test_validation(self):
        with pytest.raises(InvalidConfigurationError):
            pcn(1.5, 2)
        with pytest.raises(InvalidConfigurationError):
            pcn(0.5, 0)


@pytest.fixture(scope="module")
def improved_count(consts):
    """Threshold source count for the banked (m=4, {4,2}) node, 250 nodes."""
    return min_sources("improved", 7, 4, 250, 0.9, consts, method="exact")


class TestMinSources:
    def test_improved_reference_count(self, improved_count):
        assert improved_count == pytest.approx(3.2686e6, rel=0.02)

    def test_ghz_primitive_reference_count(self, consts):
        count = min_sources("ghz_primitive", 7, 4, 250, 0.9, consts, method="exact")
        assert count == pytest.approx(1.699e4, rel=0.02)

    def test_result_is_feasible_and_nearly_minimal(self, consts, improved_count):
        sched = build_schedule(7, 4, consts)
        assert pcn(improved_pc1_exact(improved_count, sched, consts), 250) >= 0.9
        assert (
            pcn(improved_pc1_exact(int(improved_count * 0.97), sched, consts), 250)
            < 0.9
        )

    def test_naive_reference_count(self, consts):
        count = min_sources("naive", 8, 8, 250, 0.9, consts)
        assert count == pytest.approx(2.255e11, rel=0.02)

    def test_ceiling_raises(self, consts):
        with pytest.raises(TargetUnreachableError):
            min_sources("improved", 7, 4, 250, 0.9, consts, ceiling=100)

    def test_validation(self, consts):
        with pytest.raises(InvalidConfigurationError):
            min_sources("improved", 7, 4, 250, 1.0, consts)
        with pytest.raises(InvalidConfigurationError):
            min_sources("improved", 7, 4, 0, 0.9, consts)
        with pytest.raises(InvalidConfigurationError):
            min_sources("unknown", 7, 4, 250, 0.9, consts)
        with pytest.raises(InvalidConfigurationError):
            min_sources("improved", 7, 4, 250, 0.9, consts, method="guess")


class TestPcnCurve:
    def test_monotone_and_consistent(self, consts):
        sched = build_schedule(3, 1, consts)
        counts = [600, 1200, 2400, 4800]
        curve = pcn_curve("improved", 3, 1, 5, consts, counts, method="exact")
        assert curve.shape == (4,)
        assert np.all(np.diff(curve) > 0)
        direct = pcn(improved_pc1_exact(1200, sched, consts), 5)
        assert curve[1] == pytest.approx(direct, rel=1e-12)
