"""Estimator: seeding discipline, aggregation, thread invariance, calibration."""

import math

import numpy as np
import pytest

from combrange.comb import Site
from combrange.estimator import (
    Diagnostics,
    ExperimentConfig,
    estimate_range_1d,
    estimate_ruin_frequency,
    estimate_u_j,
    merge_summaries,
    replicate_seed,
    run_experiment,
    run_summaries,
    summarize,
)
from combrange.simulator import StopRule
from combrange.walk1d import expected_visits_origin, ruin_probability


def cfg_for(seed, reps, rule):
    return ExperimentConfig(master_seed=seed, replicates=reps, rule=rule)


class TestConfig:
    def test_rejects_zero_replicates(self):
        with pytest.raises(ValueError):
            ExperimentConfig(master_seed=1, replicates=0,
                             rule=StopRule.after_steps(1))

    def test_rejects_zero_limit(self):
        with pytest.raises(ValueError):
            StopRule.after_steps(0)

    def test_unknown_statistic(self):
        cfg = cfg_for(1, 10, StopRule.after_steps(1))
        with pytest.raises(ValueError):
            run_experiment(cfg, "nope")


class TestAggregation:
    def test_merge_matches_single_pass(self):
        rng = np.random.default_rng(7)
        data = rng.normal(50.0, 12.0, size=10001)
        whole = summarize(data)
        for cut in (1, 137, 5000, 10000):
            merged = merge_summaries(summarize(data[:cut]), summarize(data[cut:]))
            assert merged.count == whole.count
            assert merged.mean == pytest.approx(whole.mean, rel=1e-12)
            assert merged.m2 == pytest.approx(whole.m2, rel=1e-9)
            assert merged.min == whole.min and merged.max == whole.max

    def test_merge_associative(self):
        rng = np.random.default_rng(8)
        a, b, c = (summarize(rng.normal(size=100)) for _ in range(3))
        left = merge_summaries(merge_summaries(a, b), c)
        right = merge_summaries(a, merge_summaries(b, c))
        assert left.count == right.count
        assert left.mean == pytest.approx(right.mean, rel=1e-12)
        assert left.m2 == pytest.approx(right.m2, rel=1e-9)

    def test_estimate_invariants(self):
        cfg = cfg_for(11, 5000, StopRule.after_steps(20))
        e = run_experiment(cfg, "visited_sites")
        assert e.min <= e.mean <= e.max
        assert e.stderr > 0
        assert e.replicates == 5000


class TestDeterminism:
    def test_repeat_is_bit_identical(self):
        cfg = cfg_for(99, 20000, StopRule.after_steps(50))
        assert run_experiment(cfg, "visited_sites") == run_experiment(cfg, "visited_sites")

    def test_worker_count_does_not_matter(self):
        cfg = cfg_for(4242, 30000, StopRule.after_vertical_moves(60))
        stats = ("visited_sites", "horizontal_moves", "backbone_sites",
                 "backbone_entries", "far_sites")
        results = [run_summaries(cfg, stats, threads=k) for k in (1, 2, 3, 8)]
        assert all(r == results[0] for r in results[1:])

    def test_seed_changes_result(self):
        rule = StopRule.after_steps(100)
        a = run_experiment(cfg_for(1, 4000, rule), "visited_sites")
        b = run_experiment(cfg_for(2, 4000, rule), "visited_sites")
        assert a.mean != b.mean


class TestKnownValues:
    def test_after_steps_1_is_exactly_two(self):
        e = run_experiment(cfg_for(5, 10**4, StopRule.after_steps(1)), "visited_sites")
        assert e.mean == 2.0 and e.stderr == 0.0

    def test_after_steps_2_matches_oracle(self):
        e = run_experiment(cfg_for(6, 2 * 10**5, StopRule.after_steps(2)), "visited_sites")
        assert abs(e.mean - 2.625) < 4 * e.stderr

    def test_lemma_identity_midsize(self):
        # horizontal moves of the n-vertical-move walk average A_{n-1}
        n = 1000
        e = run_experiment(cfg_for(13, 3 * 10**4, StopRule.after_vertical_moves(n)),
                           "horizontal_moves")
        target = expected_visits_origin(n - 1)
        assert abs(e.mean - target) < 4 * e.stderr


class TestTargets:
    def test_u_0_is_one(self):
        cfg = cfg_for(3, 2000, StopRule.after_vertical_moves(5))
        est = estimate_u_j(5, 0, cfg)
        assert est.mean == 1.0 and est.stderr == 0.0

    def test_u_j_decreases_in_j(self):
        cfg = cfg_for(14, 2 * 10**4, StopRule.after_vertical_moves(100))
        u = {j: estimate_u_j(100, j, cfg) for j in (1, 4, 16)}
        assert u[1].mean > u[4].mean > u[16].mean

    def test_diagnostics_target_equivalent(self):
        cfg = ExperimentConfig(
            master_seed=21, replicates=5000,
            rule=StopRule.after_vertical_moves(10),
            diagnostics=Diagnostics(target=Site(0, 2)),
        )
        direct = run_experiment(cfg, "reached")
        via_u = estimate_u_j(10, 2, cfg)
        assert direct.mean == via_u.mean


class TestRuinCalibration:
    def test_frequency_matches_formula(self):
        for j in (1, 2, 5):
            cfg = cfg_for(700 + j, 10**5, StopRule.after_steps(1))
            e = estimate_ruin_frequency(j, cfg)
            assert abs(e.mean - ruin_probability(j)) < 4 * e.stderr, j

    def test_ci_coverage_smoke(self):
        # 3-sigma binomial intervals should cover p = 1/4 nearly always
        p = 0.25
        covered = 0
        for k in range(100):
            cfg = cfg_for(9000 + k, 10**4, StopRule.after_steps(1))
            e = estimate_ruin_frequency(2, cfg)
            if abs(e.mean - p) <= 3 * e.stderr:
                covered += 1
        assert covered >= 95


def test_range_1d_estimator_matches_dp():
    from combrange.walk1d import expected_range_dp

    cfg = cfg_for(31, 2 * 10**4, StopRule.after_steps(1))
    e = estimate_range_1d(400, cfg)
    assert abs(e.mean - expected_range_dp(400)) < 4 * e.stderr
