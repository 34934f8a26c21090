"""Exact oracles: path enumeration, rational DPs, truncated W expectations."""

import math
from fractions import Fraction

import numpy as np
import pytest

from combrange import _kernels, oracle, walk1d
from combrange.comb import Site
from combrange.errors import SizeLimitError
from combrange.simulator import class_bounds


class TestStepsOracle:
    def test_trivial_values(self):
        assert oracle.exact_expected_visited(0) == 1
        assert oracle.exact_expected_visited(1) == 2

    def test_two_steps(self):
        assert oracle.exact_expected_visited(2) == Fraction(21, 8)

    def test_rejects_above_limit(self):
        with pytest.raises(SizeLimitError):
            oracle.exact_expected_visited(15)

    def test_total_weight_is_one(self):
        for n in range(9):
            assert oracle.path_weight_total(n) == 1

    def test_neighbor_order_invariance(self):
        for n in (3, 6):
            base = oracle.exact_expected_visited(n)
            assert oracle.exact_expected_visited(n, backbone_order=(3, 1, 0, 2)) == base
            assert oracle.exact_expected_visited(n, backbone_order=(2, 3, 1, 0)) == base

    def test_monotone_in_n(self):
        vals = [oracle.exact_expected_visited(n) for n in range(9)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestPositionDistribution:
    def test_examples(self):
        assert oracle.exact_position_distribution_1d(0) == {0: Fraction(1)}
        d2 = oracle.exact_position_distribution_1d(2)
        assert d2 == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}

    def test_matches_p_exact_everywhere(self):
        for n in (1, 5, 17, 42, 60):
            dist = oracle.exact_position_distribution_1d(n)
            assert sum(dist.values()) == 1
            for i in range(-n - 1, n + 2):
                assert dist.get(i, Fraction(0)) == walk1d.p_exact_fraction(n, i)

    def test_rejects_above_limit(self):
        with pytest.raises(SizeLimitError):
            oracle.exact_position_distribution_1d(61)


class TestWOracle:
    def test_limits(self):
        with pytest.raises(SizeLimitError):
            oracle.exact_expected_visited_W(0)
        with pytest.raises(SizeLimitError):
            oracle.exact_expected_visited_W(7)

    def test_value_at_least_two(self):
        res = oracle.exact_expected_visited_W(1)
        assert res.value >= 2

    def test_truncation_bookkeeping_n1(self):
        res = oracle.exact_expected_visited_W(1)
        # exactly one horizontal run, so the dropped mass is exactly 2^-40
        assert res.truncated_mass == Fraction(1, 2**40)
        assert res.truncated_mass < Fraction(1, 2**38)
        assert res.error_bound < Fraction(1, 10**9)
        assert res.error_bound >= res.truncated_mass

    def test_against_independent_construction_n1(self):
        # V'_1 = range of the horizontal run + the one new tooth site, so
        # E = sum_l 2^-(l+1) E[B_l] + 1 (up to the kept-mass factor)
        res = oracle.exact_expected_visited_W(1)
        kept = 1 - Fraction(1, 2**40)
        indep = float(kept) + sum(
            2.0 ** -(l + 1) * walk1d.expected_range_dp(l) for l in range(40)
        )
        assert float(res.value) == pytest.approx(indep, abs=1e-12)

    def test_second_vertical_adds_half_site(self):
        # from +-1 the second vertical move finds a new site iff it moves
        # outward (probability 1/2)
        v1 = oracle.exact_expected_visited_W(1).value
        v2 = oracle.exact_expected_visited_W(2).value
        assert v2 - v1 == pytest.approx(Fraction(1, 2), abs=1e-10)

    def test_mean_sojourns_match_origin_visits(self):
        # the number of backbone sojourns is distributed as the origin
        # visits of the vertical reduced walk over its first n-1 steps
        for n in range(1, 7):
            mean_d = sum(w * d for w, d, _ in oracle._vertical_profiles(n))
            assert float(mean_d) == pytest.approx(
                walk1d.expected_visits_origin(n - 1), abs=1e-12
            )

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_monte_carlo_agreement(self, n):
        reps = 2 * 10**5
        cl, fl = class_bounds(n)
        out = np.empty((reps, _kernels.N_STATS), np.int64)
        _kernels.walk_block(np.uint64(5000 + n), 0, reps, _kernels.MODE_VERTICAL,
                            n, cl, fl, False, 0, 0, out)
        v = out[:, 0].astype(float)
        mean = v.mean()
        se = v.std(ddof=1) / math.sqrt(reps)
        target = float(oracle.exact_expected_visited_W(n).value)
        assert abs(mean - target) < 4 * se, (n, mean, target, se)


class TestReachProbability:
    def test_closed_form_first_tooth_site(self):
        # P(reach (0,1) within one vertical move) = (1/2) P(run sum = 0)
        # = (1/2) sum_l 2^-(l+1) p_{l,0} -> 1/(2 sqrt 3) untruncated
        res = oracle.exact_reach_probability(1, Site(0, 1))
        closed = 1.0 / (2.0 * math.sqrt(3.0))
        assert abs(float(res.value) - closed) <= float(res.truncated_mass) + 1e-15
        assert res.error_bound == res.truncated_mass

    def test_origin_always_reached(self):
        res = oracle.exact_reach_probability(3, Site(0, 0))
        assert 1 - res.value <= res.truncated_mass

    def test_sign_symmetry(self):
        up = oracle.exact_reach_probability(3, Site(0, 2))
        down = oracle.exact_reach_probability(3, Site(0, -2))
        assert up.value == down.value

    def test_unreachable_heights(self):
        res = oracle.exact_reach_probability(2, Site(0, 3))
        assert res.value == 0

    @pytest.mark.parametrize("n,target", [(1, Site(0, 1)), (3, Site(0, 2)),
                                          (3, Site(1, 0)), (2, Site(-1, -1))])
    def test_monte_carlo_agreement(self, n, target):
        reps = 2 * 10**5
        cl, fl = class_bounds(n)
        out = np.empty((reps, _kernels.N_STATS), np.int64)
        _kernels.walk_block(np.uint64(8800 + n), 0, reps, _kernels.MODE_VERTICAL,
                            n, cl, fl, True, target.x, target.y, out)
        p = out[:, 12].mean()
        se = math.sqrt(max(p * (1 - p), 1e-12) / reps)
        exact = float(oracle.exact_reach_probability(n, target).value)
        assert abs(p - exact) < 4 * se, (n, target, p, exact)


def test_oracle_simulator_agreement_small_sweep():
    # quick twin of acceptance criterion 1 at lower replication
    reps = 10**5
    for n in range(1, 11):
        cl, fl = class_bounds(n)
        out = np.empty((reps, _kernels.N_STATS), np.int64)
        _kernels.walk_block(np.uint64(300 + n), 0, reps, _kernels.MODE_STEPS,
                            n, cl, fl, False, 0, 0, out)
        v = out[:, 0].astype(float)
        mean = v.mean()
        se = v.std(ddof=1) / math.sqrt(reps)
        target = float(oracle.exact_expected_visited(n))
        if se == 0:
            assert mean == target
        else:
            assert abs(mean - target) < 4 * se, (n, mean, target)
