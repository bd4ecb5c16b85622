import math

import numpy as np
import pytest
from scipy.optimize import brentq

from beamcast.channel import RayleighModel
from beamcast.optimizer import exhaustive_two_user, homogeneous_policy, optimize, rate_of_probs
from beamcast.rate import feedback_load, policy_from_probs, sum_rate

from conftest import rayleigh_cdf


class TestHomogeneous:
    def test_ten_users(self):
        pol = homogeneous_policy(RayleighModel(1, 1.0), 10, 1.0)
        assert pol.n_users == 10
        assert all(t == pytest.approx(2.3025851, abs=1e-7) for t in pol.thresholds)

    def test_full_budget_means_zero_thresholds(self):
        assert homogeneous_policy(RayleighModel(2, 1.0), 3, 3.0).thresholds == (0.0, 0.0, 0.0)

    def test_two_beams_against_bisection(self):
        m = RayleighModel(2, 1.0)
        pol = homogeneous_policy(m, 2, 0.5)
        oracle = brentq(lambda x: rayleigh_cdf(x, 2, 1.0) - 0.75, 0, 50, xtol=1e-14)
        assert pol.thresholds[0] == pytest.approx(oracle, abs=1e-9)
        assert feedback_load(m, pol) == pytest.approx(0.5, abs=1e-9)

    def test_budget_checks(self):
        m = RayleighModel(1, 1.0)
        for n, lam in ((2, 0.0), (2, 2.5), (0, 0.5)):
            with pytest.raises(ValueError):
                homogeneous_policy(m, n, lam)


class TestOptimize:
    def test_multi_beam_optimum_is_uniform(self):
        res = optimize(RayleighModel(2, 1.0), 4, 1.0)
        assert np.max(np.abs(np.array(res.best_p) - 0.25)) < 1e-3
        assert res.converged

    def test_full_budget(self):
        res = optimize(RayleighModel(1, 5.0), 3, 3.0, starts=2)
        assert res.best_p == (1.0, 1.0, 1.0)

    def test_single_user(self):
        m = RayleighModel(2, 1.0)
        res = optimize(m, 1, 0.3, starts=1)
        assert res.best_p[0] == pytest.approx(0.3, abs=1e-12)
        assert res.best_thresholds.thresholds[0] == pytest.approx(m.inv_sf(0.3))

    def test_single_beam_high_snr_matches_brute_force(self):
        m = RayleighModel(1, 10.0)
        lam = 0.5
        res = optimize(m, 2, lam)
        scan = exhaustive_two_user(m, lam, 2001)
        assert res.best_rate >= res.homogeneous_rate
        assert res.best_rate > res.homogeneous_rate + 1e-4
        assert res.best_rate >= scan.best_rate - 1e-8
        assert min(res.best_p) == pytest.approx(scan.best_q, abs=2 * scan.grid_step)

    def test_low_budget_case_stays_homogeneous(self):
        # at lam = 0.2 the two-user profile still peaks at the equal split
        m = RayleighModel(1, 10.0)
        res = optimize(m, 2, 0.2)
        scan = exhaustive_two_user(m, 0.2, 2001)
        assert res.best_rate >= res.homogeneous_rate
        assert res.best_rate == pytest.approx(scan.best_rate, abs=1e-9)

    def test_result_invariants(self, rng):
        for _ in range(3):
            m = RayleighModel(int(rng.integers(1, 4)), float(10 ** rng.uniform(-0.5, 1.2)))
            n = int(rng.integers(2, 4))
            lam = float(rng.uniform(0.2, n - 0.1))
            res = optimize(m, n, lam, starts=3, seed=int(rng.integers(1 << 30)))
            assert res.load <= lam + 1e-9
            assert res.best_rate == pytest.approx(sum_rate(m, res.best_thresholds), abs=1e-9)
            assert res.best_rate >= res.homogeneous_rate
            for p, r in res.trace:
                assert sum(p) <= lam + 1e-9
                assert all(0.0 <= v <= 1.0 for v in p)
            # budget is spent
            assert sum(res.best_p) == pytest.approx(lam, abs=1e-6)
            # spending a little more budget (projected back) does not help
            scaled = np.minimum(np.array(res.best_p) * (1 + 1e-3), 1.0)
            scaled *= min(1.0, lam / scaled.sum())
            assert rate_of_probs(m, scaled) <= res.best_rate + 1e-9

    @pytest.mark.parametrize("n,lam", [(2, 0.5), (3, 1.0)])
    def test_uniform_for_condition_satisfying_models(self, n, lam):
        res = optimize(RayleighModel(3, 2.0), n, lam, starts=3)
        assert np.max(np.abs(np.array(res.best_p) - lam / n)) < 1e-3


class TestExhaustive:
    def test_schur_concave_model_peaks_at_equal_split(self):
        scan = exhaustive_two_user(RayleighModel(2, 1.0), 0.4, 201)
        assert abs(scan.best_q - 0.2) <= scan.grid_step + 1e-15
        assert np.all(np.diff(scan.rate) >= -1e-10)

    def test_small_budget_small_rate(self):
        scan = exhaustive_two_user(RayleighModel(1, 1.0), 1e-6, 11)
        assert np.all(scan.rate < 1e-4)

    def test_grid_covers_admissible_range(self):
        scan = exhaustive_two_user(RayleighModel(1, 1.0), 1.5, 11)
        assert scan.q[0] == pytest.approx(0.5) and scan.q[-1] == pytest.approx(0.75)
        assert scan.rate.size == 11

    def test_argument_checks(self):
        m = RayleighModel(1, 1.0)
        with pytest.raises(ValueError):
            exhaustive_two_user(m, 2.5)
        with pytest.raises(ValueError):
            exhaustive_two_user(m, 0.5, grid_points=5)
