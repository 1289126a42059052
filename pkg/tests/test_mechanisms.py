import math

import numpy as np
import pytest
from scipy import stats

from coverdp.mechanisms import (
    NoiseSource,
    PrivacyBudget,
    SearchCalibration,
    approx_dp_to_zcdp,
    calibrate_noisy_search,
    exponential_mechanism,
    exponential_mechanism_distribution,
    gaussian_query,
    group_privacy_bound,
    noisy_binary_search,
    zcdp_to_approx_dp,
)


class TestPrivacyBudget:
    def test_flavors_validate(self):
        PrivacyBudget.pure(1.0, 0.1)
        PrivacyBudget.approx(1.0, 1e-6, 0.1)
        PrivacyBudget.zcdp(0.5, 0.1)
        with pytest.raises(ValueError):
            PrivacyBudget.pure(-1.0, 0.1)
        with pytest.raises(ValueError):
            PrivacyBudget.approx(1.0, 2.0, 0.1)
        with pytest.raises(ValueError):
            PrivacyBudget.zcdp(0.5, 1.5)

    def test_approx_budget_maps_to_concentrated(self):
        budget = PrivacyBudget.approx(1.0, 1e-6, 0.1)
        rho = budget.effective_rho()
        assert zcdp_to_approx_dp(rho, 1e-6) == pytest.approx(1.0, rel=1e-9)


class TestNoiseSource:
    def test_same_seed_same_stream(self):
        a, b = NoiseSource(123), NoiseSource(123)
        assert [a.uniform() for _ in range(20)] == [b.uniform() for _ in range(20)]
        assert a.gaussian(2.0) == b.gaussian(2.0)
        assert a.position == b.position

    def test_uniforms_strictly_inside_unit_interval(self):
        rng = NoiseSource(0)
        draws = [rng.uniform() for _ in range(1000)]
        assert all(0.0 < u < 1.0 for u in draws)


class TestGaussianQuery:
    def test_tiny_sigma_is_nearly_exact(self):
        rng = NoiseSource(5)
        assert gaussian_query(5.0, 1e-9, rng) == pytest.approx(5.0, abs=1e-6)

    def test_empirical_mean(self):
        rng = NoiseSource(7)
        draws = np.array([gaussian_query(0.0, 1.0, rng) for _ in range(100_000)])
        assert abs(draws.mean()) < 0.02
        assert abs(draws.std() - 1.0) < 0.02

    def test_threshold_crossing_law(self):
        # indicator of exceeding the target is Bernoulli with the normal tail mass
        rng = NoiseSource(11)
        tau, ell, sigma = 3.0, 3.0, 2.0
        exceed = np.mean(
            [gaussian_query(ell, sigma, rng) > tau for _ in range(40_000)]
        )
        assert exceed == pytest.approx(0.5, abs=0.01)
        shifted = np.mean(
            [gaussian_query(ell + 1.0, sigma, rng) > tau for _ in range(40_000)]
        )
        assert shifted == pytest.approx(stats.norm.sf((tau - ell - 1.0) / sigma), abs=0.01)


class TestExponentialMechanism:
    def test_equal_scores_give_uniform(self):
        probs = exponential_mechanism_distribution([3, 3, 3, 3], 1.0, 1.0)
        assert np.allclose(probs, 0.25)

    def test_two_point_closed_form(self):
        eps, gap = 1.3, 4.0
        probs = exponential_mechanism_distribution([0.0, gap], 1.0, eps)
        assert probs[0] == pytest.approx(1.0 / (1.0 + math.exp(-eps * gap / 2.0)), rel=1e-12)

    def test_distribution_normalised(self):
        probs = exponential_mechanism_distribution(list(range(20)), 1.0, 0.7)
        assert abs(probs.sum() - 1.0) < 1e-12

    def test_nonfinite_scores_rejected(self):
        with pytest.raises(ValueError):
            exponential_mechanism_distribution([0.0, math.inf], 1.0, 1.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            exponential_mechanism_distribution([], 1.0, 1.0)

    def test_pointwise_ratio_bound_on_shifted_scores(self):
        # scores moving by at most one pointwise move every log-probability
        # by at most epsilon, the guarantee the audits rely on
        gen = np.random.Generator(np.random.PCG64(21))
        for _ in range(200):
            eps = float(gen.uniform(0.2, 3.0))
            scores = gen.integers(0, 6, size=5).astype(float)
            delta = gen.integers(-1, 2, size=5).astype(float)
            p = exponential_mechanism_distribution(scores, 1.0, eps)
            q = exponential_mechanism_distribution(scores + delta, 1.0, eps)
            assert np.max(np.abs(np.log(p) - np.log(q))) <= eps + 1e-9

    def test_utility_bound(self):
        gen = np.random.Generator(np.random.PCG64(2))
        eps, beta = 1.0, 0.05
        failures = 0
        trials = 2000
        scores = [0, 1, 2, 5, 9, 9, 9, 9]
        margin = (2.0 / eps) * math.log(len(scores) / beta)
        for i in range(trials):
            idx = exponential_mechanism(scores, 1.0, eps, NoiseSource(i))
            if scores[idx] >= min(scores) + margin:
                failures += 1
        assert failures / trials <= beta

    def test_sampling_matches_law(self):
        scores = [0.0, 1.0, 3.0]
        probs = exponential_mechanism_distribution(scores, 1.0, 2.0)
        counts = np.zeros(3)
        for i in range(20_000):
            counts[exponential_mechanism(scores, 1.0, 2.0, NoiseSource(i))] += 1
        assert np.allclose(counts / counts.sum(), probs, atol=0.01)


class TestCalibration:
    def test_levels_cover_the_answer_space(self):
        for m in [1, 2, 3, 4, 15, 16, 255, 256]:
            cal = calibrate_noisy_search(m, 1.0, 0.1)
            assert 2**cal.levels >= m + 1
            assert cal.queries == cal.levels * cal.votes
            assert cal.sigma == pytest.approx(math.sqrt(cal.queries / 2.0))
            assert cal.eta == pytest.approx(3.0 * cal.sigma)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            calibrate_noisy_search(0, 1.0, 0.1)
        with pytest.raises(ValueError):
            calibrate_noisy_search(4, -1.0, 0.1)
        with pytest.raises(ValueError):
            calibrate_noisy_search(4, 1.0, 0.0)


class TestNoisyBinarySearch:
    def test_noiseless_step_function(self):
        losses = [10.0, 10.0, 0.0, 0.0]
        result = noisy_binary_search(
            lambda i: losses[i - 1], 4, 5.0, 1e9, 0.1, NoiseSource(3)
        )
        assert result.index == 3

    def test_single_position_grid(self):
        for seed in range(10):
            result = noisy_binary_search(lambda i: 10.0, 1, 5.0, 1e9, 0.1, NoiseSource(seed))
            assert result.index == 2
            result = noisy_binary_search(lambda i: 0.0, 1, 5.0, 1e9, 0.1, NoiseSource(seed))
            assert result.index == 1

    def test_accounting_identity(self):
        for rho in [0.01, 0.5, 1.0, 17.0]:
            result = noisy_binary_search(
                lambda i: float(100 - i), 100, 50.0, rho, 0.1, NoiseSource(1)
            )
            assert abs(result.rho_spent - rho) <= 1e-12
            assert result.queries_issued == result.calibration.queries

    def test_query_count_is_data_independent(self):
        flat = noisy_binary_search(lambda i: 0.0, 13, 5.0, 1.0, 0.1, NoiseSource(2))
        steep = noisy_binary_search(lambda i: 1000.0, 13, 5.0, 1.0, 0.1, NoiseSource(2))
        assert flat.queries_issued == steep.queries_issued

    def test_contract_success_rate(self):
        # success means the returned index brackets the target within eta
        rho, beta, m = 1.0, 0.1, 256
        cal = calibrate_noisy_search(m, rho, beta)
        gen = np.random.Generator(np.random.PCG64(77))
        trials, successes = 10_000, 0
        for trial in range(trials):
            drop = np.sort(gen.uniform(0, 60, size=m))[::-1]
            losses = [float(v) for v in drop]
            tau = float(gen.uniform(5, 55))
            result = noisy_binary_search(
                lambda i: losses[i - 1], m, tau, rho, beta, NoiseSource(trial)
            )
            i = result.index
            hi_ok = i > m or losses[i - 1] < tau + cal.eta
            lo_ok = i == 1 or losses[i - 2] > tau - cal.eta
            successes += 1 if (hi_ok and lo_ok) else 0
        assert successes / trials >= 1.0 - beta

    def test_returns_within_answer_space(self):
        for seed in range(50):
            result = noisy_binary_search(
                lambda i: float(5 - i), 5, 2.5, 0.5, 0.2, NoiseSource(seed)
            )
            assert 1 <= result.index <= 6


class TestGroupPrivacy:
    def test_identity_at_distance_one(self):
        assert group_privacy_bound(0.7, 1e-6, 1) == (0.7, 1e-6)

    def test_zero_delta_stays_zero(self):
        eps, delta = group_privacy_bound(0.5, 0.0, 7)
        assert eps == pytest.approx(3.5)
        assert delta == 0.0

    def test_matches_iterated_one_step_bound(self):
        eps, delta, t = 0.1, 1e-6, 10
        eps_t, delta_t = group_privacy_bound(eps, delta, t)
        assert eps_t == pytest.approx(1.0)
        assert delta_t == pytest.approx(delta * (math.e - 1) / (math.exp(0.1) - 1), rel=1e-9)
        # iterate the single step: d_{i+1} = e^eps * d_i + delta
        d = 0.0
        for _ in range(t):
            d = math.exp(eps) * d + delta
        assert delta_t == pytest.approx(d, rel=1e-9)


class TestZcdpConversion:
    def test_forward_inverse(self):
        for rho in [0.01, 0.125, 0.9]:
            for delta in [1e-9, 1e-6, 1e-2]:
                eps = zcdp_to_approx_dp(rho, delta)
                assert approx_dp_to_zcdp(eps, delta) == pytest.approx(rho, abs=1e-9)

    def test_epsilon_floor(self):
        # as delta approaches one the epsilon approaches the 4*rho regime
        rho = 0.3
        assert zcdp_to_approx_dp(rho, 0.999999) >= 2 * rho

    def test_against_bisection(self):
        rho, delta = 0.125, 1e-6
        target = zcdp_to_approx_dp(rho, delta)
        lo, hi = 0.0, 100.0
        for _ in range(200):
            mid = (lo + hi) / 2
            if approx_dp_to_zcdp(max(mid, 1e-12), delta) < rho:
                lo = mid
            else:
                hi = mid
        assert target == pytest.approx(hi, abs=1e-9)
