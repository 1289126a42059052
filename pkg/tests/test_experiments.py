import math

import numpy as np
import pytest

from coverdp.designs import schonheim_lower_bound
from coverdp.estimator import PlanChoice
from coverdp.experiments import (
    CSV_COLUMNS,
    AdversaryConfig,
    AuditConfig,
    BenchConfig,
    DistributionSpec,
    ExperimentConfig,
    csv_body,
    hidden_subset_oracle,
    make_statistic,
    render_csv,
    run_design_bench,
    run_dp_audit,
    run_lowerbound_demo,
    run_statistical_experiment,
)
from coverdp.losses import OutputGrid
from coverdp.mechanisms import PrivacyBudget


class TestStatistics:
    def test_median_is_lower_median(self):
        grid = OutputGrid.from_range(0, 10)
        stat = make_statistic("median", grid)
        assert stat((1.0, 2.0, 3.0, 4.0)) == 2.0
        assert stat(()) == 0.0

    def test_trimmed_mean_snaps(self):
        grid = OutputGrid.from_range(0, 10)
        stat = make_statistic("trimmed_mean", grid)
        assert stat((1.0, 2.0, 2.5)) in grid

    def test_max(self):
        grid = OutputGrid.from_range(0, 10)
        assert make_statistic("max", grid)((3.0, 7.0)) == 7.0

    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            make_statistic("mode", OutputGrid.from_range(0, 1))


class TestDistributions:
    def test_uniform_median(self):
        d = DistributionSpec(kind="uniform", low=0, high=100)
        assert d.median() == 50.0

    def test_point_mass(self):
        d = DistributionSpec(kind="point", value=7.0)
        gen = np.random.Generator(np.random.PCG64(0))
        assert set(d.sample(gen, 20)) == {7.0}

    def test_discretized_gaussian_sums_to_one(self):
        d = DistributionSpec(kind="discretized_gaussian", low=0, high=20, mean=10.0, stddev=3.0)
        assert abs(d.probabilities().sum() - 1.0) < 1e-12
        assert d.median() == 10.0


class TestCsv:
    def test_schema_and_determinism(self):
        rows = [dict.fromkeys(CSV_COLUMNS, 1) | {"experiment_id": "x", "flavor": "pure"}]
        text_a = render_csv(rows, comments=["generated_at: now"])
        text_b = render_csv(rows, comments=["generated_at: later"])
        assert csv_body(text_a) == csv_body(text_b)
        header = csv_body(text_a).splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)

    def test_floats_render_stably(self):
        row = dict.fromkeys(CSV_COLUMNS) | {"y": 0.30000000000000004, "seed": 3}
        line = csv_body(render_csv([row])).splitlines()[1]
        assert "0.30000000000000004" in line


def small_experiment(plan_kind="partition", **overrides):
    base = dict(
        distribution=DistributionSpec(kind="uniform", low=0, high=15),
        statistic="median",
        n=12,
        trials=20,
        seed=100,
        plan_choice=PlanChoice.partition() if plan_kind == "partition" else PlanChoice.c_over_t(2),
        budget=PrivacyBudget.pure(12.0, 0.2),
        alpha=4.0,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestStatisticalExperiment:
    def test_point_mass_gives_zero_error_on_sandwich(self):
        cfg = small_experiment(
            distribution=DistributionSpec(kind="point", value=5.0),
            grid_points=(0.0, 5.0, 9.0),
            trials=30,
        )
        result = run_statistical_experiment(cfg)
        for row in result.rows:
            if row["experiment_id"].startswith("estimate") and row["sandwich_ok"]:
                assert row["abs_err"] == 0.0

    def test_rows_carry_seeds_and_counts(self):
        cfg = small_experiment()
        result = run_statistical_experiment(cfg)
        estimates = [r for r in result.rows if r["experiment_id"].startswith("estimate")]
        baselines = [r for r in result.rows if r["experiment_id"] == "baseline"]
        assert len(estimates) == len(baselines) == cfg.trials
        assert [r["seed"] for r in estimates] == list(range(100, 100 + cfg.trials))
        assert all(r["oracle_calls"] == result.plan.k for r in estimates)

    def test_mechanism_beta_is_half_of_config(self):
        cfg = small_experiment()
        # the plan's tolerance must match a mechanism run at beta / 2
        from coverdp.estimator import removal_tolerance
        from dataclasses import replace

        expected = removal_tolerance(replace(cfg.budget, beta=0.1), 16)
        assert result_plan_t(cfg) == expected

    def test_summary_fields(self):
        cfg = small_experiment()
        summary = run_statistical_experiment(cfg).summary
        for key in ("abs_err_q90", "baseline_q90", "sandwich_failure_rate", "union_bound_floor"):
            assert key in summary

    def test_reproducible(self):
        cfg = small_experiment()
        a = run_statistical_experiment(cfg)
        b = run_statistical_experiment(cfg)
        assert a.rows == b.rows

    def test_union_bound_floor_holds_empirically(self):
        # if the statistic misses the target by more than alpha with rate
        # beta_f on fresh per-call samples, the private estimate stays within
        # alpha with rate at least 1 - k * beta_f - beta
        cfg = small_experiment(trials=400, alpha=6.0)
        result = run_statistical_experiment(cfg)
        floor = result.summary["union_bound_floor"]
        slack = 3.0 * math.sqrt(0.25 / cfg.trials)
        assert floor > 0.5  # parameters chosen so the bound is informative
        assert result.summary["within_alpha_rate"] >= floor - slack


def result_plan_t(cfg):
    return run_statistical_experiment(cfg).plan.t


class TestAudit:
    def test_tiny_instance_passes(self):
        cfg = AuditConfig(
            n=4,
            grid_points=(0.0, 1.0, 2.0),
            epsilons=(0.5, 2.0),
            beta=0.1,
            design_kind="partition",
            design_t=1,
        )
        report = run_dp_audit(cfg)
        assert report.passed
        assert report.pairs_checked > 0
        for eps in cfg.epsilons:
            assert report.max_log_ratio[eps] <= eps + 1e-9
            assert report.group_log_ratio[eps] <= report.group_distance * eps + 1e-9
            assert report.max_log_ratio[eps] > 0.0  # something was actually measured

    def test_random_design_instance(self):
        cfg = AuditConfig(
            n=4,
            grid_points=(0.0, 1.0),
            epsilons=(1.0,),
            beta=0.2,
            design_kind="random",
            design_t=2,
            design_m=3,
            design_seed=5,
        )
        assert run_dp_audit(cfg).passed

    def test_other_statistics_audit_clean(self):
        for statistic in ("max", "trimmed_mean"):
            cfg = AuditConfig(
                n=4,
                grid_points=(0.0, 1.0, 2.0),
                epsilons=(1.0,),
                beta=0.1,
                statistic=statistic,
                design_kind="partition",
                design_t=1,
            )
            assert run_dp_audit(cfg).passed

    def test_identical_laws_have_ratio_zero(self):
        from coverdp.data import Dataset
        from coverdp.designs import generate_partition
        from coverdp.losses import build_cache
        from coverdp.shifted_inverse import pure_output_distribution

        grid = OutputGrid((0.0, 1.0, 2.0))
        design = generate_partition(4, 1)
        stat = make_statistic("median", grid)
        x = Dataset.of([1.0, 1.0, 2.0, 0.0])
        a = pure_output_distribution(build_cache(stat, x, design, grid), 1.0, 0.1)
        b = pure_output_distribution(build_cache(stat, x, design, grid), 1.0, 0.1)
        assert np.array_equal(a, b)

    def test_oversized_instance_rejected(self):
        with pytest.raises(ValueError):
            AuditConfig(n=9, grid_points=(0.0, 1.0), epsilons=(1.0,), beta=0.1)


class TestLowerBound:
    def test_oracle_contract(self):
        oracle = hidden_subset_oracle(frozenset({1, 2, 3, 4}), nu=7.0, query_size=3)
        assert oracle([1, 2, 3]) == 7.0
        assert oracle([1, 2]) == 0.0  # wrong size
        assert oracle([1, 2, 2]) == 0.0  # duplicates
        assert oracle([1, 2, 99]) == 0.0  # outside the hidden set
        assert oracle([1, 2, 3, 4]) == 0.0  # oversized

    def test_hit_rate_respects_bound(self):
        cfg = AdversaryConfig(
            universe_scale=800, n=6, m=3, t=1, nu=5.0, trials=4000, seed=2
        )
        report = run_lowerbound_demo(cfg)
        assert report.passed
        assert report.combinatorial_bound == pytest.approx(
            math.comb(3, 1) / math.comb(6, 1)
        )
        assert report.hit_rate <= report.combinatorial_bound + report.collision_slack + 4 * report.standard_error

    def test_uncorrupted_inputs_almost_always_hit(self):
        cfg = AdversaryConfig(
            universe_scale=800, n=6, m=0, t=0, nu=5.0, trials=3000, seed=3
        )
        report = run_lowerbound_demo(cfg)
        assert report.hit_rate >= 1.0 - report.collision_slack - 4 * report.standard_error

    def test_collision_slack_reported_separately(self):
        cfg = AdversaryConfig(universe_scale=800, n=6, m=3, t=1, nu=5.0, trials=1000)
        report = run_lowerbound_demo(cfg)
        assert report.collision_slack == pytest.approx(36 / 1600)

    def test_zero_nu_rejected(self):
        with pytest.raises(ValueError):
            AdversaryConfig(universe_scale=800, n=6, m=3, t=1, nu=0.0, trials=10)

    def test_small_universe_rejected(self):
        with pytest.raises(ValueError):
            AdversaryConfig(universe_scale=100, n=6, m=3, t=1, nu=1.0, trials=10)


class TestDesignBench:
    def test_rows_bracket_generated_k(self):
        cfg = BenchConfig(n_values=(6, 8, 12), t_values=(1, 2), m_rule="half", seed=4)
        rows, times = run_design_bench(cfg)
        assert len(rows) == len(times) == 6
        for row in rows:
            assert row["sandwich_ok"]
            # both bounds bracket the optimum; the generated k only has to
            # respect the lower one
            assert row["sandwich_lo"] <= min(row["k"], row["sandwich_hi"])
            assert row["sandwich_lo"] == schonheim_lower_bound(row["n"], row["m"], row["t"])

    def test_full_rule_gives_single_set(self):
        cfg = BenchConfig(n_values=(5, 9), t_values=(2,), m_rule="full")
        rows, _ = run_design_bench(cfg)
        for row in rows:
            assert row["k"] == 1
            assert row["sandwich_lo"] == 1

    def test_complete_rule_gives_binomial(self):
        cfg = BenchConfig(n_values=(6,), t_values=(2,), m_rule="complete")
        rows, _ = run_design_bench(cfg)
        assert rows[0]["k"] == math.comb(6, 2)

    def test_budget_exceeded_marked_not_fatal(self):
        cfg = BenchConfig(
            n_values=(40,), t_values=(12,), m_rule="half", enumeration_budget=10
        )
        rows, _ = run_design_bench(cfg)
        assert rows[0]["experiment_id"].endswith("budget_exceeded")
