"""Independent oracles and the report suite built on them."""

import math

import numpy as np
import pytest

from hetalloc import (
    ClusterSpec,
    ComplexityGuard,
    DomainError,
    GroupSpec,
    RuntimeModel,
    equalization_residual,
    exact_order_statistic_mean,
    grid_minimize_objective,
    lambert_bisection_oracle,
    lambert_w_minus1,
    min_latency_bound,
    optimal_allocation,
    run_all_oracles,
)
from hetalloc import verify

TWO = ClusterSpec(groups=(GroupSpec(300, 4.0, 1.0),
                          GroupSpec(600, 0.5, 1.0)), k=100_000)


class TestBisectionOracle:
    def test_agrees_with_fast_solver(self):
        xs = -np.geomspace(1e-20, (1 / math.e) * (1 - 1e-9), 200)
        for x in xs:
            slow = float(lambert_bisection_oracle(float(x)))
            fast = lambert_w_minus1(float(x))
            assert fast == pytest.approx(slow, rel=1e-10)

    def test_frozen_value(self):
        assert float(lambert_bisection_oracle(-0.1)) == pytest.approx(
            -3.577152063957297, rel=1e-10)

    def test_array_input(self):
        out = lambert_bisection_oracle(np.array([-0.1, -0.2]))
        assert out.shape == (2,)
        assert np.all(out < -1)

    @pytest.mark.parametrize("x", [0.0, -1e-30, -0.5])
    def test_bracket_domain(self, x):
        # the oracle covers [-1/e, -60e^-60]; outside that it refuses
        with pytest.raises(DomainError):
            lambert_bisection_oracle(x)


class TestExactOrderStatistic:
    def test_frozen_value(self):
        got = exact_order_statistic_mean(1000, 500, 1.0, 1.0, 1000.0, 1000)
        assert got == pytest.approx(1.6926474305598203, rel=1e-12)

    def test_load_prefactor(self):
        half = exact_order_statistic_mean(1000, 500, 1.0, 1.0, 500.0, 1000)
        full = exact_order_statistic_mean(1000, 500, 1.0, 1.0, 1000.0, 1000)
        assert full == pytest.approx(2 * half, rel=1e-12)

    def test_per_row_scale(self):
        task = exact_order_statistic_mean(1000, 500, 1.0, 1.0, 10.0, 1000)
        row = exact_order_statistic_mean(1000, 500, 1.0, 1.0, 10.0, 1000,
                                         model=RuntimeModel.PER_ROW)
        assert row == pytest.approx(1000 * task, rel=1e-12)


class TestGridMinimizer:
    def test_bounds_the_closed_form(self):
        point, value = grid_minimize_objective(TWO, points_per_axis=400)
        bound = min_latency_bound(TWO)
        assert value >= bound
        assert value == pytest.approx(bound, rel=1e-3)

    def test_argmin_near_optimum(self):
        point, _ = grid_minimize_objective(TWO, points_per_axis=400)
        _, opt = optimal_allocation(TWO)
        for r_grid, r_star, g in zip(point, opt.finishers, TWO.groups):
            cell = g.workers / 401
            assert abs(r_grid - r_star) <= cell

    def test_complexity_guard_on_groups(self):
        c4 = ClusterSpec(groups=tuple(GroupSpec(50, 1.0, 1.0)
                                      for _ in range(4)), k=100)
        with pytest.raises(ComplexityGuard):
            grid_minimize_objective(c4, points_per_axis=10)

    def test_complexity_guard_on_points(self):
        c3 = ClusterSpec(groups=tuple(GroupSpec(50, 1.0, 1.0)
                                      for _ in range(3)), k=100)
        with pytest.raises(ComplexityGuard):
            grid_minimize_objective(c3, points_per_axis=1000)


class TestEqualizationResidual:
    def test_zero_at_optimum(self):
        alloc, point = optimal_allocation(TWO)
        assert equalization_residual(alloc, point, TWO) < 1e-12

    def test_positive_off_optimum(self):
        from hetalloc import Allocation, Scheme
        alloc, point = optimal_allocation(TWO)
        skew = Allocation.from_real_loads(
            (alloc.loads_real[0] * 1.05, alloc.loads_real[1]), TWO,
            Scheme.CUSTOM)
        assert equalization_residual(skew, point, TWO) > 1e-3


class TestReportSuite:
    def test_default_suite_all_pass(self):
        reports = run_all_oracles()
        assert len(reports) >= 9
        failed = [r.name for r in reports if not r.passed]
        assert failed == []

    def test_report_names_cover_claims(self):
        names = {r.name for r in run_all_oracles()}
        assert {"lambert-roundtrip", "lambert-vs-bisection",
                "equalization-residual", "randomized-equalization",
                "row-budget", "global-optimality", "midpoint-convexity",
                "grid-minimum", "per-row-scaling"} <= names

    def test_roundtrip_sample_count(self):
        report = next(r for r in run_all_oracles()
                      if r.name == "lambert-roundtrip")
        assert report.samples == 10_000
        assert report.tolerance == 1e-12

    def test_grid_skipped_for_many_groups(self):
        c4 = ClusterSpec(groups=tuple(GroupSpec(60, float(m), 1.0)
                                      for m in (1, 2, 4, 8)), k=1000)
        names = {r.name for r in run_all_oracles(c4)}
        assert "grid-minimum" not in names
        reports = run_all_oracles(c4)
        assert all(r.passed for r in reports)

    def test_custom_cluster_suite(self):
        c = ClusterSpec(groups=(GroupSpec(200, 2.0, 0.5),
                                GroupSpec(100, 1.0, 0.5)), k=5000)
        reports = run_all_oracles(c)
        assert all(r.passed for r in reports)

    def test_optimality_report_counts_samples(self):
        report = next(r for r in run_all_oracles()
                      if r.name == "global-optimality")
        assert report.samples == 10_000

    def test_sampled_optimality_on_random_clusters(self):
        rng = np.random.default_rng(23)
        for _ in range(5):
            groups = tuple(
                GroupSpec(int(rng.integers(20, 500)),
                          float(rng.uniform(0.2, 8.0)),
                          float(rng.uniform(0.5, 4.0)))
                for _ in range(int(rng.integers(1, 4))))
            c = ClusterSpec(groups=groups, k=10_000)
            report = verify.optimality_sampling_report(c, samples=500,
                                                       seed=7)
            assert report.passed, report
