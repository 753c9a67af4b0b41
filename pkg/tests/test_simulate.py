"""Monte Carlo engine: determinism, sampling law, and exact cross-checks."""

import math

import numpy as np
import pytest

from hetalloc import (
    Allocation,
    ClusterSpec,
    DomainError,
    GroupSpec,
    Infeasible,
    RuntimeModel,
    Scheme,
    asymptotic_variance,
    optimal_allocation,
    sample_worker_time,
    simulate_latency,
    trial_latencies,
    trial_outcomes,
    uniform_allocation,
)
from hetalloc.verify import exact_order_statistic_mean

SINGLE = ClusterSpec(groups=(GroupSpec(1000, 1.0, 1.0),), k=1000)

TWO = ClusterSpec(groups=(GroupSpec(300, 4.0, 1.0),
                          GroupSpec(600, 0.5, 1.0)), k=100_000)


class TestSampleWorkerTime:
    G = GroupSpec(100, 2.0, 3.0)

    def test_zero_quantile_hits_shift(self):
        # per-task shift is alpha * l / k
        t = sample_worker_time(self.G, 10.0, 100, RuntimeModel.PER_TASK, 0.0)
        assert t == pytest.approx(0.3, rel=1e-15)

    def test_known_quantile(self):
        u = 1.0 - math.exp(-1.0)
        t = sample_worker_time(self.G, 10.0, 100, RuntimeModel.PER_TASK, u)
        # shift + one mean: 0.3 + l/(k*mu) = 0.3 + 0.05
        assert t == pytest.approx(0.35, rel=1e-12)

    def test_per_row_is_k_times_per_task(self):
        u = 0.7
        task = sample_worker_time(self.G, 10.0, 100,
                                  RuntimeModel.PER_TASK, u)
        row = sample_worker_time(self.G, 10.0, 100, RuntimeModel.PER_ROW, u)
        assert row == pytest.approx(100 * task, rel=1e-12)

    def test_array_input(self):
        u = np.array([0.0, 0.5, 0.9])
        t = sample_worker_time(self.G, 10.0, 100, RuntimeModel.PER_TASK, u)
        assert t.shape == (3,)
        assert np.all(np.diff(t) > 0)

    @pytest.mark.parametrize("u", [1.0, -0.1, 1.5])
    def test_quantile_domain(self, u):
        with pytest.raises(DomainError):
            sample_worker_time(self.G, 10.0, 100, RuntimeModel.PER_TASK, u)


class TestDeterminism:
    def test_same_seed_same_estimate(self):
        alloc, _ = optimal_allocation(TWO)
        a = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 200, seed=5)
        b = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 200, seed=5)
        assert a.mean == b.mean and a.std_error == b.std_error

    def test_chunking_does_not_change_draws(self):
        alloc, _ = optimal_allocation(TWO)
        small = trial_latencies(TWO, alloc, RuntimeModel.PER_TASK, 100,
                                seed=5, chunk_trials=7)
        big = trial_latencies(TWO, alloc, RuntimeModel.PER_TASK, 100,
                              seed=5, chunk_trials=512)
        assert np.array_equal(small, big)

    def test_different_seed_different_draws(self):
        alloc, _ = optimal_allocation(TWO)
        a = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 200, seed=5)
        b = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 200, seed=6)
        assert a.mean != b.mean

    def test_estimate_records_metadata(self):
        alloc, _ = optimal_allocation(TWO)
        est = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 64, seed=9)
        assert est.trials == 64 and est.seed == 9

    def test_single_trial_has_zero_std_error(self):
        alloc, _ = optimal_allocation(TWO)
        est = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 1, seed=0)
        assert est.std_error == 0.0


class TestEngineSemantics:
    def test_infeasible_total_load(self):
        c = ClusterSpec(groups=(GroupSpec(100, 1.0, 1.0),), k=300)
        alloc = Allocation.from_real_loads((2.5,), c, Scheme.CUSTOM)
        # ceil gives 3 rows per worker and keeps k covered
        simulate_latency(c, alloc, RuntimeModel.PER_TASK, 2, seed=0)
        # real loads cover only 250 of the 300 rows
        with pytest.raises(Infeasible):
            simulate_latency(c, alloc, RuntimeModel.PER_TASK, 2, seed=0,
                             use_integer_loads=False)
        tiny = Allocation.from_real_loads((0.5,), c, Scheme.CUSTOM)
        with pytest.raises(Infeasible):
            simulate_latency(c, tiny, RuntimeModel.PER_TASK, 2, seed=0)

    def test_real_vs_integer_loads_differ(self):
        alloc, _ = optimal_allocation(TWO)
        assert alloc.loads_real != alloc.loads_int
        a = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 100, seed=3)
        b = simulate_latency(TWO, alloc, RuntimeModel.PER_TASK, 100, seed=3,
                             use_integer_loads=False)
        assert a.mean > b.mean  # ceil only adds work

    def test_outcomes_match_latencies(self):
        alloc, _ = optimal_allocation(TWO)
        lats = trial_latencies(TWO, alloc, RuntimeModel.PER_TASK, 20, seed=1)
        outs = trial_outcomes(TWO, alloc, RuntimeModel.PER_TASK, 20, seed=1)
        assert [o.completion_time for o in outs] == pytest.approx(lats)

    def test_outcome_finisher_counts(self):
        alloc, _ = optimal_allocation(TWO)
        for out in trial_outcomes(TWO, alloc, RuntimeModel.PER_TASK, 10,
                                  seed=2):
            counts = out.finishers_per_group
            assert len(counts) == 2
            assert all(0 <= c <= g.workers
                       for c, g in zip(counts, TWO.groups))
            # finished rows cover k, removing any one finisher breaks that
            done = sum(c * l for c, l in zip(counts, alloc.loads_int))
            assert done >= TWO.k

    def test_per_row_latency_scales_by_k(self):
        alloc, _ = optimal_allocation(TWO)
        task = trial_latencies(TWO, alloc, RuntimeModel.PER_TASK, 50, seed=4)
        row = trial_latencies(TWO, alloc, RuntimeModel.PER_ROW, 50, seed=4)
        assert row == pytest.approx(TWO.k * task, rel=1e-12)


class TestAgainstExactExpectation:
    def test_homogeneous_mean_matches_harmonic_form(self):
        # every worker holds k/500 rows, so exactly 500 finishers decode
        alloc = uniform_allocation(SINGLE, 2 * SINGLE.k)
        assert alloc.loads_real == (2.0,)
        exact = exact_order_statistic_mean(1000, 500, 1.0, 1.0, 2.0,
                                           SINGLE.k)
        est = simulate_latency(SINGLE, alloc, RuntimeModel.PER_TASK, 4000,
                               seed=11)
        assert abs(est.mean - exact) <= 3 * est.std_error

    def test_variance_of_central_order_statistic(self):
        # simulated spread of the decode time tracks q(1-q)/(N f(eta)^2)
        alloc = uniform_allocation(SINGLE, 2 * SINGLE.k)
        var = asymptotic_variance(SINGLE.groups[0], 2.0, 0.5, SINGLE)
        lats = trial_latencies(SINGLE, alloc, RuntimeModel.PER_TASK, 4000,
                               seed=12)
        sample_var = float(np.var(lats, ddof=1))
        assert sample_var == pytest.approx(var, rel=0.15)

    def test_variance_formula_frozen(self):
        g = GroupSpec(1000, 1.0, 1.0)
        # load 2, k=1000: conditional rate is 500; at q=0.5 the density
        # at the quantile is 500 * 0.5
        var = asymptotic_variance(g, 2.0, 0.5, SINGLE)
        assert var == pytest.approx(0.25 / (1000 * 250.0 ** 2), rel=1e-12)

    def test_variance_grows_toward_upper_tail(self):
        g = GroupSpec(1000, 1.0, 1.0)
        assert asymptotic_variance(g, 2.0, 0.99, SINGLE) > \
            asymptotic_variance(g, 2.0, 0.5, SINGLE)
