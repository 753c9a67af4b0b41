"""Independent oracles for the closed-form results.

Every oracle recomputes its target through a route that shares no code
with the functions it checks: the Lambert solver is verified by plain
bisection on the defining identity, the analytic optimum by dense grid
search over the objective, and order-statistic means by direct harmonic
summation.
"""

import math
from dataclasses import dataclass

import numpy as np

from .allocation import (
    latency_objective,
    load_latency_factor,
    min_latency_bound,
    optimal_allocation,
)
from .cluster import (
    Allocation,
    ClusterSpec,
    GroupSpec,
    OptimalPoint,
    RuntimeModel,
)
from .errors import ComplexityGuard, DomainError
from .special import lambert_w_minus1

_BISECT_LO = -60.0
_BISECT_HI = -1.0
_BISECT_ITERS = 200
# w*exp(w) evaluated at the bracket ends: the oracle can only solve for
# arguments between these two values.
_BISECT_ARG_MIN = _BISECT_HI * math.exp(_BISECT_HI)   # -1/e
_BISECT_ARG_MAX = _BISECT_LO * math.exp(_BISECT_LO)   # about -5.3e-25


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one oracle run against its stated tolerance."""

    name: str
    samples: int
    max_abs_error: float
    max_rel_error: float
    tolerance: float
    passed: bool


def lambert_bisection_oracle(x):
    """Solve w * exp(w) = x on [-60, -1] by 200 bisection steps.

    Accepts scalars or arrays in [-1/e, -60*exp(-60)]; independent of
    lambert_w_minus1.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < _BISECT_ARG_MIN) or np.any(arr > _BISECT_ARG_MAX):
        raise DomainError(
            f"bisection oracle covers [{_BISECT_ARG_MIN!r}, "
            f"{_BISECT_ARG_MAX!r}], got values outside it")
    lo = np.full_like(arr, _BISECT_LO)
    hi = np.full_like(arr, _BISECT_HI)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        # w*exp(w) decreases on [-60, -1]; too-large values move lo right.
        above = mid * np.exp(mid) > arr
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    result = 0.5 * (lo + hi)
    return float(result) if result.ndim == 0 else result


def exact_order_statistic_mean(workers: int, finishers: int, mu: float,
                               alpha: float, load: float, k: int,
                               model: RuntimeModel = RuntimeModel.PER_TASK
                               ) -> float:
    """Expected value of the finishers-th order statistic of `workers`
    iid shifted-exponential completion times, by direct summation of the
    harmonic tail (no logarithmic approximation, no W evaluation)."""
    if not 1 <= finishers <= workers:
        raise DomainError(
            f"finishers must lie in [1, {workers}], got {finishers!r}")
    tail = float(np.sum(1.0 / np.arange(workers - finishers + 1, workers + 1,
                                        dtype=np.float64)))
    prefactor = load / k if model is RuntimeModel.PER_TASK else load
    return prefactor * (alpha + tail / mu)


def grid_minimize_objective(cluster: ClusterSpec, points_per_axis: int,
                            max_points: int = 4_000_000):
    """Dense grid search of the latency objective over the open box of
    finisher counts.  Returns (argmin tuple, min value).

    Guarded: refuses more than 3 groups or grids above max_points.
    """
    g_count = cluster.group_count
    if g_count > 3:
        raise ComplexityGuard(
            f"grid search supports at most 3 groups, got {g_count}")
    if points_per_axis < 2:
        raise DomainError("points_per_axis must be at least 2")
    if points_per_axis**g_count > max_points:
        raise ComplexityGuard(
            f"{points_per_axis}^{g_count} grid points exceed the cap "
            f"{max_points}")
    # The objective is 1 / sum_j r_j/factor_j, so minimizing it means
    # maximizing the separable sum; broadcast per-axis contribution vectors.
    axes, contribs = [], []
    idx = np.arange(1, points_per_axis + 1, dtype=np.float64)
    for g in cluster.groups:
        r = g.workers * idx / (points_per_axis + 1)   # interior points only
        axes.append(r)
        contribs.append(r / (g.alpha + np.log(g.workers / (g.workers - r))
                             / g.mu))
    total = contribs[0]
    for c in contribs[1:]:
        total = total[..., np.newaxis] + c
    flat_argmax = int(np.argmax(total))
    indices = np.unravel_index(flat_argmax, total.shape)
    argmin = tuple(float(axes[d][i]) for d, i in enumerate(indices))
    return argmin, float(1.0 / total.max())


def equalization_residual(alloc: Allocation, point: OptimalPoint,
                          cluster: ClusterSpec) -> float:
    """Largest pairwise mismatch of load * latency-factor across groups,
    relative to the first group's product.  Zero at a true optimum."""
    products = []
    for load, r, g in zip(alloc.loads_real, point.finishers, cluster.groups):
        products.append(load * load_latency_factor(r, g))
    reference = products[0]
    worst = 0.0
    for a in products:
        for b in products:
            worst = max(worst, abs(a - b))
    return worst / reference


def _report(name, samples, abs_errs, rel_errs, tolerance,
            rel_gate=True) -> OracleReport:
    max_abs = float(np.max(abs_errs)) if len(abs_errs) else 0.0
    max_rel = float(np.max(rel_errs)) if len(rel_errs) else 0.0
    gate = max_rel if rel_gate else max_abs
    return OracleReport(name=name, samples=samples, max_abs_error=max_abs,
                        max_rel_error=max_rel, tolerance=tolerance,
                        passed=bool(gate <= tolerance))


def _log_spaced_args(samples: int, magnitude_low: float = 1e-250,
                     branch_margin: float = 1e-12) -> np.ndarray:
    hi_mag = (1.0 / math.e) * (1.0 - branch_margin)
    return -np.geomspace(magnitude_low, hi_mag, samples)


def lambert_roundtrip_report(samples: int = 10_000) -> OracleReport:
    """w = W(x) must satisfy w*exp(w) = x to 1e-12 relative across the
    domain, branch point neighborhood included."""
    xs = _log_spaced_args(samples)
    rel, absolute = [], []
    for x in xs:
        w = lambert_w_minus1(x)
        resid = abs(w * math.exp(w) - x)
        absolute.append(resid)
        rel.append(resid / abs(x))
    return _report("lambert-roundtrip", samples, absolute, rel, 1e-12)


def lambert_agreement_report(samples: int = 10_000) -> OracleReport:
    """lambert_w_minus1 must match the bisection oracle to 1e-10 on the
    oracle's bracket-attainable argument range."""
    xs = -np.geomspace(1e-24, (1.0 / math.e) * (1.0 - 1e-12), samples)
    ws = np.array([lambert_w_minus1(x) for x in xs])
    oracle = lambert_bisection_oracle(xs)
    absolute = np.abs(ws - oracle)
    rel = absolute / np.abs(oracle)
    return _report("lambert-vs-bisection", samples, absolute, rel, 1e-10)


def lambert_identity_report(samples: int = 2_000) -> OracleReport:
    """log(-W(z)) + W(z) = log(-z) within 1e-10 on
    [-1/e + 1e-6, -1e-6]."""
    xs = np.linspace(-1.0 / math.e + 1e-6, -1e-6, samples)
    absolute = []
    for x in xs:
        w = lambert_w_minus1(x)
        absolute.append(abs(math.log(-w) + w - math.log(-x)))
    return _report("lambert-identity", samples, absolute, absolute, 1e-10,
                   rel_gate=False)


def equalization_report(cluster: ClusterSpec,
                        model: RuntimeModel = RuntimeModel.PER_TASK
                        ) -> OracleReport:
    """Optimal loads must equalize load * latency-factor to 1e-9."""
    alloc, point = optimal_allocation(cluster, model)
    resid = equalization_residual(alloc, point, cluster)
    return _report("equalization-residual", cluster.group_count,
                   [resid], [resid], 1e-9)


def randomized_equalization_report(clusters: int = 50,
                                   seed: int = 404) -> OracleReport:
    """Equalization must hold at the optimum of every randomly drawn
    cluster, not only at hand-picked ones. Draws stay inside the
    validated parameter region (alpha * mu well above the viability
    threshold, below underflow)."""
    rng = np.random.default_rng(seed)
    residuals = []
    for _ in range(clusters):
        groups = []
        for _ in range(int(rng.integers(1, 6))):
            while True:
                mu = float(np.exp(rng.uniform(np.log(0.05), np.log(40.0))))
                alpha = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
                if mu * alpha >= 1e-3:
                    break
            groups.append(GroupSpec(int(rng.integers(10, 3001)), mu, alpha))
        cluster = ClusterSpec(groups=tuple(groups),
                              k=int(rng.integers(1_000, 1_000_001)))
        alloc, point = optimal_allocation(cluster)
        residuals.append(equalization_residual(alloc, point, cluster))
    return _report("randomized-equalization", clusters, residuals,
                   residuals, 1e-9)


def budget_report(cluster: ClusterSpec) -> OracleReport:
    """Expected recovered rows sum(finishers * load) must equal k."""
    alloc, point = optimal_allocation(cluster)
    recovered = math.fsum(r * l for r, l in zip(point.finishers,
                                                alloc.loads_real))
    rel = abs(recovered - cluster.k) / cluster.k
    return _report("row-budget", cluster.group_count, [rel], [rel], 1e-9)


def optimality_sampling_report(cluster: ClusterSpec, samples: int = 10_000,
                               seed: int = 0) -> OracleReport:
    """No random interior finisher vector may beat the analytic optimum;
    reports the worst (negative) optimality gap as its error."""
    _, point = optimal_allocation(cluster)
    f_star = point.latency_bound
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    for _ in range(samples):
        r = [g.workers * rng.uniform(1e-6, 1.0 - 1e-6)
             for g in cluster.groups]
        gap = (f_star - latency_objective(r, cluster)) / f_star
        worst_gap = max(worst_gap, gap)
    return _report("global-optimality", samples, [worst_gap], [worst_gap],
                   1e-12)


def convexity_report(cluster: ClusterSpec, triples: int = 1_000,
                     seed: int = 1) -> OracleReport:
    """Midpoint convexity of the objective on random segment pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(triples):
        a = [g.workers * rng.uniform(1e-6, 1.0 - 1e-6)
             for g in cluster.groups]
        b = [g.workers * rng.uniform(1e-6, 1.0 - 1e-6)
             for g in cluster.groups]
        mid = [(x + y) / 2.0 for x, y in zip(a, b)]
        f_mid = latency_objective(mid, cluster)
        chord = 0.5 * (latency_objective(a, cluster)
                       + latency_objective(b, cluster))
        worst = max(worst, (f_mid - chord) / abs(chord))
    return _report("midpoint-convexity", triples, [worst], [worst], 1e-12)


def grid_report(cluster: ClusterSpec, points_per_axis: int = 100
                ) -> OracleReport:
    """Dense grid search must not find anything below the analytic
    optimum, and its argmin must fall within one grid cell of it."""
    _, point = optimal_allocation(cluster)
    argmin, grid_min = grid_minimize_objective(cluster, points_per_axis)
    below = max(0.0, (point.latency_bound - grid_min) / point.latency_bound)
    cell_miss = 0.0
    for r_grid, r_star, g in zip(argmin, point.finishers, cluster.groups):
        cell = g.workers / (points_per_axis + 1)
        cell_miss = max(cell_miss, abs(r_grid - r_star) / cell - 1.0)
    worst = max(below, cell_miss)
    return _report("grid-minimum", points_per_axis ** cluster.group_count,
                   [worst], [worst], 1e-9)


def expectation_gap_report(cluster: ClusterSpec, samples: int = 200,
                           seed: int = 2) -> OracleReport:
    """The logarithmic order-statistic approximation must stay within
    its analytic Euler-Maclaurin error bound of the exact harmonic sum."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(samples):
        g = cluster.groups[rng.integers(cluster.group_count)]
        r = int(rng.integers(1, max(2, int(0.98 * g.workers))))
        exact = exact_order_statistic_mean(
            g.workers, r, g.mu, g.alpha, load=float(cluster.k), k=cluster.k)
        approx = g.alpha + math.log(g.workers / (g.workers - r)) / g.mu
        remaining = g.workers - r
        bound = (0.5 / remaining - 0.5 / g.workers
                 + 1.0 / (12.0 * remaining**2)) / g.mu
        ratios.append(abs(exact - approx) / bound)
    return _report("log-approximation-bound", samples, ratios, ratios, 1.0)


def run_all_oracles(cluster: ClusterSpec | None = None,
                    model: RuntimeModel = RuntimeModel.PER_TASK) -> list:
    """Every oracle applicable to the given cluster (a 2-group default
    when none is given).  Grid search only runs for up to 3 groups."""
    if cluster is None:
        cluster = ClusterSpec(
            groups=(GroupSpec(300, 4.0, 1.0), GroupSpec(600, 0.5, 1.0)),
            k=100_000)
    reports = [
        lambert_roundtrip_report(),
        lambert_agreement_report(),
        lambert_identity_report(),
        equalization_report(cluster, model),
        randomized_equalization_report(),
        budget_report(cluster),
        optimality_sampling_report(cluster),
        convexity_report(cluster),
        expectation_gap_report(cluster),
    ]
    if cluster.group_count <= 3:
        reports.append(grid_report(cluster))
    # Consistency of the two bound routes, exact for the per-row scaling.
    per_task = min_latency_bound(cluster, RuntimeModel.PER_TASK)
    per_row = min_latency_bound(cluster, RuntimeModel.PER_ROW)
    scale_err = abs(per_row - cluster.k * per_task) / per_row
    reports.append(_report("per-row-scaling", 1, [scale_err], [scale_err],
                           0.0))
    return reports
