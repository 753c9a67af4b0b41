"""Closed-form load allocations and expected-latency bounds."""

import math

from .cluster import (
    Allocation,
    ClusterSpec,
    GroupSpec,
    OptimalPoint,
    RuntimeModel,
    Scheme,
    ensure_valid,
)
from .errors import (
    DomainError,
    InvalidRate,
    NoSolution,
    ShiftMismatch,
    UnderflowError,
)
from .special import harmonic, lambert_w_minus1


def load_latency_factor(finishers: float, group: GroupSpec) -> float:
    """Per-unit-load expected latency of a group waiting for its
    `finishers` fastest workers out of `group.workers`.

    Uses the logarithmic approximation of the order-statistic mean;
    diverges as finishers -> workers.
    """
    r, n = float(finishers), group.workers
    if not 0.0 < r < n:
        raise DomainError(
            f"finishers must lie in (0, {n}), got {finishers!r}")
    return group.alpha + math.log(n / (n - r)) / group.mu


def group_expected_latency(load: float, finishers: float, group: GroupSpec,
                           k: int, model: RuntimeModel = RuntimeModel.PER_TASK,
                           exact: bool = False) -> float:
    """Expected time until `finishers` workers of the group complete
    `load` rows each.

    With exact=True the harmonic-sum form of the order-statistic mean is
    used (finishers must then be a whole number, and finishers == workers
    is allowed); otherwise the logarithmic approximation.
    """
    if load <= 0:
        raise DomainError(f"load must be positive, got {load!r}")
    prefactor = load / k if model is RuntimeModel.PER_TASK else load
    if exact:
        r = int(round(finishers))
        if abs(finishers - r) > 1e-9 or not 1 <= r <= group.workers:
            raise DomainError(
                "exact form needs a whole finisher count in "
                f"[1, {group.workers}], got {finishers!r}")
        tail = harmonic(group.workers) - harmonic(group.workers - r)
        return prefactor * (group.alpha + tail / group.mu)
    return prefactor * load_latency_factor(finishers, group)


def _w_at_optimum(group: GroupSpec) -> float:
    """Lambert W (lower branch) at the group's optimality argument."""
    arg = -math.exp(-(group.alpha * group.mu + 1.0))
    if arg == 0.0:
        raise UnderflowError(
            f"-exp(-(alpha*mu+1)) underflows to 0 for alpha*mu="
            f"{group.alpha * group.mu!r}")
    return lambert_w_minus1(arg)


def optimal_finishers(group: GroupSpec) -> float:
    """Expected number of responding workers that minimizes the group's
    contribution to the latency objective (real-valued, in (0, workers))."""
    return group.workers * (1.0 + 1.0 / _w_at_optimum(group))


def _optimum_terms(cluster: ClusterSpec):
    """Per-group (fraction, factor, throughput) at the optimum.

    throughput is finishers/factor = -mu*workers/W, whose sum is the
    reciprocal of the latency bound.
    """
    fractions, factors, throughputs = [], [], []
    for g in cluster.groups:
        w = _w_at_optimum(g)
        fractions.append(1.0 + 1.0 / w)
        factors.append(g.alpha + math.log(-w) / g.mu)
        throughputs.append(-g.mu * g.workers / w)
    return fractions, factors, throughputs


def min_latency_bound(cluster: ClusterSpec,
                      model: RuntimeModel = RuntimeModel.PER_TASK) -> float:
    """Minimum achievable expected latency over all load allocations."""
    ensure_valid(cluster)
    _, _, throughputs = _optimum_terms(cluster)
    bound = 1.0 / math.fsum(throughputs)
    if model is RuntimeModel.PER_ROW:
        bound = cluster.k * bound
    return bound


def optimal_allocation(cluster: ClusterSpec,
                       model: RuntimeModel = RuntimeModel.PER_TASK):
    """Latency-minimizing load split across groups.

    Returns (Allocation, OptimalPoint).  The same loads are optimal for
    both runtime models; only the latency bound scales (by k for the
    per-row model).
    """
    ensure_valid(cluster)
    fractions, factors, throughputs = _optimum_terms(cluster)
    total_throughput = math.fsum(throughputs)
    loads = [cluster.k / (f * total_throughput) for f in factors]
    bound = 1.0 / total_throughput
    if model is RuntimeModel.PER_ROW:
        bound = cluster.k * bound
    alloc = Allocation.from_real_loads(loads, cluster, Scheme.OPTIMAL)
    point = OptimalPoint(
        finishers=tuple(q * g.workers
                        for q, g in zip(fractions, cluster.groups)),
        fractions=tuple(fractions),
        factors=tuple(factors),
        latency_bound=bound,
        model=model,
    )
    return alloc, point


def latency_objective(finishers, cluster: ClusterSpec) -> float:
    """Expected-latency objective as a function of the per-group
    finisher counts, minimized by optimal_allocation.

    Strictly convex on the open box (0, workers_j) per group.
    """
    if len(finishers) != cluster.group_count:
        raise DomainError(
            f"need {cluster.group_count} finisher counts, "
            f"got {len(finishers)}")
    total = 0.0
    for r, g in zip(finishers, cluster.groups):
        total += float(r) / load_latency_factor(r, g)
    return 1.0 / total


def uniform_allocation(cluster: ClusterSpec, n: int) -> Allocation:
    """Spread an n-row budget evenly: every worker gets n/N rows.

    Requires n >= k (a code rate above 1 cannot recover the data).
    Records the implied real-valued finisher count k*N/n.
    """
    ensure_valid(cluster)
    if n < cluster.k:
        raise InvalidRate(
            f"total rows n={n} is below k={cluster.k}; rate would exceed 1")
    n_workers = cluster.total_workers
    load = n / n_workers
    implied = cluster.k * n_workers / n
    return Allocation.from_real_loads(
        [load] * cluster.group_count, cluster, Scheme.UNIFORM_FIXED_N,
        implied_finishers=implied)


def _fixed_r_lhs(r_first: float, cluster: ClusterSpec) -> float:
    """Left side of the fixed-recovery equalization equation, written in
    terms of the first group's finisher count."""
    g0 = cluster.groups[0]
    remaining = 1.0 - r_first / g0.workers
    total = r_first
    for g in cluster.groups[1:]:
        total += g.workers * (1.0 - remaining ** (g.mu / g0.mu))
    return total


def fixed_r_allocation(cluster: ClusterSpec, r: float):
    """Load split that equalizes group latencies when every worker gets
    k/r rows and any r of them recover the data.

    Returns (Allocation, finisher counts per group).  All groups must
    share one shift alpha (ShiftMismatch otherwise).  Raises NoSolution
    when r is outside the range the equalization equation can attain.
    """
    ensure_valid(cluster)
    alpha0 = cluster.groups[0].alpha
    for j, g in enumerate(cluster.groups[1:], start=1):
        if not math.isclose(g.alpha, alpha0, rel_tol=1e-12):
            raise ShiftMismatch(
                f"fixed-r equalization needs one shared alpha; group 0 has "
                f"{alpha0!r} but group {j} has {g.alpha!r}")
    if r < 1:
        raise InvalidRate(f"recovery threshold r must be >= 1, got {r!r}")

    g0 = cluster.groups[0]
    hi = g0.workers * (1.0 - 1e-12)
    attainable = _fixed_r_lhs(hi, cluster)
    if not r < attainable:
        raise NoSolution(
            f"no finisher split reaches r={r!r}; attainable range is "
            f"(0, {attainable!r}) for this cluster")

    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _fixed_r_lhs(mid, cluster) < r:
            lo = mid
        else:
            hi = mid
    r_first = 0.5 * (lo + hi)

    remaining = 1.0 - r_first / g0.workers
    finishers = [r_first]
    finishers += [g.workers * (1.0 - remaining ** (g.mu / g0.mu))
                  for g in cluster.groups[1:]]

    load = cluster.k / r
    alloc = Allocation.from_real_loads(
        [load] * cluster.group_count, cluster, Scheme.FIXED_R)
    return alloc, tuple(finishers)


def throughput_matched_allocation(cluster: ClusterSpec) -> Allocation:
    """Closed-form per-row-model baseline: loads inversely proportional
    to each group's expected per-row completion time at its optimal
    waiting point, normalized by the cluster's aggregate throughput."""
    ensure_valid(cluster)
    per_row_times = []
    for g in cluster.groups:
        w = _w_at_optimum(g)
        per_row_times.append(-(w + 1.0) / g.mu)
    aggregate = math.fsum(
        g.workers * g.mu / (1.0 + g.mu * d)
        for g, d in zip(cluster.groups, per_row_times))
    loads = [cluster.k / (aggregate * d) for d in per_row_times]
    return Allocation.from_real_loads(
        loads, cluster, Scheme.THROUGHPUT_MATCHED)
