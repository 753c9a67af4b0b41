"""Monte Carlo latency estimation for coded clusters."""

import math
from dataclasses import dataclass

import numpy as np

from .cluster import (
    Allocation,
    ClusterSpec,
    GroupSpec,
    LatencyEstimate,
    RuntimeModel,
)
from .errors import DomainError, Infeasible

# Relative slack on the k-row completion threshold so real-valued loads
# that sum to k within float error do not demand one extra finisher.
_COMPLETION_SLACK = 1e-12


@dataclass(frozen=True)
class TrialOutcome:
    """One simulated trial: completion time and finishers per group."""

    completion_time: float
    finishers_per_group: tuple


def _shift_scale(group: GroupSpec, load: float, k: int, model: RuntimeModel):
    if model is RuntimeModel.PER_TASK:
        return group.alpha * load / k, load / (k * group.mu)
    return group.alpha * load, load / group.mu


def sample_worker_time(group: GroupSpec, load: float, k: int,
                       model: RuntimeModel, u):
    """Map uniform variates u in [0, 1) to worker completion times by
    inverting the runtime CDF.  u -> 0 gives exactly the deterministic
    shift."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < 0.0) or np.any(u >= 1.0):
        raise DomainError("uniform variates must lie in [0, 1)")
    if load <= 0:
        raise DomainError(f"load must be positive, got {load!r}")
    shift, scale = _shift_scale(group, load, k, model)
    times = shift + scale * -np.log1p(-u)
    return float(times) if times.ndim == 0 else times


def _worker_arrays(cluster: ClusterSpec, alloc: Allocation,
                   model: RuntimeModel, use_integer_loads: bool):
    """Per-worker shift/scale/load vectors, laid out group-contiguous."""
    loads = alloc.loads_int if use_integer_loads else alloc.loads_real
    counts = [g.workers for g in cluster.groups]
    shifts, scales = [], []
    for g, l in zip(cluster.groups, loads):
        if l <= 0:
            raise DomainError(f"loads must be positive, got {l!r}")
        sh, sc = _shift_scale(g, l, cluster.k, model)
        shifts.append(sh)
        scales.append(sc)
    shift = np.repeat(shifts, counts)
    scale = np.repeat(scales, counts)
    load_w = np.repeat(np.asarray(loads, dtype=np.float64), counts)
    group_id = np.repeat(np.arange(len(counts)), counts)
    return shift, scale, load_w, group_id


def _trial_uniforms(seed: int, trial: int, n: int) -> np.ndarray:
    """Counter-based stream for one trial: variate i belongs to worker i
    regardless of chunking or execution order."""
    ss = np.random.SeedSequence(entropy=(seed & (2**64 - 1), trial))
    return np.random.Generator(np.random.Philox(ss)).random(n)


def _run(cluster: ClusterSpec, alloc: Allocation, model: RuntimeModel,
         trials: int, seed: int, use_integer_loads: bool,
         chunk_trials: int, want_finishers: bool):
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    shift, scale, load_w, group_id = _worker_arrays(
        cluster, alloc, model, use_integer_loads)
    n_workers = load_w.shape[0]
    k_threshold = cluster.k * (1.0 - _COMPLETION_SLACK)
    if load_w.sum() < k_threshold:
        raise Infeasible(
            f"allocation provides {load_w.sum()!r} rows in total, fewer "
            f"than k={cluster.k}")

    latencies = np.empty(trials)
    finishers = (np.zeros((trials, cluster.group_count), dtype=np.int64)
                 if want_finishers else None)
    for start in range(0, trials, chunk_trials):
        stop = min(start + chunk_trials, trials)
        m = stop - start
        u = np.empty((m, n_workers))
        for i in range(m):
            u[i] = _trial_uniforms(seed, start + i, n_workers)
        times = shift + scale * -np.log1p(-u)
        # Stable sort: ties resolve by worker index.
        order = np.argsort(times, axis=1, kind="stable")
        sorted_times = np.take_along_axis(times, order, axis=1)
        cumulative = np.cumsum(load_w[order], axis=1)
        crossing = (cumulative < k_threshold).sum(axis=1)
        latencies[start:stop] = sorted_times[np.arange(m), crossing]
        if want_finishers:
            for i in range(m):
                prefix = group_id[order[i, :crossing[i] + 1]]
                counts = np.bincount(prefix, minlength=cluster.group_count)
                finishers[start + i] = counts
    return latencies, finishers


def trial_latencies(cluster: ClusterSpec, alloc: Allocation,
                    model: RuntimeModel, trials: int, seed: int,
                    use_integer_loads: bool = True,
                    chunk_trials: int = 512) -> np.ndarray:
    """Per-trial completion times; deterministic in (cluster, alloc,
    trials, seed) and independent of chunk_trials."""
    latencies, _ = _run(cluster, alloc, model, trials, seed,
                        use_integer_loads, chunk_trials, False)
    return latencies


def trial_outcomes(cluster: ClusterSpec, alloc: Allocation,
                   model: RuntimeModel, trials: int, seed: int,
                   use_integer_loads: bool = True,
                   chunk_trials: int = 512) -> list:
    """Detailed per-trial outcomes including finisher counts per group."""
    latencies, finishers = _run(cluster, alloc, model, trials, seed,
                                use_integer_loads, chunk_trials, True)
    return [TrialOutcome(float(t), tuple(int(c) for c in f))
            for t, f in zip(latencies, finishers)]


def simulate_latency(cluster: ClusterSpec, alloc: Allocation,
                     model: RuntimeModel, trials: int, seed: int,
                     use_integer_loads: bool = True,
                     chunk_trials: int = 512) -> LatencyEstimate:
    """Monte Carlo estimate of the expected completion latency.

    Per trial, workers complete at inverse-CDF sampled times; the trial
    latency is the time of the worker whose completed rows first push the
    cumulative total to k.  Loads are the allocation's ceil-rounded
    integers unless use_integer_loads=False.
    """
    latencies, _ = _run(cluster, alloc, model, trials, seed,
                        use_integer_loads, chunk_trials, False)
    mean = float(np.mean(latencies))
    if trials > 1:
        std_error = float(np.std(latencies, ddof=1) / math.sqrt(trials))
    else:
        std_error = 0.0  # undefined from one trial; reported as zero
    return LatencyEstimate(mean=mean, std_error=std_error, trials=trials,
                           seed=seed)


def asymptotic_variance(group: GroupSpec, alloc_load: float, q: float,
                        cluster: ClusterSpec,
                        model: RuntimeModel = RuntimeModel.PER_TASK) -> float:
    """Large-N variance of the q-quantile order statistic of one group's
    completion times at a fixed per-worker load.

    Central-order-statistic asymptotics: q(1-q) / (N * f(eta_q)^2) with
    f the runtime density; for (shifted) exponentials
    f(eta_q) = rate * (1 - q) exactly.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile q must lie in (0, 1), got {q!r}")
    if alloc_load <= 0:
        raise DomainError(f"load must be positive, got {alloc_load!r}")
    _, scale = _shift_scale(group, alloc_load, cluster.k, model)
    rate = 1.0 / scale
    density_at_quantile = rate * (1.0 - q)
    return q * (1.0 - q) / (group.workers * density_at_quantile**2)
