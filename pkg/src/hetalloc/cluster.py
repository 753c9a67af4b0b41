"""Cluster description, shared domain types, validation, and config text."""

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidCluster

# mu at or above this is outside the runtime model's double-precision
# comfort zone (the W argument is about to underflow); warning class.
MODEL_VALIDITY_MU = 750.0
# alpha*mu below this loses so much precision near the W branch point
# that the equalization guarantees cannot be met; error class.
VIABILITY_ALPHA_MU = 1e-6


class RuntimeModel(Enum):
    """Worker runtime distribution family."""

    # Shifted exponential whose shift and rate both scale with the
    # per-worker load fraction l/k.
    PER_TASK = "per-task"
    # Shifted exponential applied per assigned row: shift alpha*l, rate mu/l.
    PER_ROW = "per-row"


class Scheme(Enum):
    """How an Allocation's loads were chosen."""

    OPTIMAL = "optimal"
    UNIFORM_FIXED_N = "uniform-fixed-n"
    FIXED_R = "fixed-r"
    THROUGHPUT_MATCHED = "throughput-matched"
    CUSTOM = "custom"


@dataclass(frozen=True)
class GroupSpec:
    """One homogeneous group of workers.

    workers: number of workers in the group (>= 1)
    mu: straggling rate of the exponential tail (> 0)
    alpha: deterministic per-row shift (> 0)
    """

    workers: int
    mu: float
    alpha: float


@dataclass(frozen=True)
class ClusterSpec:
    """A heterogeneous cluster plus the row count k to recover."""

    groups: tuple
    k: int

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))

    @property
    def group_count(self) -> int:
        return len(self.groups)

    @property
    def total_workers(self) -> int:
        return sum(g.workers for g in self.groups)


@dataclass(frozen=True)
class Violation:
    """One validation finding; severity is 'error' or 'warning'."""

    code: str
    severity: str
    message: str
    group_index: int | None = None


@dataclass(frozen=True)
class Allocation:
    """Per-group loads, real-valued and ceil-rounded, plus totals.

    implied_finishers is only set by the uniform scheme: the real-valued
    number of workers whose results recover k rows.
    """

    loads_real: tuple
    loads_int: tuple
    n_real: float
    n_int: int
    scheme: Scheme
    implied_finishers: float | None = None

    @classmethod
    def from_real_loads(cls, loads, cluster: ClusterSpec, scheme: Scheme,
                        implied_finishers: float | None = None):
        loads_real = tuple(float(l) for l in loads)
        loads_int = tuple(math.ceil(l) for l in loads_real)
        n_real = float(sum(g.workers * l
                           for g, l in zip(cluster.groups, loads_real)))
        n_int = int(sum(g.workers * l
                        for g, l in zip(cluster.groups, loads_int)))
        return cls(loads_real, loads_int, n_real, n_int, scheme,
                   implied_finishers)


@dataclass(frozen=True)
class OptimalPoint:
    """The analytic optimum of the expected-latency objective.

    finishers: expected responding workers per group (real-valued)
    fractions: finishers / workers per group
    factors: per-unit-load latency factor of each group at the optimum
    latency_bound: the minimum achievable expected latency
    """

    finishers: tuple
    fractions: tuple
    factors: tuple
    latency_bound: float
    model: RuntimeModel


@dataclass(frozen=True)
class LatencyEstimate:
    """Monte Carlo latency estimate with its sampling uncertainty."""

    mean: float
    std_error: float
    trials: int
    seed: int


def validate_cluster(cluster: ClusterSpec) -> list:
    """Return every invariant violation found, warnings included."""
    violations = []
    if cluster.group_count == 0:
        violations.append(Violation(
            "EmptyGroups", "error", "cluster has no groups"))
    if int(cluster.k) != cluster.k or cluster.k < 1:
        violations.append(Violation(
            "NonPositiveK", "error",
            f"k must be a positive integer, got {cluster.k!r}"))
    for j, g in enumerate(cluster.groups):
        if int(g.workers) != g.workers or g.workers < 1:
            violations.append(Violation(
                "NonPositiveWorkers", "error",
                f"group {j}: workers must be a positive integer, "
                f"got {g.workers!r}", j))
        if not g.mu > 0:
            violations.append(Violation(
                "NonPositiveRate", "error",
                f"group {j}: straggling rate mu must be > 0, got {g.mu!r}", j))
        if not g.alpha > 0:
            violations.append(Violation(
                "NonPositiveShift", "error",
                f"group {j}: shift alpha must be > 0, got {g.alpha!r}", j))
        if g.mu > 0 and g.alpha > 0:
            if g.mu >= MODEL_VALIDITY_MU:
                violations.append(Violation(
                    "RateAboveModelValidityThreshold", "warning",
                    f"group {j}: mu={g.mu!r} is at or above "
                    f"{MODEL_VALIDITY_MU:g}; the runtime model loses "
                    "double-precision validity", j))
            if math.exp(-(g.alpha * g.mu + 1.0)) == 0.0:
                violations.append(Violation(
                    "WArgumentUnderflow", "error",
                    f"group {j}: exp(-(alpha*mu+1)) underflows to 0 for "
                    f"alpha*mu={g.alpha * g.mu!r}; allocation is not "
                    "computable in doubles", j))
            elif g.alpha * g.mu < VIABILITY_ALPHA_MU:
                violations.append(Violation(
                    "RateShiftProductBelowViability", "error",
                    f"group {j}: alpha*mu={g.alpha * g.mu!r} is below "
                    f"{VIABILITY_ALPHA_MU:g}; branch-point cancellation "
                    "would exceed the accuracy guarantees", j))
    return violations


def ensure_valid(cluster: ClusterSpec) -> None:
    """Raise InvalidCluster if any error-class violation exists."""
    errors = [v for v in validate_cluster(cluster) if v.severity == "error"]
    if errors:
        raise InvalidCluster(errors)


def cluster_to_config(cluster: ClusterSpec) -> str:
    """Serialize a ClusterSpec to JSON config text."""
    payload = {
        "k": int(cluster.k),
        "groups": [
            {"workers": int(g.workers), "mu": float(g.mu),
             "alpha": float(g.alpha)}
            for g in cluster.groups
        ],
    }
    return json.dumps(payload, indent=2)


def cluster_from_config(text: str) -> ClusterSpec:
    """Parse JSON config text back into a ClusterSpec."""
    payload = json.loads(text)
    groups = tuple(
        GroupSpec(workers=int(g["workers"]), mu=float(g["mu"]),
                  alpha=float(g["alpha"]))
        for g in payload["groups"]
    )
    return ClusterSpec(groups=groups, k=int(payload["k"]))
