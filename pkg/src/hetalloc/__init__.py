"""Load allocation for coded matrix-vector multiplication on heterogeneous
clusters.

Workers are grouped by speed; each group has an exponential service rate, a
deterministic startup shift, and a worker count. The library computes the
load split that minimizes expected completion time of the fastest decodable
subset, evaluates closed-form latency bounds, and checks both against Monte
Carlo order-statistic simulation and independent numerical oracles.
"""

from .allocation import (
    fixed_r_allocation,
    group_expected_latency,
    latency_objective,
    load_latency_factor,
    min_latency_bound,
    optimal_allocation,
    optimal_finishers,
    throughput_matched_allocation,
    uniform_allocation,
)
from .cluster import (
    Allocation,
    ClusterSpec,
    GroupSpec,
    LatencyEstimate,
    OptimalPoint,
    RuntimeModel,
    Scheme,
    Violation,
    cluster_from_config,
    cluster_to_config,
    ensure_valid,
    validate_cluster,
)
from .errors import (
    ComplexityGuard,
    ConfigError,
    DomainError,
    HetallocError,
    Infeasible,
    InvalidCluster,
    InvalidRate,
    NoSolution,
    ShiftMismatch,
    UnderflowError,
)
from .simulate import (
    TrialOutcome,
    asymptotic_variance,
    sample_worker_time,
    simulate_latency,
    trial_latencies,
    trial_outcomes,
)
from .special import harmonic, lambert_w_minus1
from .verify import (
    OracleReport,
    equalization_residual,
    exact_order_statistic_mean,
    grid_minimize_objective,
    lambert_bisection_oracle,
    randomized_equalization_report,
    run_all_oracles,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "ClusterSpec",
    "ComplexityGuard",
    "ConfigError",
    "DomainError",
    "GroupSpec",
    "HetallocError",
    "Infeasible",
    "InvalidCluster",
    "InvalidRate",
    "LatencyEstimate",
    "NoSolution",
    "OptimalPoint",
    "OracleReport",
    "RuntimeModel",
    "Scheme",
    "ShiftMismatch",
    "TrialOutcome",
    "UnderflowError",
    "Violation",
    "asymptotic_variance",
    "cluster_from_config",
    "cluster_to_config",
    "ensure_valid",
    "equalization_residual",
    "exact_order_statistic_mean",
    "fixed_r_allocation",
    "grid_minimize_objective",
    "group_expected_latency",
    "harmonic",
    "lambert_bisection_oracle",
    "lambert_w_minus1",
    "latency_objective",
    "load_latency_factor",
    "min_latency_bound",
    "optimal_allocation",
    "optimal_finishers",
    "randomized_equalization_report",
    "run_all_oracles",
    "sample_worker_time",
    "simulate_latency",
    "throughput_matched_allocation",
    "trial_latencies",
    "trial_outcomes",
    "uniform_allocation",
    "validate_cluster",
]
