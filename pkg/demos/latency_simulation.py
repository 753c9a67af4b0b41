"""Monte Carlo check of the analytic story: the optimal allocation's
simulated latency hugs the bound, alternatives pay real penalties, and
the fixed-finisher scheme flattens out at 1/r as the cluster grows.

Run: python3 demos/latency_simulation.py  (a few seconds)
"""

from hetalloc import (
    ClusterSpec,
    GroupSpec,
    RuntimeModel,
    fixed_r_allocation,
    optimal_allocation,
    simulate_latency,
    uniform_allocation,
)

TRIALS = 2000
SEED = 2026


def five_group(scale):
    return ClusterSpec(
        groups=tuple(GroupSpec(w * scale, m, 1.0) for w, m in
                     zip((30, 40, 50, 60, 70), (16.0, 12.0, 8.0, 4.0, 1.0))),
        k=100_000)


def run(cluster, alloc, seed):
    est = simulate_latency(cluster, alloc, RuntimeModel.PER_TASK, TRIALS,
                           seed=seed)
    return est.mean, est.std_error


def main():
    cluster = five_group(scale=10)  # 2500 workers, five speed classes
    opt_alloc, point = optimal_allocation(cluster)
    bound = point.latency_bound
    print(f"cluster: {cluster.total_workers} workers in "
          f"{cluster.group_count} groups, k = {cluster.k}")
    print(f"analytic minimum latency = {bound:.6e}\n")

    rows = [
        ("optimal", opt_alloc),
        ("uniform, same total rows", uniform_allocation(cluster,
                                                        opt_alloc.n_int)),
        ("uniform, rate 1/2", uniform_allocation(cluster, 2 * cluster.k)),
        ("fixed 100 finishers", fixed_r_allocation(cluster, 100.0)[0]),
    ]
    print(f"{'scheme':<26} {'mc mean':>12} {'std err':>10} {'vs bound':>9}")
    for i, (name, alloc) in enumerate(rows):
        mean, se = run(cluster, alloc, SEED + i)
        print(f"{name:<26} {mean:>12.6e} {se:>10.2e} {mean / bound:>9.3f}")

    # the fixed-finisher scheme ignores cluster growth: its latency
    # settles at 1/r no matter how many workers join
    print("\nfixed r = 100 while the cluster grows (target 1/r = 1e-2):")
    print(f"{'workers':>8} {'mc mean':>12} {'optimal mc':>12} {'gain':>7}")
    for scale in (10, 100):
        big = five_group(scale)
        fr_alloc, _ = fixed_r_allocation(big, 100.0)
        fr_mean, _ = run(big, fr_alloc, SEED + 10 + scale)
        op_alloc, _ = optimal_allocation(big)
        op_mean, _ = run(big, op_alloc, SEED + 20 + scale)
        print(f"{big.total_workers:>8} {fr_mean:>12.6e} {op_mean:>12.6e} "
              f"{fr_mean / op_mean:>6.1f}x")


if __name__ == "__main__":
    main()
