"""How the optimal code rate k/n* behaves, and why forcing one uniform
rate costs latency.

Part 1 sweeps the second group's straggling rate and watches k/n*:
adding slightly-faster workers can push the optimal rate down before
faster ones pull it back up, so the surface is not monotone.

Part 2 simulates uniform allocations over a rate grid and compares the
best of them against the heterogeneous optimum.

Run: python3 demos/rate_surface.py  (about ten seconds)
"""

import numpy as np

from hetalloc import (
    ClusterSpec,
    GroupSpec,
    RuntimeModel,
    optimal_allocation,
    simulate_latency,
    uniform_allocation,
)


def spark(values):
    blocks = "▁▂▃▄▅▆▇█"
    lo, hi = min(values), max(values)
    span = (hi - lo) or 1.0
    return "".join(blocks[int((v - lo) / span * 7.999)] for v in values)


def main():
    print("== optimal code rate as the second group speeds up ==")
    print("group 1 fixed: 100 workers, rate 1.0; group 2: 1000 workers\n")
    mus = np.geomspace(1e-3, 10.0, 31)
    rates = []
    for mu2 in mus:
        cluster = ClusterSpec(groups=(GroupSpec(100, 1.0, 1.0),
                                      GroupSpec(1000, float(mu2), 1.0)),
                              k=1000)
        alloc, _ = optimal_allocation(cluster)
        rates.append(cluster.k / alloc.n_real)
    print("  mu2 from 0.001 to 10 (log spaced):", spark(rates))
    drop = min(range(1, len(rates)), key=lambda i: rates[i] - rates[i - 1])
    print(f"  k/n* falls from {rates[0]:.3f} to {min(rates):.3f} before "
          f"recovering to {rates[-1]:.3f}")
    print(f"  steepest drop near mu2 = {mus[drop]:.4f}: "
          f"{rates[drop - 1]:.4f} -> {rates[drop]:.4f}")
    print("  more workers are not enough information: their speed decides"
          " whether redundancy should grow or shrink\n")

    print("== best single rate vs heterogeneous loads ==")
    cluster = ClusterSpec(groups=(GroupSpec(300, 4.0, 1.0),
                                  GroupSpec(600, 0.5, 1.0)), k=100_000)
    grid = [0.30 + 0.05 * i for i in range(14)]
    means = []
    for i, rate in enumerate(grid):
        alloc = uniform_allocation(cluster, int(round(cluster.k / rate)))
        est = simulate_latency(cluster, alloc, RuntimeModel.PER_TASK, 2000,
                               seed=600 + i)
        means.append(est.mean)
    best = int(np.argmin(means))
    print("  latency over rates 0.30..0.95:", spark([-m for m in means]))
    print(f"  best uniform rate = {grid[best]:.2f} with mean latency "
          f"{means[best]:.6e}")

    opt_alloc, point = optimal_allocation(cluster)
    opt = simulate_latency(cluster, opt_alloc, RuntimeModel.PER_TASK, 2000,
                           seed=599)
    print(f"  optimal allocation (rate {cluster.k / opt_alloc.n_real:.3f}): "
          f"mean latency {opt.mean:.6e}")
    print(f"  improvement over best uniform: "
          f"{(1 - opt.mean / means[best]) * 100:.1f}% "
          f"(analytic bound {point.latency_bound:.6e})")


if __name__ == "__main__":
    main()
