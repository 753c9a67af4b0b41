"""Tour of the closed-form machinery: optimal loads, latency bounds,
and the structural identities they satisfy.

Run: python3 demos/closed_form_tour.py  (finishes in well under a second)
"""

from hetalloc import (
    ClusterSpec,
    GroupSpec,
    RuntimeModel,
    min_latency_bound,
    optimal_allocation,
    throughput_matched_allocation,
)


def show(cluster, title):
    alloc, point = optimal_allocation(cluster)
    print(f"\n== {title} ==")
    print(f"{'group':>5} {'workers':>8} {'mu':>6} {'alpha':>6} "
          f"{'load':>10} {'finishers':>11} {'fraction':>9}")
    for j, g in enumerate(cluster.groups):
        print(f"{j:>5} {g.workers:>8} {g.mu:>6g} {g.alpha:>6g} "
              f"{alloc.loads_real[j]:>10.4f} {point.finishers[j]:>11.2f} "
              f"{point.fractions[j]:>9.4f}")
    rate = cluster.k / alloc.n_real
    print(f"rows stored n* = {alloc.n_real:.1f} (ceil {alloc.n_int}), "
          f"code rate k/n* = {rate:.4f}")
    print(f"latency bound = {point.latency_bound:.6e}")
    return alloc, point


def main():
    # One speed class: everything collapses to a single Lambert-branch
    # evaluation.
    single = ClusterSpec(groups=(GroupSpec(1000, 1.0, 1.0),), k=10_000)
    show(single, "1000 identical workers")

    # Three speed classes. Faster groups take more rows per worker, but
    # the expected finish time of each group comes out equal; that
    # equalization is what makes the allocation optimal.
    mixed = ClusterSpec(groups=(GroupSpec(1000, 2.0, 1.0),
                                GroupSpec(2000, 1.0, 1.0),
                                GroupSpec(3000, 0.5, 1.0)), k=10_000)
    alloc, point = show(mixed, "three speed classes")
    latencies = [l * f / mixed.k
                 for l, f in zip(alloc.loads_real, point.factors)]
    print("per-group expected latency:",
          " ".join(f"{t:.6e}" for t in latencies))

    # Replicating the cluster c times divides the bound by c exactly.
    print("\n== bound scales as 1/workers ==")
    for c in (1, 2, 10):
        scaled = ClusterSpec(
            groups=tuple(GroupSpec(g.workers * c, g.mu, g.alpha)
                         for g in mixed.groups), k=mixed.k)
        t = min_latency_bound(scaled)
        print(f"x{c:<3} total={scaled.total_workers:>6} "
              f"bound={t:.6e}  workers*bound={scaled.total_workers * t:.8f}")

    # The per-row runtime model multiplies every completion time by k,
    # so its bound is exactly k times the per-task one and the loads
    # do not move.
    t_task = min_latency_bound(mixed)
    t_row = min_latency_bound(mixed, RuntimeModel.PER_ROW)
    print(f"\nper-row bound / per-task bound = {t_row / t_task:.1f} "
          f"(k = {mixed.k})")

    # The throughput-matched baseline solves a different-looking fixed
    # point yet lands on identical loads; the two derivations describe
    # the same optimum.
    base = throughput_matched_allocation(mixed)
    gap = max(abs(a - b) / a
              for a, b in zip(alloc.loads_real, base.loads_real))
    print(f"throughput-matched vs optimal loads, worst rel gap = {gap:.2e}")


if __name__ == "__main__":
    main()
