"""Command-line interface: allocate | simulate | sweep-rate | verify.

Experiment configs are JSON::

    {
      "k": 1000000,
      "model": "per-task",
      "trials": 10000,
      "seed": 20260816,
      "groups": [{"workers": 300, "mu": 16.0, "alpha": 1.0}, ...],
      "schemes": [{"kind": "optimal"},
                  {"kind": "uniform", "n": "n_star"},
                  {"kind": "uniform", "rate": 0.5},
                  {"kind": "uncoded"},
                  {"kind": "fixed-r", "r": 100},
                  {"kind": "throughput-matched"}],
      "sweep": {"variable": "N_scale", "grid": [1, 10, 100]},
      "output_path": "out.csv"
    }

Exit codes: 0 success, 1 oracle failure, 2 configuration error.
"""

import argparse
import csv
import json
import math
import sys

from .allocation import (
    min_latency_bound,
    optimal_allocation,
    throughput_matched_allocation,
    uniform_allocation,
    fixed_r_allocation,
)
from .cluster import (
    ClusterSpec,
    GroupSpec,
    RuntimeModel,
    validate_cluster,
)
from .errors import ConfigError, HetallocError
from .simulate import simulate_latency
from .verify import run_all_oracles

_SWEEP_VARIABLES = ("N_scale", "mu_scale", "rate")
_SCHEME_KINDS = ("optimal", "uniform", "uncoded", "fixed-r",
                 "throughput-matched")

SIMULATE_COLUMNS = ("scheme", "N", "mean_latency", "std_error", "t_star",
                    "status")
SWEEP_RATE_COLUMNS = ("scheme", "rate", "mean_latency", "std_error", "status")
ALLOCATE_COLUMNS = ("sweep_variable", "sweep_value", "group", "workers", "mu",
                    "alpha", "finishers", "fraction", "factor", "load_real",
                    "load_int", "n_real", "n_int", "rate", "latency_bound",
                    "n_times_bound")
VERIFY_COLUMNS = ("name", "samples", "max_abs_error", "max_rel_error",
                  "tolerance", "passed")


class ExperimentConfig:
    """Parsed and validated experiment description."""

    def __init__(self, cluster, model, trials, seed, schemes, sweep,
                 output_path):
        self.cluster = cluster
        self.model = model
        self.trials = trials
        self.seed = seed
        self.schemes = schemes
        self.sweep = sweep
        self.output_path = output_path


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def parse_experiment_config(text: str) -> ExperimentConfig:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require(isinstance(payload, dict), "config must be a JSON object")

    _require("k" in payload, "config is missing 'k'")
    k = payload["k"]
    _require(isinstance(k, int) and k >= 1, f"'k' must be an integer >= 1, got {k!r}")

    groups_raw = payload.get("groups")
    _require(isinstance(groups_raw, list) and groups_raw,
             "'groups' must be a non-empty list")
    groups = []
    for i, g in enumerate(groups_raw):
        _require(isinstance(g, dict), f"group {i} must be an object")
        for key in ("workers", "mu", "alpha"):
            _require(key in g, f"group {i} is missing '{key}'")
        _require(isinstance(g["workers"], int) and g["workers"] >= 1,
                 f"group {i}: 'workers' must be an integer >= 1")
        groups.append(GroupSpec(workers=g["workers"], mu=float(g["mu"]),
                                alpha=float(g["alpha"])))
    cluster = ClusterSpec(groups=tuple(groups), k=k)

    model_name = payload.get("model", "per-task")
    try:
        model = RuntimeModel(model_name)
    except ValueError:
        raise ConfigError(
            f"'model' must be 'per-task' or 'per-row', got {model_name!r}")

    trials = payload.get("trials", 1000)
    _require(isinstance(trials, int) and trials >= 1,
             f"'trials' must be an integer >= 1, got {trials!r}")
    seed = payload.get("seed", 0)
    _require(isinstance(seed, int) and seed >= 0,
             f"'seed' must be a non-negative integer, got {seed!r}")

    schemes = payload.get("schemes", [{"kind": "optimal"}])
    _require(isinstance(schemes, list) and schemes,
             "'schemes' must be a non-empty list")
    for i, s in enumerate(schemes):
        _require(isinstance(s, dict) and "kind" in s,
                 f"scheme {i} must be an object with a 'kind'")
        _require(s["kind"] in _SCHEME_KINDS,
                 f"scheme {i}: unknown kind {s['kind']!r}; "
                 f"expected one of {_SCHEME_KINDS}")
        if s["kind"] == "uniform":
            _require(("n" in s) != ("rate" in s),
                     f"scheme {i}: uniform takes exactly one of 'n' or "
                     "'rate'")
        if s["kind"] == "fixed-r":
            _require("r" in s and float(s["r"]) >= 1,
                     f"scheme {i}: fixed-r needs 'r' >= 1")

    sweep = payload.get("sweep")
    if sweep is not None:
        _require(isinstance(sweep, dict), "'sweep' must be an object")
        _require(sweep.get("variable") in _SWEEP_VARIABLES,
                 f"sweep variable must be one of {_SWEEP_VARIABLES}")
        grid = sweep.get("grid")
        _require(isinstance(grid, list) and grid,
                 "sweep 'grid' must be a non-empty list of numbers")
        _require(all(isinstance(v, (int, float)) and v > 0 for v in grid),
                 "sweep grid values must be positive numbers")

    output_path = payload.get("output_path")
    if output_path is not None:
        _require(isinstance(output_path, str), "'output_path' must be a string")

    return ExperimentConfig(cluster, model, trials, seed, schemes, sweep,
                            output_path)


def load_experiment_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_experiment_config(text)


def _check_cluster(cluster) -> None:
    """Print warnings; raise ConfigError on error-class violations."""
    violations = validate_cluster(cluster)
    errors = [v for v in violations if v.severity == "error"]
    for v in violations:
        if v.severity == "warning":
            print(f"warning: [{v.code}] {v.message}", file=sys.stderr)
    if errors:
        lines = "; ".join(f"[{v.code}] {v.message}" for v in errors)
        raise ConfigError(f"cluster fails validation: {lines}")


def _scaled_cluster(cluster, variable, value):
    if variable == "mu_scale":
        groups = tuple(GroupSpec(g.workers, g.mu * value, g.alpha)
                       for g in cluster.groups)
    elif variable == "N_scale":
        groups = tuple(
            GroupSpec(max(1, int(round(g.workers * value))), g.mu, g.alpha)
            for g in cluster.groups)
    else:
        raise ConfigError(f"cannot scale a cluster by {variable!r}")
    return ClusterSpec(groups=groups, k=cluster.k)


def _scheme_label(scheme: dict) -> str:
    if "label" in scheme:
        return str(scheme["label"])
    kind = scheme["kind"]
    if kind == "uniform":
        if "rate" in scheme:
            return f"uniform-rate={scheme['rate']:g}"
        return ("uniform-n-star" if scheme["n"] == "n_star"
                else f"uniform-n={scheme['n']}")
    if kind == "fixed-r":
        return f"fixed-r={scheme['r']:g}"
    return kind


def _build_allocation(scheme: dict, cluster, model):
    kind = scheme["kind"]
    if kind == "optimal":
        alloc, _ = optimal_allocation(cluster, model)
        return alloc
    if kind == "uncoded":
        return uniform_allocation(cluster, cluster.k)
    if kind == "uniform":
        if "rate" in scheme:
            n = int(round(cluster.k / float(scheme["rate"])))
        elif scheme["n"] == "n_star":
            n = optimal_allocation(cluster, model)[0].n_int
        else:
            n = int(scheme["n"])
        return uniform_allocation(cluster, n)
    if kind == "fixed-r":
        alloc, _ = fixed_r_allocation(cluster, float(scheme["r"]))
        return alloc
    if kind == "throughput-matched":
        return throughput_matched_allocation(cluster)
    raise ConfigError(f"unknown scheme kind {kind!r}")


def _write_rows(columns, rows, out_path):
    """CSV to out_path, or to stdout when no path is given."""
    if out_path:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            writer.writerows(rows)
    else:
        writer = csv.DictWriter(sys.stdout, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def _sweep_points(config):
    if config.sweep is None:
        return [(None, None)]
    variable = config.sweep["variable"]
    return [(variable, float(v)) for v in config.sweep["grid"]]


def cmd_allocate(config: ExperimentConfig, out_path) -> int:
    rows = []
    for variable, value in _sweep_points(config):
        if variable == "rate":
            raise ConfigError("allocate does not sweep 'rate'; "
                              "use sweep-rate")
        cluster = (config.cluster if variable is None
                   else _scaled_cluster(config.cluster, variable, value))
        _check_cluster(cluster)
        alloc, point = optimal_allocation(cluster, config.model)
        n_workers = cluster.total_workers
        rate = cluster.k / alloc.n_real
        for j, g in enumerate(cluster.groups):
            rows.append({
                "sweep_variable": variable or "none",
                "sweep_value": 1.0 if value is None else value,
                "group": j,
                "workers": g.workers,
                "mu": g.mu,
                "alpha": g.alpha,
                "finishers": point.finishers[j],
                "fraction": point.fractions[j],
                "factor": point.factors[j],
                "load_real": alloc.loads_real[j],
                "load_int": alloc.loads_int[j],
                "n_real": alloc.n_real,
                "n_int": alloc.n_int,
                "rate": rate,
                "latency_bound": point.latency_bound,
                "n_times_bound": n_workers * point.latency_bound,
            })
    header = (f"{'group':>5} {'workers':>8} {'mu':>8} {'alpha':>7} "
              f"{'finishers':>12} {'fraction':>9} {'load_real':>12} "
              f"{'load_int':>9}")
    last_key = None
    for i, row in enumerate(rows):
        key = (row["sweep_variable"], row["sweep_value"])
        if key != last_key:
            if row["sweep_variable"] != "none":
                print(f"-- {row['sweep_variable']} = {row['sweep_value']:g}")
            print(header)
            last_key = key
        print(f"{row['group']:>5} {row['workers']:>8} {row['mu']:>8g} "
              f"{row['alpha']:>7g} {row['finishers']:>12.4f} "
              f"{row['fraction']:>9.5f} {row['load_real']:>12.4f} "
              f"{row['load_int']:>9}")
        end_of_point = (i + 1 == len(rows)
                        or (rows[i + 1]["sweep_variable"],
                            rows[i + 1]["sweep_value"]) != key)
        if end_of_point:
            print(f"n* = {row['n_real']:.4f} (ceil {row['n_int']}), "
                  f"rate = {row['rate']:.5f}, bound = "
                  f"{row['latency_bound']:.8g}, N x bound = "
                  f"{row['n_times_bound']:.8g}")
    if out_path:
        _write_rows(ALLOCATE_COLUMNS, rows, out_path)
    return 0


def cmd_simulate(config: ExperimentConfig, out_path) -> int:
    rows = []
    for variable, value in _sweep_points(config):
        if variable == "rate":
            raise ConfigError("simulate does not sweep 'rate'; "
                              "use sweep-rate")
        cluster = (config.cluster if variable is None
                   else _scaled_cluster(config.cluster, variable, value))
        _check_cluster(cluster)
        n_workers = cluster.total_workers
        try:
            t_star = min_latency_bound(cluster, config.model)
        except HetallocError as exc:
            for scheme in config.schemes:
                rows.append({"scheme": _scheme_label(scheme), "N": n_workers,
                             "mean_latency": "", "std_error": "",
                             "t_star": "", "status": type(exc).__name__})
            continue
        for scheme in config.schemes:
            label = _scheme_label(scheme)
            try:
                alloc = _build_allocation(scheme, cluster, config.model)
                estimate = simulate_latency(
                    cluster, alloc, config.model, config.trials, config.seed)
            except HetallocError as exc:
                rows.append({"scheme": label, "N": n_workers,
                             "mean_latency": "", "std_error": "",
                             "t_star": t_star, "status": type(exc).__name__})
                continue
            rows.append({"scheme": label, "N": n_workers,
                         "mean_latency": estimate.mean,
                         "std_error": estimate.std_error,
                         "t_star": t_star, "status": "ok"})
    _write_rows(SIMULATE_COLUMNS, rows, out_path)
    return 0


def cmd_sweep_rate(config: ExperimentConfig, out_path) -> int:
    if config.sweep is None or config.sweep["variable"] != "rate":
        raise ConfigError("sweep-rate needs sweep.variable == 'rate'")
    _check_cluster(config.cluster)
    cluster = config.cluster
    rows = []
    for rate in config.sweep["grid"]:
        rate = float(rate)
        status = "ok"
        mean = std_error = ""
        try:
            if rate > 1.0:
                raise ConfigError(f"rate {rate!r} exceeds 1")
            n = int(round(cluster.k / rate))
            alloc = uniform_allocation(cluster, n)
            estimate = simulate_latency(
                cluster, alloc, config.model, config.trials, config.seed)
            mean, std_error = estimate.mean, estimate.std_error
        except HetallocError as exc:
            status = type(exc).__name__
        rows.append({"scheme": "uniform-fixed-n", "rate": rate,
                     "mean_latency": mean, "std_error": std_error,
                     "status": status})
    alloc, _ = optimal_allocation(cluster, config.model)
    estimate = simulate_latency(cluster, alloc, config.model, config.trials,
                                config.seed)
    rows.append({"scheme": "optimal", "rate": cluster.k / alloc.n_real,
                 "mean_latency": estimate.mean,
                 "std_error": estimate.std_error, "status": "ok"})
    _write_rows(SWEEP_RATE_COLUMNS, rows, out_path)
    return 0


def cmd_verify(config: ExperimentConfig | None, out_path) -> int:
    cluster = model = None
    if config is not None:
        _check_cluster(config.cluster)
        cluster, model = config.cluster, config.model
    reports = run_all_oracles(cluster) if model is None else \
        run_all_oracles(cluster, model)
    rows = []
    failed = 0
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        failed += 0 if r.passed else 1
        print(f"{status} {r.name}: samples={r.samples} "
              f"max_abs_error={r.max_abs_error:.3e} "
              f"max_rel_error={r.max_rel_error:.3e} tol={r.tolerance:.1e}")
        rows.append({"name": r.name, "samples": r.samples,
                     "max_abs_error": r.max_abs_error,
                     "max_rel_error": r.max_rel_error,
                     "tolerance": r.tolerance, "passed": r.passed})
    if out_path:
        _write_rows(VERIFY_COLUMNS, rows, out_path)
    print(f"{len(reports) - failed}/{len(reports)} oracles passed")
    return 0 if failed == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetalloc",
        description="Load allocation and latency simulation for coded "
                    "matrix-vector clusters")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("allocate", "simulate", "sweep-rate", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=(name != "verify"),
                       help="path to a JSON experiment config")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--trials", type=int, default=None,
                       help="override the config trial count")
        p.add_argument("--out", default=None,
                       help="write CSV output to this path")
        p.add_argument("--model", choices=[m.value for m in RuntimeModel],
                       default=None, help="override the runtime model")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = None
        if args.config is not None:
            config = load_experiment_config(args.config)
            if args.seed is not None:
                if args.seed < 0:
                    raise ConfigError("--seed must be non-negative")
                config.seed = args.seed
            if args.trials is not None:
                if args.trials < 1:
                    raise ConfigError("--trials must be >= 1")
                config.trials = args.trials
            if args.model is not None:
                config.model = RuntimeModel(args.model)
        out_path = args.out or (config.output_path if config else None)

        if args.command == "allocate":
            return cmd_allocate(config, out_path)
        if args.command == "simulate":
            return cmd_simulate(config, out_path)
        if args.command == "sweep-rate":
            return cmd_sweep_rate(config, out_path)
        return cmd_verify(config, out_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
