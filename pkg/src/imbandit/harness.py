"""Experiment orchestration: horizon sweeps, repetitions, metrics, CSV output.

Every (algorithm, horizon, repetition) cell gets its own environment seeded
from the base seed and a stable hash of the cell key, so adding an algorithm
or horizon to a sweep never perturbs the other cells' randomness.  Floats in
CSV files are serialized with 9 significant digits, LF line endings.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import algorithms, oracle
from .cascade import CascadeEnvironment
from .graph import Graph, load_edge_list, with_weighted_cascade_probs

__all__ = [
    "ExperimentConfig",
    "RunSummary",
    "run_experiment",
    "cumulative_regret",
    "moving_average",
    "aggregate",
    "derive_seed",
    "load_graph_for_mode",
    "write_manifest",
    "ROUNDS_HEADER",
    "SUMMARY_HEADER",
    "AGGREGATE_HEADER",
]

KNOWN_ALGORITHMS = ("lofa", "etcg", "greedy-fixed")

ROUNDS_HEADER = "run_id,algorithm,k,T,rep,t,reward,activated"
SUMMARY_HEADER = "run_id,algorithm,k,T,rep,cumulative_reward,regret,benchmark_value,seconds,seeds"
AGGREGATE_HEADER = "algorithm,k,T,regret_mean,regret_std,reps"


@dataclass
class ExperimentConfig:
    graph_path: str
    k: int
    horizons: list[int]
    algorithms: list[str] = field(default_factory=lambda: ["lofa", "etcg"])
    repetitions: int = 10
    base_seed: int = 0
    window: int = 100
    out_dir: str = "results"
    prob_mode: str = "file"  # file | const:<p> | wc
    benchmark: str = "greedy"  # greedy | optimal
    eval_samples: int = 10_000
    mg_semantics: str = "diff"
    stride: int = 1
    jobs: int = 1

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.horizons or any(t < 2 for t in self.horizons):
            raise ValueError("horizons must be >= 2")
        if list(self.horizons) != sorted(set(self.horizons)):
            raise ValueError("horizons must be strictly increasing")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        for name in self.algorithms:
            if name not in KNOWN_ALGORITHMS:
                raise ValueError(f"unknown algorithm {name!r}; choose from {KNOWN_ALGORITHMS}")
        if not self.algorithms:
            raise ValueError("at least one algorithm required")
        if self.benchmark not in ("greedy", "optimal"):
            raise ValueError("benchmark must be 'greedy' or 'optimal'")
        if self.mg_semantics not in algorithms.MG_SEMANTICS:
            raise ValueError(f"mg_semantics must be one of {algorithms.MG_SEMANTICS}")
        if not (self.prob_mode in ("file", "wc") or self.prob_mode.startswith("const:")):
            raise ValueError("prob_mode must be 'file', 'wc', or 'const:<p>'")


@dataclass
class RunSummary:
    algorithm: str
    k: int
    horizon: int
    rep: int
    cumulative_reward: float
    regret: float
    benchmark_value: float
    seconds: float
    committed: list[int]

    @property
    def run_id(self) -> str:
        return f"{self.algorithm}_k{self.k}_T{self.horizon}_r{self.rep}"


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed from the base seed and a cell key."""
    text = ":".join([str(base_seed), *map(str, parts)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def load_graph_for_mode(path, mode: str) -> Graph:
    """Load an edge list with the configured probability assignment."""
    if mode == "file":
        return load_edge_list(path)
    if mode == "wc":
        return with_weighted_cascade_probs(load_edge_list(path, default_prob=1.0))
    if mode.startswith("const:"):
        return load_edge_list(path, default_prob=float(mode[len("const:"):]))
    raise ValueError(f"unknown probability mode {mode!r}")


def resolve_benchmark(graph: Graph, config: ExperimentConfig) -> tuple[float, list[int]]:
    """Benchmark per-round value and the reference seed set, cached beside the graph.

    'greedy' uses the sampled lazy-greedy solution; 'optimal' uses
    (1 - 1/e) * f(S*) from exhaustive search (tiny instances only).
    """
    if config.benchmark == "optimal":
        res = oracle.brute_force_best(graph, config.k)
        return (1.0 - 1.0 / math.e) * res.estimated_value, res.seed_set
    cache_path = str(config.graph_path) + ".bench"
    hit = oracle.load_cached_benchmark(cache_path, config.k, config.prob_mode)
    if hit is not None:
        return hit
    rng = np.random.default_rng(derive_seed(config.base_seed, "benchmark", config.k, config.prob_mode))
    res = oracle.offline_greedy(graph, config.k, config.eval_samples, rng)
    oracle.append_benchmark(cache_path, config.k, config.prob_mode, res.estimated_value, res.seed_set)
    return res.estimated_value, res.seed_set


def _run_cell(graph, algorithm, k, horizon, rep, seed, mg_semantics, bench_seeds):
    env = CascadeEnvironment(graph, horizon=horizon, seed=seed)
    start = time.perf_counter()
    if algorithm == "lofa":
        record = algorithms.lofa_run(env, k, mg_semantics=mg_semantics)
    elif algorithm == "etcg":
        record = algorithms.etcg_run(env, k)
    elif algorithm == "greedy-fixed":
        record = algorithms.fixed_run(env, bench_seeds)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return record, time.perf_counter() - start


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def run_experiment(config: ExperimentConfig):
    """Run the full sweep; returns (summaries, records) and writes the CSVs.

    Outputs in config.out_dir: one per-round CSV per run (`rounds_<run_id>.csv`,
    downsampled by config.stride), `summary.csv`, and `aggregate.csv`.
    Summary metrics always use the full-resolution trace.
    """
    config.validate()
    graph = load_graph_for_mode(config.graph_path, config.prob_mode)
    if config.k > graph.node_count:
        raise ValueError(f"k={config.k} exceeds node count {graph.node_count}")
    os.makedirs(config.out_dir, exist_ok=True)
    bench_value, bench_seeds = resolve_benchmark(graph, config)

    cells = [
        (algorithm, horizon, rep)
        for algorithm in config.algorithms
        for horizon in config.horizons
        for rep in range(config.repetitions)
    ]
    args = [
        (
            graph,
            algorithm,
            config.k,
            horizon,
            rep,
            derive_seed(config.base_seed, algorithm, config.k, horizon, rep),
            config.mg_semantics,
            bench_seeds,
        )
        for algorithm, horizon, rep in cells
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_cell_star, args))
    else:
        results = [_run_cell(*a) for a in args]

    summaries: list[RunSummary] = []
    records: dict[str, algorithms.RunRecord] = {}
    for (algorithm, horizon, rep), (record, seconds) in zip(cells, results):
        cum = record.cumulative_reward
        summary = RunSummary(
            algorithm=algorithm,
            k=config.k,
            horizon=horizon,
            rep=rep,
            cumulative_reward=cum,
            regret=horizon * bench_value - cum,
            benchmark_value=bench_value,
            seconds=seconds,
            committed=record.committed,
        )
        summaries.append(summary)
        records[summary.run_id] = record
        _write_rounds_csv(config.out_dir, summary, record, config.stride)

    summaries.sort(key=lambda s: (s.algorithm, s.horizon, s.rep))
    _write_summary_csv(os.path.join(config.out_dir, "summary.csv"), summaries)
    _write_aggregate_csv(os.path.join(config.out_dir, "aggregate.csv"), aggregate(summaries))
    return summaries, records


def _run_cell_star(args):
    return _run_cell(*args)


def _write_rounds_csv(out_dir, summary: RunSummary, record, stride: int) -> None:
    path = os.path.join(out_dir, f"rounds_{summary.run_id}.csv")
    prefix = f"{summary.run_id},{summary.algorithm},{summary.k},{summary.horizon},{summary.rep}"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ROUNDS_HEADER + "\n")
        for t in range(0, record.horizon, stride):
            fh.write(f"{prefix},{t},{_fmt(record.rewards[t])},{record.activated[t]}\n")


def _write_summary_csv(path, summaries: list[RunSummary]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for s in summaries:
            seeds = ";".join(map(str, s.committed))
            fh.write(
                f"{s.run_id},{s.algorithm},{s.k},{s.horizon},{s.rep},"
                f"{_fmt(s.cumulative_reward)},{_fmt(s.regret)},{_fmt(s.benchmark_value)},"
                f"{_fmt(s.seconds)},{seeds}\n"
            )


def _write_aggregate_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(AGGREGATE_HEADER + "\n")
        for row in rows:
            fh.write(
                f"{row['algorithm']},{row['k']},{row['T']},"
                f"{_fmt(row['regret_mean'])},{_fmt(row['regret_std'])},{row['reps']}\n"
            )


def cumulative_regret(per_round_rewards, benchmark_value: float) -> np.ndarray:
    """r[t] = (t+1) * benchmark - sum of rewards up to t (may go negative)."""
    if not (0.0 <= benchmark_value <= 1.0):
        raise ValueError("benchmark_value must lie in [0, 1]")
    rewards = np.asarray(per_round_rewards, dtype=np.float64)
    steps = np.arange(1, rewards.size + 1, dtype=np.float64)
    return steps * benchmark_value - np.cumsum(rewards)


def moving_average(series, window: int) -> np.ndarray:
    """Trailing moving average with warm-up truncation; output length = input.

    Computed from sequential prefix sums: out[t] = (P[t+1] - P[lo]) / (t+1 - lo)
    with lo = max(0, t+1-window).  Any consumer re-implementing this (e.g. the
    plotting package) must use the same arithmetic to match bit for bit.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=np.float64)
    if window == 1:
        return x.copy()
    prefix = np.concatenate(([0.0], np.cumsum(x)))
    hi = np.arange(1, x.size + 1)
    lo = np.maximum(hi - window, 0)
    return (prefix[hi] - prefix[lo]) / (hi - lo)


def aggregate(summaries) -> list[dict]:
    """Per-(algorithm, k, T) mean and sample standard deviation of regret.

    Values are reduced in repetition order, so the result does not depend on
    the order summaries are supplied in.
    """
    if not summaries:
        raise ValueError("no summaries to aggregate")
    groups: dict[tuple, list[RunSummary]] = {}
    for s in summaries:
        groups.setdefault((s.algorithm, s.k, s.horizon), []).append(s)
    rows = []
    for (algorithm, k, horizon) in sorted(groups):
        cell = sorted(groups[(algorithm, k, horizon)], key=lambda s: s.rep)
        regrets = np.array([s.regret for s in cell], dtype=np.float64)
        std = float(np.std(regrets, ddof=1)) if regrets.size > 1 else 0.0
        rows.append(
            {
                "algorithm": algorithm,
                "k": k,
                "T": horizon,
                "regret_mean": float(np.mean(regrets)),
                "regret_std": std,
                "reps": regrets.size,
            }
        )
    return rows


def write_manifest(path, items: dict) -> None:
    """key=value lines, sorted by key; enough to reproduce a run exactly."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(items):
            fh.write(f"{key}={items[key]}\n")
