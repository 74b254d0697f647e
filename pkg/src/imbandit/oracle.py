"""Offline ground truth: exact expected spread, exhaustive search, lazy greedy.

exact_spread enumerates live-edge realizations, so it is reserved for tiny
instances; edges with probability exactly 0 or 1 have a single realization
and do not enter the enumeration.  The sampled lazy greedy provides the
benchmark seed set and value the online policies are scored against.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .cascade import estimate_spread
from .graph import Graph

__all__ = [
    "OracleResult",
    "exact_spread",
    "brute_force_best",
    "offline_greedy",
    "naive_greedy",
    "load_cached_benchmark",
    "append_benchmark",
]

ENUMERATION_CAP = 20
BRUTE_FORCE_CAP = 100_000


@dataclass(frozen=True)
class OracleResult:
    """Seed set with its (estimated or exact) normalized value and step gains."""

    seed_set: list[int]
    estimated_value: float
    per_step_gains: list[float]
    samples_used: int | str


def exact_spread(graph: Graph, seeds) -> float:
    """Exact expected normalized spread via live-edge enumeration.

    Only edges with 0 < p < 1 are enumerated (at most ENUMERATION_CAP of
    them); deterministic edges are folded into the base adjacency.
    """
    n = graph.node_count
    seed_list = sorted({int(s) for s in seeds})
    if seed_list and (seed_list[0] < 0 or seed_list[-1] >= n):
        raise ValueError(f"seed ids must lie in [0, {n})")
    if not seed_list:
        return 0.0

    base: list[list[int]] = [[] for _ in range(n)]
    uncertain: list[tuple[int, int, float]] = []
    for u, v, p in graph.edges():
        if p >= 1.0:
            base[u].append(v)
        elif p > 0.0:
            uncertain.append((u, v, p))
    if len(uncertain) > ENUMERATION_CAP:
        raise ValueError(
            f"{len(uncertain)} probabilistic edges exceed the enumeration cap {ENUMERATION_CAP}"
        )

    total = 0.0
    for mask in range(1 << len(uncertain)):
        weight = 1.0
        adj = [list(row) for row in base]
        for i, (u, v, p) in enumerate(uncertain):
            if mask >> i & 1:
                weight *= p
                adj[u].append(v)
            else:
                weight *= 1.0 - p
        total += weight * _reach_count(adj, seed_list)
    return total / n


def _reach_count(adj: list[list[int]], seeds: list[int]) -> int:
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen)


def brute_force_best(graph: Graph, k: int) -> OracleResult:
    """Exhaustive maximizer over all seed sets of size <= k (exact evaluation)."""
    n = graph.node_count
    if not (1 <= k <= n):
        raise ValueError(f"k must lie in [1, {n}]")
    sets_to_try = sum(math.comb(n, i) for i in range(1, k + 1))
    if sets_to_try > BRUTE_FORCE_CAP:
        raise ValueError(f"{sets_to_try} candidate sets exceed the cap {BRUTE_FORCE_CAP}")

    best_set: tuple[int, ...] | None = None
    best_value = -1.0
    # ascending size then lexicographic: strict improvement keeps the smallest winner
    for size in range(1, k + 1):
        for cand in itertools.combinations(range(n), size):
            value = exact_spread(graph, cand)
            if value > best_value:
                best_set, best_value = cand, value
    assert best_set is not None
    ordered, gains = _greedy_order_within(graph, set(best_set))
    return OracleResult(ordered, best_value, gains, "exact")


def _greedy_order_within(graph: Graph, members: set[int]) -> tuple[list[int], list[float]]:
    """Order a fixed set best-first under exact evaluation; gains are nonincreasing."""
    ordered: list[int] = []
    gains: list[float] = []
    current = 0.0
    while members:
        best, best_val = None, -1.0
        for v in sorted(members):
            val = exact_spread(graph, ordered + [v])
            if val > best_val:
                best, best_val = v, val
        ordered.append(best)
        gains.append(best_val - current)
        current = best_val
        members.remove(best)
    return ordered, gains


def naive_greedy(graph: Graph, k: int, evaluate=None) -> OracleResult:
    """Plain greedy, re-evaluating every candidate each step; ties by lowest id."""
    n = graph.node_count
    if not (1 <= k <= n):
        raise ValueError(f"k must lie in [1, {n}]")
    if evaluate is None:
        evaluate = lambda seeds: exact_spread(graph, seeds)
    chosen: list[int] = []
    gains: list[float] = []
    current = 0.0
    remaining = list(range(n))
    for _ in range(k):
        best, best_val = None, None
        for v in remaining:
            val = evaluate(chosen + [v])
            if best_val is None or val > best_val:
                best, best_val = v, val
        chosen.append(best)
        gains.append(best_val - current)
        current = best_val
        remaining.remove(best)
    return OracleResult(chosen, current, gains, "exact")


def offline_greedy(
    graph: Graph,
    k: int,
    eval_samples: int,
    rng: np.random.Generator | None = None,
    evaluate=None,
) -> OracleResult:
    """CELF-style lazy greedy with Monte Carlo evaluation.

    Marginal gains are mean(f(S + u)) - mean(f(S)), each side averaged over
    eval_samples cascades (the base mean is refreshed once per step).  A heap
    entry is trusted only if it was computed at the current set size;
    otherwise it is re-evaluated and pushed back.  The returned value is
    re-estimated with one final independent batch.  Pass `evaluate` to
    substitute a different spread estimator (e.g. exact evaluation in tests).
    """
    n = graph.node_count
    if not (1 <= k <= n):
        raise ValueError(f"k must lie in [1, {n}]")
    if eval_samples < 1:
        raise ValueError("eval_samples must be >= 1")
    if evaluate is None:
        if rng is None:
            rng = np.random.default_rng(0)
        evaluate = lambda seeds: estimate_spread(graph, seeds, eval_samples, rng)

    chosen: list[int] = []
    gains: list[float] = []
    base = 0.0  # f(empty set) is identically zero
    heap: list[tuple[float, int, int]] = []  # (-gain, node, eval_size)
    for u in range(n):
        heapq.heappush(heap, (evaluate([u]) * -1.0, u, 0))
    while len(chosen) < k:
        neg_gain, node, eval_size = heapq.heappop(heap)
        if eval_size == len(chosen):
            chosen.append(node)
            gains.append(-neg_gain)
            if len(chosen) < k:
                base = evaluate(chosen)
        else:
            gain = evaluate(chosen + [node]) - base
            heapq.heappush(heap, (-gain, node, len(chosen)))
    value = evaluate(chosen)
    return OracleResult(chosen, value, gains, eval_samples)


def load_cached_benchmark(cache_path, k: int, mode: str):
    """Look up a cached (value, seed list) for (k, probability mode), else None."""
    if not os.path.exists(cache_path):
        return None
    with open(cache_path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if len(parts) < 3:
                continue
            if int(parts[0]) == k and parts[1] == mode:
                return float(parts[2]), [int(x) for x in parts[3:]]
    return None


def append_benchmark(cache_path, k: int, mode: str, value: float, seeds) -> None:
    """Append one 'k mode value node_ids...' record (value at full precision)."""
    with open(cache_path, "a", encoding="utf-8", newline="\n") as fh:
        ids = " ".join(str(int(s)) for s in seeds)
        fh.write(f"{k} {mode} {value!r} {ids}\n")
