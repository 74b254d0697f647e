"""Independent-cascade Monte Carlo simulation and the full-bandit environment.

Randomness is pinned to numpy's PCG64 generator so that identical seeds give
bitwise-identical reward logs on every platform.  Coins are drawn lazily
during traversal, in a fixed order: frontier nodes ascending by id, each
node's out-edges ascending by target, one batched draw per diffusion step
covering exactly the edges whose target is still inactive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .graph import Graph

__all__ = [
    "PlayResult",
    "CascadeEnvironment",
    "simulate_cascade",
    "estimate_spread",
]


@dataclass(frozen=True)
class PlayResult:
    """Outcome of a single cascade: raw activated count and normalized reward."""

    activated_count: int
    reward: float


class RoundLog(NamedTuple):
    t: int
    seed_count: int
    activated: int
    reward: float


def _as_seed_array(node_count: int, seeds: Iterable[int]) -> np.ndarray:
    arr = np.array(sorted({int(s) for s in seeds}), dtype=np.int64)
    if arr.size and (arr[0] < 0 or arr[-1] >= node_count):
        raise ValueError(f"seed ids must lie in [0, {node_count})")
    return arr


def _spread(indptr, targets, probs, seeds, active, rng) -> int:
    """Run one cascade over the CSR arrays; mutates `active`, returns the count."""
    active[seeds] = True
    frontier = seeds
    count = int(seeds.size)
    while frontier.size:
        if frontier.size == 1:
            lo, hi = indptr[frontier[0]], indptr[frontier[0] + 1]
            cand_t = targets[lo:hi]
            cand_p = probs[lo:hi]
        else:
            starts = indptr[frontier]
            lens = indptr[frontier + 1] - starts
            total = int(lens.sum())
            if total == 0:
                break
            # concatenated [starts[i], starts[i]+lens[i]) ranges without a Python loop
            idx = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
            cand_t = targets[idx]
            cand_p = probs[idx]
        inactive = ~active[cand_t]
        cand_t = cand_t[inactive]
        if cand_t.size == 0:
            break
        coins = rng.random(cand_t.size)
        hits = cand_t[coins < cand_p[inactive]]
        if hits.size == 0:
            break
        frontier = np.unique(hits)
        active[frontier] = True
        count += int(frontier.size)
    return count


def simulate_cascade(graph: Graph, seeds: Iterable[int], rng: np.random.Generator) -> set[int]:
    """One independent-cascade run; returns the final activated node set."""
    arr = _as_seed_array(graph.node_count, seeds)
    active = np.zeros(graph.node_count, dtype=bool)
    _spread(graph.indptr, graph.targets, graph.probs, arr, active, rng)
    return set(np.flatnonzero(active).tolist())


def estimate_spread(
    graph: Graph, seeds: Iterable[int], samples: int, rng: np.random.Generator
) -> float:
    """Mean normalized spread over `samples` independent cascades."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    arr = _as_seed_array(graph.node_count, seeds)
    if arr.size == 0 or graph.node_count == 0:
        return 0.0
    active = np.zeros(graph.node_count, dtype=bool)
    total = 0
    for _ in range(samples):
        active[:] = False
        total += _spread(graph.indptr, graph.targets, graph.probs, arr, active, rng)
    return total / (samples * graph.node_count)


class CascadeEnvironment:
    """Full-bandit oracle: one cascade per play, scalar reward only, T rounds.

    The environment owns the generator; a policy never sees which nodes
    activated, only the normalized reward (raw counts are logged for
    reporting).  Single-owner: do not share one instance across runs.
    """

    def __init__(self, graph: Graph, horizon: int, seed: int = 0) -> None:
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.graph = graph
        self.horizon = horizon
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.rounds_used = 0
        self.reward_log: list[RoundLog] = []
        self._active = np.zeros(graph.node_count, dtype=bool)

    @property
    def rounds_remaining(self) -> int:
        return self.horizon - self.rounds_used

    def play(self, seeds: Iterable[int]) -> PlayResult:
        """Run one cascade from `seeds`, charge one round, log the reward."""
        arr = _as_seed_array(self.graph.node_count, seeds)
        return self._play_array(arr)

    def _play_array(self, arr: np.ndarray) -> PlayResult:
        if self.rounds_used >= self.horizon:
            raise RuntimeError("horizon exhausted")
        self._active[:] = False
        count = _spread(
            self.graph.indptr, self.graph.targets, self.graph.probs, arr, self._active, self.rng
        )
        n = self.graph.node_count
        reward = count / n if n else 0.0
        self.reward_log.append(RoundLog(self.rounds_used, int(arr.size), count, reward))
        self.rounds_used += 1
        return PlayResult(count, reward)

    def play_total(self, seeds: Iterable[int], count: int) -> int:
        """Sum of activated counts over `count` plays (exact integer)."""
        if count < 0:
            raise ValueError("count must be >= 0")
        if count > self.rounds_remaining:
            raise RuntimeError("insufficient remaining rounds")
        arr = _as_seed_array(self.graph.node_count, seeds)
        total = 0
        for _ in range(count):
            total += self._play_array(arr).activated_count
        return total

    def mean_of_plays(self, seeds: Iterable[int], m: int) -> float:
        """Mean reward over exactly m plays, computed as one exact division."""
        if m < 1:
            raise ValueError("m must be >= 1")
        total = self.play_total(seeds, m)
        n = self.graph.node_count
        return total / (m * n) if n else 0.0
