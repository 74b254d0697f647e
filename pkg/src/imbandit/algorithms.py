"""Online seed-selection policies over the full-bandit cascade environment.

Two explorers share the per-estimate play count m: LOFA keeps a lazily
re-evaluated max-heap of marginal-gain estimates, ETCG re-plays every
remaining candidate each phase.  Both commit one node per phase and play the
committed set for every remaining round.

All selection state is kept as integer activated-count sums over the common
denominator m * node_count, so comparisons and tie-breaks are exact; floats
appear only in reported records.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .cascade import CascadeEnvironment

__all__ = [
    "LofaEntry",
    "PolicyState",
    "RunRecord",
    "compute_m",
    "lofa_initialize",
    "lofa_select_phase",
    "lofa_run",
    "etcg_run",
    "fixed_run",
    "exploit",
    "PLAY_KINDS",
]

PLAY_KINDS = ("init", "recompute", "shortcut_free", "exploit")

MG_SEMANTICS = ("diff", "value")


class _HorizonExhausted(Exception):
    """Internal signal: the next estimate does not fit in the remaining rounds."""


def compute_m(T: int, n: int, k: int) -> int:
    """Per-estimate play count ceil((T*sqrt(2 ln T) / (n + 2nk*sqrt(2 ln T)))^(2/3))."""
    if T < 2:
        raise ValueError("horizon T must be >= 2")
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    s = math.sqrt(2.0 * math.log(T))
    ratio = (T * s) / (n + 2.0 * n * k * s)
    return max(1, math.ceil(ratio ** (2.0 / 3.0)))


@dataclass
class LofaEntry:
    """Heap record for one candidate node.

    mg1_num/mg2_num are activated-count sums minus the appropriate baseline
    numerator (or plain sums under value semantics); divide by m*node_count
    for the [-1, 1] gain.  flag is the committed-set size at the last mg1
    update; an entry may commit only while its flag equals the current size.
    """

    node: int
    mg1_num: int
    mg2_num: int
    prev_best: int | None
    flag: int
    version: int = 0


@dataclass
class PolicyState:
    """Mutable LOFA selection state: committed prefix plus the candidate heap."""

    node_count: int
    m: int
    mg_semantics: str = "diff"
    committed: list[int] = field(default_factory=list)
    set_value_num: int = 0
    entries: dict[int, LofaEntry] = field(default_factory=dict)
    heap: list[tuple[int, int, int]] = field(default_factory=list)
    last_seed: int | None = None
    curr_best: int | None = None
    plays: dict[str, int] = field(default_factory=lambda: {k: 0 for k in PLAY_KINDS})
    commit_rounds: list[int] = field(default_factory=list)

    @property
    def phase(self) -> int:
        return len(self.committed)

    @property
    def current_set_value(self) -> float:
        return self.set_value_num / (self.m * self.node_count) if self.committed else 0.0

    def gain_of(self, entry: LofaEntry) -> float:
        return entry.mg1_num / (self.m * self.node_count)

    def _push(self, entry: LofaEntry) -> None:
        entry.version += 1
        heapq.heappush(self.heap, (-entry.mg1_num, entry.node, entry.version))

    def _pop(self) -> LofaEntry | None:
        while self.heap:
            _, node, version = heapq.heappop(self.heap)
            entry = self.entries.get(node)
            if entry is not None and entry.version == version:
                return entry
        return None

    def _commit(self, entry: LofaEntry, round_index: int) -> None:
        self.committed.append(entry.node)
        if self.mg_semantics == "value":
            self.set_value_num = entry.mg1_num
        else:
            self.set_value_num += entry.mg1_num
        self.last_seed = entry.node
        self.commit_rounds.append(round_index)
        del self.entries[entry.node]

    def _maybe_update_curr_best(self, entry: LofaEntry) -> None:
        # strict improvement keeps the earliest (lowest-id) maximum
        if self.curr_best is None or entry.mg1_num > self.entries[self.curr_best].mg1_num:
            self.curr_best = entry.node


def _measure(env: CascadeEnvironment, state: PolicyState, seeds, kind: str) -> int:
    if env.rounds_remaining < state.m:
        raise _HorizonExhausted
    total = env.play_total(seeds, state.m)
    state.plays[kind] += state.m
    return total


def lofa_initialize(env: CascadeEnvironment, state: PolicyState, m: int) -> PolicyState:
    """First pass: estimate every singleton (and its pair with the running best)."""
    if state.committed or state.entries:
        raise ValueError("state must be fresh")
    state.m = m
    value_semantics = state.mg_semantics == "value"
    for u in range(state.node_count):
        mg1 = _measure(env, state, [u], "init")
        entry = LofaEntry(node=u, mg1_num=mg1, mg2_num=mg1, prev_best=None, flag=0)
        state.entries[u] = entry
        if state.curr_best is not None:
            entry.prev_best = state.curr_best
            try:
                pair = _measure(env, state, [u, state.curr_best], "init")
            except _HorizonExhausted:
                entry.mg2_num = mg1
                entry.prev_best = None
                state._push(entry)
                raise
            cb_mg1 = state.entries[state.curr_best].mg1_num
            entry.mg2_num = pair if value_semantics else pair - cb_mg1
        state._push(entry)
        state._maybe_update_curr_best(entry)
    return state


def lofa_select_phase(env: CascadeEnvironment, state: PolicyState, m: int, phase: int) -> PolicyState:
    """Lazily re-evaluate heap tops until one commits as the phase's node.

    Pop rules, with S the committed set: a fresh entry (flag == |S|) commits;
    an entry evaluated in the immediately preceding phase whose prev_best was
    just committed inherits mg2 without any plays; anything else is replayed.
    The freshness condition on the shortcut (flag == |S| - 1) is what makes a
    zero-play key equal the true gain under deterministic feedback.
    """
    size = len(state.committed)
    if phase != size + 1:
        raise ValueError(f"phase {phase} does not follow {size} committed nodes")
    value_semantics = state.mg_semantics == "value"
    state.curr_best = None
    while True:
        entry = state._pop()
        if entry is None:
            raise RuntimeError("candidate heap exhausted before commit")
        if entry.flag == size:
            state._commit(entry, env.rounds_used)
            return state
        if (
            state.last_seed is not None
            and entry.prev_best == state.last_seed
            and entry.flag == size - 1
        ):
            entry.mg1_num = entry.mg2_num
            state.plays["shortcut_free"] += 1
        else:
            total = _measure(env, state, state.committed + [entry.node], "recompute")
            entry.mg1_num = total if value_semantics else total - state.set_value_num
            if state.curr_best is None:
                entry.mg2_num = entry.mg1_num
                entry.prev_best = None
            else:
                cb = state.entries[state.curr_best]
                try:
                    pair = _measure(
                        env,
                        state,
                        state.committed + [state.curr_best, entry.node],
                        "recompute",
                    )
                except _HorizonExhausted:
                    entry.mg2_num = entry.mg1_num
                    entry.prev_best = None
                    entry.flag = size
                    state._push(entry)
                    raise
                if value_semantics:
                    entry.mg2_num = pair
                else:
                    entry.mg2_num = pair - (state.set_value_num + cb.mg1_num)
                entry.prev_best = state.curr_best
        entry.flag = size
        state._maybe_update_curr_best(entry)
        state._push(entry)


def _early_commit(state: PolicyState, k: int, round_index: int) -> None:
    """Horizon ran out mid-exploration: fill S from the best existing estimates."""
    while len(state.committed) < k:
        entry = state._pop()
        if entry is None:
            break
        state._commit(entry, round_index)


def exploit(env: CascadeEnvironment, seeds, rounds: int) -> None:
    """Play the fixed set `seeds` exactly `rounds` times."""
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    env.play_total(seeds, rounds)


@dataclass
class RunRecord:
    """Full trace of one policy run over a horizon-T environment."""

    algorithm: str
    k: int
    horizon: int
    m: int
    mg_semantics: str | None
    rewards: np.ndarray
    activated: np.ndarray
    committed: list[int]
    commit_rounds: list[int]
    plays_by_kind: dict[str, int]

    @property
    def cumulative_reward(self) -> float:
        return float(np.sum(self.rewards))

    @property
    def exploration_rounds(self) -> int:
        return self.horizon - self.plays_by_kind["exploit"]


def _finish_record(
    env: CascadeEnvironment,
    algorithm: str,
    k: int,
    m: int,
    mg_semantics: str | None,
    committed: list[int],
    commit_rounds: list[int],
    plays: dict[str, int],
) -> RunRecord:
    if env.rounds_used != env.horizon:
        raise RuntimeError(f"run used {env.rounds_used} of {env.horizon} rounds")
    rewards = np.array([e.reward for e in env.reward_log], dtype=np.float64)
    activated = np.array([e.activated for e in env.reward_log], dtype=np.int64)
    return RunRecord(
        algorithm=algorithm,
        k=k,
        horizon=env.horizon,
        m=m,
        mg_semantics=mg_semantics,
        rewards=rewards,
        activated=activated,
        committed=list(committed),
        commit_rounds=list(commit_rounds),
        plays_by_kind=dict(plays),
    )


def _check_run_args(env: CascadeEnvironment, k: int) -> None:
    if env.rounds_used:
        raise ValueError("environment already used; give each run a fresh one")
    if env.horizon < 2:
        raise ValueError("horizon must be >= 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > env.graph.node_count:
        raise ValueError(f"k={k} exceeds node count {env.graph.node_count}")


def lofa_run(env: CascadeEnvironment, k: int, mg_semantics: str = "diff") -> RunRecord:
    """Lazy-forward bandit: init pass, k lazy phases, then exploit the set."""
    _check_run_args(env, k)
    if mg_semantics not in MG_SEMANTICS:
        raise ValueError(f"mg_semantics must be one of {MG_SEMANTICS}")
    m = compute_m(env.horizon, env.graph.node_count, k)
    state = PolicyState(node_count=env.graph.node_count, m=m, mg_semantics=mg_semantics)
    try:
        lofa_initialize(env, state, m)
        for phase in range(1, k + 1):
            lofa_select_phase(env, state, m, phase)
    except _HorizonExhausted:
        _early_commit(state, k, env.rounds_used)
    rest = env.rounds_remaining
    exploit(env, state.committed, rest)
    state.plays["exploit"] += rest
    return _finish_record(
        env, "lofa", k, m, mg_semantics, state.committed, state.commit_rounds, state.plays
    )


def etcg_run(env: CascadeEnvironment, k: int) -> RunRecord:
    """Explore-then-commit greedy: every remaining candidate replayed each phase."""
    _check_run_args(env, k)
    m = compute_m(env.horizon, env.graph.node_count, k)
    committed: list[int] = []
    commit_rounds: list[int] = []
    plays = {kind: 0 for kind in PLAY_KINDS}
    candidates = list(range(env.graph.node_count))
    exhausted = False
    for _ in range(k):
        best: int | None = None
        best_total: int | None = None
        for a in candidates:
            if env.rounds_remaining < m:
                exhausted = True
                break
            total = env.play_total(committed + [a], m)
            plays["recompute"] += m
            if best_total is None or total > best_total:
                best, best_total = a, total
        if best is not None:
            committed.append(best)
            commit_rounds.append(env.rounds_used)
            candidates.remove(best)
        if exhausted:
            break
    rest = env.rounds_remaining
    exploit(env, committed, rest)
    plays["exploit"] += rest
    return _finish_record(env, "etcg", k, m, None, committed, commit_rounds, plays)


def fixed_run(env: CascadeEnvironment, seeds, algorithm: str = "greedy-fixed") -> RunRecord:
    """Reference policy: play one fixed seed set for the whole horizon."""
    committed = sorted({int(s) for s in seeds})
    if len(committed) > env.graph.node_count:
        raise ValueError("more seeds than nodes")
    plays = {kind: 0 for kind in PLAY_KINDS}
    rest = env.rounds_remaining
    exploit(env, committed, rest)
    plays["exploit"] += rest
    return _finish_record(
        env, algorithm, len(committed), 0, None, committed, [0] * len(committed), plays
    )
