"""Directed probability-weighted graphs: edge-list ingestion and fixture generators.

A :class:`Graph` is immutable after construction and safe to share across
concurrently running environments.  Node ids are dense integers in
``[0, node_count)``; files with sparse ids are remapped by first appearance
and the original labels are retained for reporting.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "load_edge_list",
    "format_edge_list",
    "write_edge_list",
    "make_line_graph",
    "make_star_graph",
    "make_scale_free_graph",
    "with_weighted_cascade_probs",
]


class Graph:
    """Immutable directed graph with an activation probability per edge.

    Adjacency is stored in CSR form (``indptr``/``targets``/``probs``) with
    each node's out-edges sorted by target id, so traversal order is
    deterministic regardless of input order.
    """

    __slots__ = ("node_count", "edge_count", "labels", "indptr", "targets", "probs")

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple[int, int, float]],
        labels: Sequence[int] | None = None,
    ) -> None:
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        edge_list = sorted(edges)
        seen: set[tuple[int, int]] = set()
        for src, dst, prob in edge_list:
            if not (0 <= src < node_count and 0 <= dst < node_count):
                raise ValueError(f"edge ({src}, {dst}) references a node outside [0, {node_count})")
            if src == dst:
                raise ValueError(f"self-loop edge at node {src}")
            if not (0.0 <= prob <= 1.0):
                raise ValueError(f"edge ({src}, {dst}) probability {prob} outside [0, 1]")
            if (src, dst) in seen:
                raise ValueError(f"duplicate edge ({src}, {dst})")
            seen.add((src, dst))

        self.node_count = node_count
        self.edge_count = len(edge_list)
        if labels is None:
            labels = range(node_count)
        if len(labels) != node_count:
            raise ValueError("labels length must equal node_count")
        self.labels = tuple(labels)

        indptr = np.zeros(node_count + 1, dtype=np.int64)
        targets = np.empty(self.edge_count, dtype=np.int64)
        probs = np.empty(self.edge_count, dtype=np.float64)
        for i, (src, dst, prob) in enumerate(edge_list):
            indptr[src + 1] += 1
            targets[i] = dst
            probs[i] = prob
        np.cumsum(indptr, out=indptr)
        self.indptr = indptr
        self.targets = targets
        self.probs = probs
        for arr in (self.indptr, self.targets, self.probs):
            arr.setflags(write=False)

    def out_edges(self, node: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[node], self.indptr[node + 1]
        return [(int(t), float(p)) for t, p in zip(self.targets[lo:hi], self.probs[lo:hi])]

    def edges(self) -> list[tuple[int, int, float]]:
        """All edges as (src, dst, prob), sorted by (src, dst)."""
        out = []
        for u in range(self.node_count):
            out.extend((u, v, p) for v, p in self.out_edges(u))
        return out

    def in_degrees(self) -> np.ndarray:
        degs = np.zeros(self.node_count, dtype=np.int64)
        if self.edge_count:
            np.add.at(degs, self.targets, 1)
        return degs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.labels == other.labels
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.probs, other.probs)
        )

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def load_edge_list(path, default_prob: float | None = None) -> Graph:
    """Parse an edge-list text file into a :class:`Graph`.

    Each data line is ``src dst [prob]`` (whitespace-separated); lines whose
    first non-blank character is ``#`` are comments.  When a line omits the
    probability column, ``default_prob`` fills it in (an error if unset).
    If the file's ids already form a dense ``[0, n)`` range they are kept
    as-is; otherwise ids are remapped by first appearance.
    """
    if default_prob is not None and not (0.0 <= default_prob <= 1.0):
        raise ValueError(f"default_prob {default_prob} outside [0, 1]")

    raw_edges: list[tuple[int, int, float]] = []
    order: dict[int, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 'src dst [prob]', got {len(parts)} fields")
            try:
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric node id") from None
            if len(parts) == 3:
                try:
                    prob = float(parts[2])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric probability") from None
            elif default_prob is not None:
                prob = default_prob
            else:
                raise ValueError(f"{path}:{lineno}: no probability column and no default_prob given")
            if not (0.0 <= prob <= 1.0):
                raise ValueError(f"{path}:{lineno}: probability {prob} outside [0, 1]")
            for label in (src, dst):
                if label not in order:
                    order[label] = len(order)
            raw_edges.append((src, dst, prob))

    labels = list(order)
    n = len(labels)
    # n distinct ids all inside [0, n) cover it exactly: keep them unremapped
    if all(0 <= label < n for label in labels):
        remap = {label: label for label in labels}
        labels = list(range(n))
    else:
        remap = order
    edges = [(remap[s], remap[d], p) for s, d, p in raw_edges]
    return Graph(n, edges, labels=labels)


def format_edge_list(graph: Graph) -> str:
    """Canonical edge-list text: dense ids, one edge per line, (src, dst) order.

    Isolated nodes are not representable in this format; reloading the text
    reproduces the graph exactly whenever every node has at least one edge.
    """
    lines = [f"{u} {v} {p!r}" for u, v, p in graph.edges()]
    return "\n".join(lines) + ("\n" if lines else "")


def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(graph))


def make_line_graph(n: int, p: float) -> Graph:
    """Directed chain 0 -> 1 -> ... -> n-1 with uniform edge probability."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_prob(p)
    return Graph(n, [(i, i + 1, p) for i in range(n - 1)])


def make_star_graph(leaves: int, p: float) -> Graph:
    """Node 0 points at `leaves` leaf nodes with uniform edge probability."""
    if leaves < 0:
        raise ValueError("leaves must be >= 0")
    _check_prob(p)
    return Graph(leaves + 1, [(0, i, p) for i in range(1, leaves + 1)])


def make_scale_free_graph(n: int, attach: int, seed: int, prob: float = 1.0) -> Graph:
    """Preferential-attachment graph, each undirected link expanded to two arcs.

    Starts from `attach` isolated nodes; every later node links to `attach`
    distinct existing nodes sampled proportionally to current degree.  All
    edges carry `prob`; combine with :func:`with_weighted_cascade_probs` for
    in-degree-derived probabilities.
    """
    if attach < 1 or n <= attach:
        raise ValueError("need n > attach >= 1")
    _check_prob(prob)
    rng = np.random.default_rng(seed)
    # degree-proportional sampling via the repeated-endpoints list
    repeated: list[int] = []
    links: set[tuple[int, int]] = set()
    for new in range(attach, n):
        if not repeated:
            chosen = list(range(new))[:attach]
        else:
            chosen = []
            while len(chosen) < attach:
                pick = repeated[int(rng.integers(len(repeated)))]
                if pick not in chosen:
                    chosen.append(pick)
        for old in chosen:
            links.add((new, old))
            repeated.extend((new, old))
    edges = []
    for a, b in links:
        edges.append((a, b, prob))
        edges.append((b, a, prob))
    return Graph(n, edges)


def with_weighted_cascade_probs(graph: Graph) -> Graph:
    """New graph with every probability replaced by 1/in-degree(target)."""
    degs = graph.in_degrees()
    edges = [(u, v, 1.0 / degs[v]) for u, v, _ in graph.edges()]
    return Graph(graph.node_count, edges, labels=graph.labels)


def _check_prob(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability {p} outside [0, 1]")
