"""Render experiment figures from harness CSV files (no re-simulation).

Two figure kinds: windowed moving-average reward traces per round (mean across
repetitions with a +/-1 std band) and mean cumulative regret vs horizon with
std error bars.  All data is recomputed from the CSVs alone, so deleting the
images and re-rendering is idempotent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "COLOR_MAP",
    "FigureSpec",
    "moving_average",
    "load_reward_trace",
    "load_regret_table",
    "plot_reward_trace",
    "plot_regret_curve",
]

# fixed per-algorithm colors; anything unlisted falls back to gray
COLOR_MAP = {"lofa": "green", "etcg": "blue", "greedy-fixed": "gray"}

ROUNDS_COLUMNS = {"run_id", "algorithm", "k", "T", "rep", "t", "reward", "activated"}
AGGREGATE_COLUMNS = {"algorithm", "k", "T", "regret_mean", "regret_std", "reps"}


@dataclass
class FigureSpec:
    inputs: list[str]
    kind: str  # "reward-trace" | "regret-vs-horizon"
    output: str
    window: int = 100
    units: str = "raw"  # "raw" activated counts | "normalized" rewards
    colors: dict[str, str] = field(default_factory=lambda: dict(COLOR_MAP))


def moving_average(series, window: int) -> np.ndarray:
    """Trailing moving average with warm-up truncation.

    Must match the harness implementation bit for bit: sequential prefix sums,
    out[t] = (P[t+1] - P[lo]) / (t+1 - lo) with lo = max(0, t+1-window), and a
    plain copy for window 1.
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


def _read_csv(path, required: set[str]) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return list(reader)


def load_reward_trace(paths, window: int, units: str = "raw"):
    """Per-algorithm (t, mean, std, reps) of the windowed per-round series.

    The moving average is taken per repetition, then averaged across
    repetitions; all inputs must share one (k, T) pair and one round grid.
    """
    if units not in ("raw", "normalized"):
        raise ValueError("units must be 'raw' or 'normalized'")
    column = "activated" if units == "raw" else "reward"
    runs: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = {}
    shapes = set()
    for path in paths:
        for run_id, rows in _group_rows(_read_csv(path, ROUNDS_COLUMNS)):
            algorithm = rows[0]["algorithm"]
            shapes.add((rows[0]["k"], rows[0]["T"]))
            t = np.array([int(r["t"]) for r in rows])
            y = moving_average([float(r[column]) for r in rows], window)
            runs[(algorithm, run_id)] = (t, y)
    if not runs:
        raise ValueError("no runs found in the given per-round CSVs")
    if len(shapes) > 1:
        raise ValueError(f"inputs mix several (k, T) settings: {sorted(shapes)}")
    grids = {key: t.tobytes() for key, (t, _) in runs.items()}
    if len(set(grids.values())) > 1:
        raise ValueError("inputs use different round grids (mixed strides?)")

    traces = {}
    for algorithm in sorted({a for a, _ in runs}):
        series = [y for (a, _), (_, y) in sorted(runs.items()) if a == algorithm]
        stack = np.vstack(series)
        t = next(t for (a, _), (t, _) in runs.items() if a == algorithm)
        std = stack.std(axis=0, ddof=1) if stack.shape[0] > 1 else None
        traces[algorithm] = (t, stack.mean(axis=0), std, stack.shape[0])
    return traces


def _group_rows(rows):
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["run_id"], []).append(row)
    for run_id, grouped in sorted(groups.items()):
        grouped.sort(key=lambda r: int(r["t"]))
        yield run_id, grouped


def load_regret_table(path):
    """Aggregate CSV -> per-algorithm sorted (T, mean, std) arrays."""
    rows = _read_csv(path, AGGREGATE_COLUMNS)
    if not rows:
        raise ValueError(f"{path}: aggregate file has no data rows")
    table: dict[str, list[tuple[int, float, float]]] = {}
    for row in rows:
        table.setdefault(row["algorithm"], []).append(
            (int(row["T"]), float(row["regret_mean"]), float(row["regret_std"]))
        )
    return {
        algorithm: np.array(sorted(entries), dtype=np.float64)
        for algorithm, entries in table.items()
    }


def _save(fig, output: str) -> None:
    # pinned hash salt and no date metadata keep SVG output byte-reproducible
    with matplotlib.rc_context({"svg.hashsalt": "imbandit-plots"}):
        metadata = {"Date": None} if output.endswith(".svg") else None
        fig.savefig(output, metadata=metadata)
    plt.close(fig)


def plot_reward_trace(spec: FigureSpec) -> str:
    """Moving-average reward vs round, one curve per algorithm, +/-1 std band."""
    traces = load_reward_trace(spec.inputs, spec.window, spec.units)
    fig, ax = plt.subplots(figsize=(8, 4.8))
    for algorithm, (t, mean, std, reps) in traces.items():
        color = spec.colors.get(algorithm, "gray")
        ax.plot(t, mean, color=color, label=algorithm, gid=f"series-{algorithm}")
        if std is not None:
            ax.fill_between(t, mean - std, mean + std, color=color, alpha=0.2,
                            linewidth=0, gid=f"band-{algorithm}")
    ax.set_xlabel("round t")
    ylabel = "activated nodes" if spec.units == "raw" else "reward"
    ax.set_ylabel(f"moving average (window {spec.window}) of {ylabel}")
    ax.legend()
    fig.tight_layout()
    _save(fig, spec.output)
    return spec.output


def plot_regret_curve(spec: FigureSpec) -> str:
    """Mean cumulative regret vs horizon with std error bars per algorithm."""
    (path,) = spec.inputs
    table = load_regret_table(path)
    fig, ax = plt.subplots(figsize=(8, 4.8))
    for algorithm, data in sorted(table.items()):
        color = spec.colors.get(algorithm, "gray")
        ax.errorbar(data[:, 0], data[:, 1], yerr=data[:, 2], color=color,
                    label=algorithm, marker="o", capsize=3, gid=f"series-{algorithm}")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("cumulative regret")
    ax.legend()
    fig.tight_layout()
    _save(fig, spec.output)
    return spec.output
