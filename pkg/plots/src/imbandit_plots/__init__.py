"""Figure generation for imbandit experiment CSVs."""

__version__ = "0.1.0"

from .figures import (
    COLOR_MAP,
    FigureSpec,
    load_regret_table,
    load_reward_trace,
    moving_average,
    plot_regret_curve,
    plot_reward_trace,
)

__all__ = [
    "__version__",
    "COLOR_MAP",
    "FigureSpec",
    "moving_average",
    "load_reward_trace",
    "load_regret_table",
    "plot_reward_trace",
    "plot_regret_curve",
]
