"""Online influence maximization under full-bandit feedback.

Monte Carlo independent-cascade environment, the LOFA lazy-forward bandit
policy and the ETCG baseline, offline greedy/exact oracles, and a benchmark
harness with CSV output.
"""

__version__ = "0.1.0"

from .algorithms import (
    LofaEntry,
    PolicyState,
    RunRecord,
    compute_m,
    etcg_run,
    exploit,
    fixed_run,
    lofa_initialize,
    lofa_run,
    lofa_select_phase,
)
from .cascade import CascadeEnvironment, PlayResult, estimate_spread, simulate_cascade
from .graph import (
    Graph,
    format_edge_list,
    load_edge_list,
    make_line_graph,
    make_scale_free_graph,
    make_star_graph,
    with_weighted_cascade_probs,
    write_edge_list,
)
from .harness import (
    ExperimentConfig,
    RunSummary,
    aggregate,
    cumulative_regret,
    derive_seed,
    moving_average,
    run_experiment,
)
from .oracle import (
    OracleResult,
    brute_force_best,
    exact_spread,
    naive_greedy,
    offline_greedy,
)

__all__ = [
    "__version__",
    "Graph",
    "load_edge_list",
    "write_edge_list",
    "format_edge_list",
    "make_line_graph",
    "make_star_graph",
    "make_scale_free_graph",
    "with_weighted_cascade_probs",
    "CascadeEnvironment",
    "PlayResult",
    "simulate_cascade",
    "estimate_spread",
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
    "OracleResult",
    "exact_spread",
    "brute_force_best",
    "offline_greedy",
    "naive_greedy",
    "ExperimentConfig",
    "RunSummary",
    "run_experiment",
    "cumulative_regret",
    "moving_average",
    "aggregate",
    "derive_seed",
]
