"""Command-line entry point: experiments, oracles, raw simulation, fixtures."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, algorithms, graph as graphmod, harness, oracle
from .cascade import CascadeEnvironment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imbandit",
        description="Online influence maximization under full-bandit feedback.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    run = sub.add_parser("run", help="run a reward/regret experiment sweep", formatter_class=fmt)
    run.add_argument("--graph", required=True, help="edge-list file")
    run.add_argument("--k", type=int, required=True, help="seed-set cardinality budget")
    run.add_argument("--horizons", default="20000,40000,60000,80000,100000",
                     help="comma-separated horizons T")
    run.add_argument("--algos", default="lofa,etcg",
                     help="comma-separated subset of lofa,etcg,greedy-fixed")
    run.add_argument("--reps", type=int, default=10, help="repetitions per cell")
    run.add_argument("--seed", type=int, default=0, help="base seed")
    run.add_argument("--window", type=int, default=100, help="moving-average window")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--prob-mode", default="file", help="file, const:<p>, or wc")
    run.add_argument("--benchmark", default="greedy", choices=("greedy", "optimal"))
    run.add_argument("--samples", type=int, default=10000, help="benchmark evaluation samples")
    run.add_argument("--mg-semantics", default="diff", choices=("diff", "value"))
    run.add_argument("--stride", type=int, default=1, help="per-round CSV downsampling stride")
    run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    orc = sub.add_parser("oracle", help="compute and cache the offline benchmark", formatter_class=fmt)
    orc.add_argument("--graph", required=True)
    orc.add_argument("--k", type=int, required=True)
    orc.add_argument("--samples", type=int, default=10000)
    orc.add_argument("--prob-mode", default="file")
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--optimal", action="store_true",
                     help="also exhaustively search for the optimal set (tiny graphs)")

    sim = sub.add_parser("simulate", help="run raw cascades from a fixed seed set", formatter_class=fmt)
    sim.add_argument("--graph", required=True)
    sim.add_argument("--seeds", required=True, help="comma-separated node ids")
    sim.add_argument("--count", type=int, default=100, help="number of cascades")
    sim.add_argument("--prob-mode", default="file")
    sim.add_argument("--seed", type=int, default=0)

    gen = sub.add_parser("gen-graph", help="emit a fixture graph as edge-list text", formatter_class=fmt)
    gen.add_argument("kind", choices=("line", "star", "scale-free"))
    gen.add_argument("--n", type=int, default=10, help="node count (line, scale-free)")
    gen.add_argument("--leaves", type=int, default=4, help="leaf count (star)")
    gen.add_argument("--attach", type=int, default=2, help="links per new node (scale-free)")
    gen.add_argument("--p", type=float, default=0.1, help="edge probability")
    gen.add_argument("--seed", type=int, default=0, help="generator seed (scale-free)")
    gen.add_argument("--out", default=None, help="output path (default: stdout)")
    return parser


def _cmd_run(args) -> int:
    config = harness.ExperimentConfig(
        graph_path=args.graph,
        k=args.k,
        horizons=[int(t) for t in args.horizons.split(",") if t],
        algorithms=[a for a in args.algos.split(",") if a],
        repetitions=args.reps,
        base_seed=args.seed,
        window=args.window,
        out_dir=args.out,
        prob_mode=args.prob_mode,
        benchmark=args.benchmark,
        eval_samples=args.samples,
        mg_semantics=args.mg_semantics,
        stride=args.stride,
        jobs=args.jobs,
    )
    config.validate()
    g = harness.load_graph_for_mode(config.graph_path, config.prob_mode)
    summaries, _ = harness.run_experiment(config)

    manifest = {
        "command": "run",
        "graph": config.graph_path,
        "prob_mode": config.prob_mode,
        "k": config.k,
        "horizons": ",".join(map(str, config.horizons)),
        "algorithms": ",".join(config.algorithms),
        "repetitions": config.repetitions,
        "base_seed": config.base_seed,
        "window": config.window,
        "benchmark": config.benchmark,
        "eval_samples": config.eval_samples,
        "mg_semantics": config.mg_semantics,
        "stride": config.stride,
        "jobs": config.jobs,
        "out_dir": config.out_dir,
        "nodes": g.node_count,
        "edges": g.edge_count,
        "version": __version__,
    }
    for t in config.horizons:
        manifest[f"m_T{t}"] = algorithms.compute_m(t, g.node_count, config.k)
    import os

    harness.write_manifest(os.path.join(config.out_dir, "manifest.txt"), manifest)
    print(f"wrote {len(summaries)} runs to {config.out_dir}")
    return 0


def _cmd_oracle(args) -> int:
    g = harness.load_graph_for_mode(args.graph, args.prob_mode)
    cache_path = args.graph + ".bench"
    hit = oracle.load_cached_benchmark(cache_path, args.k, args.prob_mode)
    if hit is not None:
        value, seeds = hit
        print(f"cached greedy benchmark: f={value!r} seeds={seeds}")
    else:
        rng = np.random.default_rng(harness.derive_seed(args.seed, "benchmark", args.k, args.prob_mode))
        res = oracle.offline_greedy(g, args.k, args.samples, rng)
        oracle.append_benchmark(cache_path, args.k, args.prob_mode, res.estimated_value, res.seed_set)
        print(f"greedy benchmark: f={res.estimated_value!r} seeds={res.seed_set} "
              f"(cached to {cache_path})")
    if args.optimal:
        res = oracle.brute_force_best(g, args.k)
        print(f"optimal (exhaustive): f={res.estimated_value!r} seeds={sorted(res.seed_set)}")
    return 0


def _cmd_simulate(args) -> int:
    g = harness.load_graph_for_mode(args.graph, args.prob_mode)
    seeds = [int(s) for s in args.seeds.split(",") if s]
    env = CascadeEnvironment(g, horizon=args.count, seed=args.seed)
    counts = []
    for _ in range(args.count):
        counts.append(env.play(seeds).activated_count)
    arr = np.array(counts)
    for c in counts:
        print(c)
    print(f"# mean={float(arr.mean())!r} std={float(arr.std(ddof=0))!r} n={args.count} "
          f"normalized={float(arr.mean() / g.node_count)!r}")
    return 0


def _cmd_gen_graph(args) -> int:
    if args.kind == "line":
        g = graphmod.make_line_graph(args.n, args.p)
    elif args.kind == "star":
        g = graphmod.make_star_graph(args.leaves, args.p)
    else:
        g = graphmod.make_scale_free_graph(args.n, args.attach, args.seed, prob=args.p)
    text = graphmod.format_edge_list(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "oracle": _cmd_oracle,
        "simulate": _cmd_simulate,
        "gen-graph": _cmd_gen_graph,
    }
    try:
        return handlers[args.command](args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
