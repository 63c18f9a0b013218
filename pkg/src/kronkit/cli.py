"""Command-line entry point: generation, analysis, constants, classification,
and experiments.

Exit codes: 0 success, 1 statistical/assertion failure in an experiment,
2 usage or input errors.  Diagnostics go to stderr; results to stdout.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import edgelist, harness, theory
from .errors import KronkitError
from .graphkit import connected_components, diameter_exact
from .model import KroneckerParams
from .sampler import SampleSeed, materialize_lazy, sample_graph


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, required=True)
    parser.add_argument("--beta", type=float, required=True)
    parser.add_argument("--gamma", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kronkit",
        description="Stochastic Kronecker graph toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a graph to a canonical edge list")
    _add_params(gen)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=None,
                     help="sampling seed; generated and printed if omitted")
    gen.add_argument("--out", required=True)
    gen.add_argument("--backend", choices=("grouped", "lazy"), default="grouped")

    analyze = sub.add_parser("analyze", help="report structure of an edge list")
    analyze.add_argument("--in", dest="infile", required=True)
    analyze.add_argument("--diameter", action="store_true")
    analyze.add_argument("--degrees", action="store_true")
    analyze.add_argument("--json", action="store_true")

    constants = sub.add_parser(
        "constants", help="print the derived constant bundle")
    _add_params(constants)
    constants.add_argument("--json", action="store_true")

    classify = sub.add_parser(
        "classify", help="print the connectivity classification")
    _add_params(classify)
    classify.add_argument("--json", action="store_true")

    experiment = sub.add_parser("experiment", help="run a named experiment")
    experiment.add_argument("--config", help="key=value config file")
    experiment.add_argument("--name", choices=harness.EXPERIMENTS)
    experiment.add_argument("--alpha", type=float)
    experiment.add_argument("--beta", type=float)
    experiment.add_argument("--gamma", type=float)
    experiment.add_argument("--n-list", help="comma or space separated sizes")
    experiment.add_argument("--trials", type=int)
    experiment.add_argument("--seed", type=int,
                            help="experiment seed; generated and printed if omitted")
    experiment.add_argument("--backend", choices=("grouped", "lazy", "naive"))
    experiment.add_argument("--out-dir")
    experiment.add_argument("--json", action="store_true")
    return parser


def _cmd_gen(args) -> int:
    params = KroneckerParams(args.alpha, args.beta, args.gamma)
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(48)
        print(f"seed={seed}")
    sseed = SampleSeed(seed)
    if args.backend == "grouped":
        graph = sample_graph(params, args.n, sseed)
    else:
        graph = materialize_lazy(params, args.n, sseed)
    edgelist.write_edge_list(args.out, graph, params=params, seed=seed)
    print(f"wrote {graph.edge_count} edges on {graph.vertex_count} vertices "
          f"to {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    graph, meta = edgelist.read_edge_list(args.infile)
    comps = connected_components(graph)
    report = {
        "vertices": graph.vertex_count,
        "edges": graph.edge_count,
        "components": comps.count,
        "connected": comps.count == 1,
        "largest_component": int(np.bincount(comps.labels).max()),
    }
    if args.degrees:
        degs = graph.degrees()
        report["degree_min"] = int(degs.min())
        report["degree_mean"] = float(degs.mean())
        report["degree_max"] = int(degs.max())
    if args.diameter:
        res = diameter_exact(graph)
        report["diameter"] = res.diameter
        report["diameter_method"] = res.method
    if args.json:
        print(json.dumps({"header": meta, **report}, sort_keys=True))
    else:
        for key, value in report.items():
            print(f"{key}={value}")
    return 0


def _cmd_constants(args) -> int:
    params = KroneckerParams(args.alpha, args.beta, args.gamma)
    report = theory.constants_report(params)
    if args.json:
        print(json.dumps(report, sort_keys=False))
    else:
        for key, value in report.items():
            print(f"{key}={value}")
    return 0


def _cmd_classify(args) -> int:
    params = KroneckerParams(args.alpha, args.beta, args.gamma)
    verdict = theory.classify_connectivity(params)
    if args.json:
        print(json.dumps({"verdict": verdict.verdict.value,
                          "matched_case": verdict.matched_case}))
    else:
        print(str(verdict))
    return 0


def _cmd_experiment(args) -> int:
    overrides = dict(
        experiment=args.name, alpha=args.alpha, beta=args.beta,
        gamma=args.gamma, trials=args.trials, seed=args.seed,
        backend=args.backend, output_dir=args.out_dir,
        n_list=harness._parse_int_list(args.n_list) if args.n_list else None,
    )
    if args.seed is None and args.config is None:
        overrides["seed"] = secrets.randbits(48)
        print(f"seed={overrides['seed']}")
    if args.config:
        config = harness.ExperimentConfig.from_file(args.config, **overrides)
    else:
        missing = [k for k in ("experiment", "alpha", "beta", "gamma", "n_list",
                               "trials") if overrides.get(k) is None]
        if missing:
            print(f"experiment needs --config or flags for: {missing}",
                  file=sys.stderr)
            return 2
        config = harness.ExperimentConfig(
            **{k: v for k, v in overrides.items() if v is not None})
    result = harness.run_experiment(config)
    if args.json:
        print(json.dumps(harness._native(result.summary), sort_keys=False))
    else:
        for row in result.summary:
            print(" ".join(f"{k}={v}" for k, v in row.items()))
        if result.records_path:
            print(f"records: {result.records_path}")
            print(f"summary: {result.summary_path}")
    if not result.passed:
        for failure in result.failures:
            print(f"FAIL {failure}", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "analyze": _cmd_analyze,
    "constants": _cmd_constants,
    "classify": _cmd_classify,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (KronkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
