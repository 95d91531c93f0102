"""Command-line surface.

Subcommands: discover, evaluate, benchmark srv, export.  Exit codes:
0 success, 1 search failed, 2 usage or input error.  THESEUS_SEED sets
the default seed; an explicit --seed wins.  A --config file holds
``key = value`` lines mirroring the optimizer-configuration fields, with
flags taking precedence over the file and the file over defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

from .discovery import PrunePolicy, Solution, srv_benchmark, theseus
from .dsl import parse_target
from .errors import GraphError, ParseError, SchemaError, SearchFailedError
from .objective import TargetGate, fidelity, gate_fidelity
from .optimize import OptimizerConfig
from .serialize import graph_to_dot, graph_to_json, json_to_graph
from .states import (
    NUMBER_RESOLVING,
    THRESHOLD,
    ConditioningSpec,
    count_rate,
    event_probability,
    postselected,
)

_CONFIG_FIELD_TYPES = {f.name: f.type for f in fields(OptimizerConfig)}


def _read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GraphError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELD_TYPES:
            raise GraphError(f"{path}:{lineno}: unknown option {key!r}")
        caster = int if key in ("c_limit", "max_iterations", "seed") else float
        values[key] = caster(val.strip())
    return values


def _build_config(args) -> OptimizerConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    flag_map = {
        "alpha": args.alpha,
        "f_limit": args.flimit,
        "c_limit": args.climit,
        "seed": args.seed,
    }
    for key, val in flag_map.items():
        if val is not None:
            values[key] = val
    if "seed" not in values:
        values["seed"] = int(os.environ.get("THESEUS_SEED", "0"))
    return OptimizerConfig(**values)


def _parse_heralds(text: str | None):
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise GraphError(f"--heralds expects comma-separated integers, got {text!r}")


def _solution_document(sol: Solution) -> str:
    doc = {
        "qualified": sol.qualified,
        "fidelity": sol.fidelity,
        "loss": sol.loss,
        "seed": sol.seed,
        "n_edges": sol.graph.n_edges,
        "graph": json.loads(graph_to_json(sol.graph)),
    }
    return json.dumps(doc, indent=2)


def _write_solution(sol: Solution, out_dir: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "solution.json").write_text(_solution_document(sol) + "\n")
    (out / "solution.dot").write_text(graph_to_dot(sol.graph))
    with open(out / "trace.jsonl", "w") as fh:
        for rec in sol.trace:
            fh.write(json.dumps(rec.as_dict()) + "\n")


def _cmd_discover(args) -> int:
    target = parse_target(args.target)
    heralds = _parse_heralds(args.heralds)
    if isinstance(target, TargetGate):
        n_out = target.outputs[0].n_parties
    else:
        n_out = target.n_parties
    outputs = tuple(v for v in range(args.vertices) if v not in heralds)[:n_out]
    rest = tuple(v for v in range(args.vertices) if v not in outputs)
    conditioning = postselected(outputs, rest)
    cfg = _build_config(args)
    policy = PrunePolicy(args.policy, args.temperature)
    try:
        sol = theseus(target, conditioning, cfg, policy, d_modes=args.dims)
    except SearchFailedError as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        if exc.solution is not None:
            _write_solution(exc.solution, args.out)
        return 1
    _write_solution(sol, args.out)
    print(
        f"qualified solution: {sol.graph.n_edges} edges, fidelity {sol.fidelity:.6f}, "
        f"loss {sol.loss:.6f} ({sol.wall_time:.1f}s)"
    )
    print(f"wrote {Path(args.out) / 'solution.json'}")
    return 0


def _cmd_evaluate(args) -> int:
    g = json_to_graph(Path(args.graph).read_text())
    target = parse_target(args.target)
    n_out = (
        target.outputs[0].n_parties if isinstance(target, TargetGate) else target.n_parties
    )
    real = g.real_vertices
    outputs = real[:n_out]
    heralds = real[n_out:]
    c = ConditioningSpec(outputs, heralds, args.detector, args.max_pairs)
    if isinstance(target, TargetGate):
        f = gate_fidelity(g, target, c)
    else:
        f = fidelity(g, target, c)
    p = event_probability(g, c)
    print(f"fidelity = {f:.6f}")
    print(f"event probability = {p:.6e}")
    if args.rep_rate is not None:
        if 0 <= p <= 1:
            print(f"count rate = {count_rate(p, args.rep_rate):.4g} Hz")
        else:
            print("count rate = undefined (weights are not normalized, probability > 1)")
    return 0


def _cmd_benchmark(args) -> int:
    cfg = _build_config(args)
    results = srv_benchmark(args.max_dim, args.budget, cfg)
    achieved = [r for r in results if r.solution.fidelity >= cfg.f_limit and r.verified]
    for r in results:
        mark = "ok " if r.verified else "UNVERIFIED"
        print(
            f"{r.srv} fidelity={r.solution.fidelity:.4f} edges={r.solution.graph.n_edges} "
            f"time={r.elapsed:.1f}s {mark}"
        )
    print(f"{len(achieved)} classes achieved and verified")
    if args.out:
        doc = [
            {
                "srv": list(r.srv.ranks),
                "fidelity": r.solution.fidelity,
                "verified": r.verified,
                "graph": json.loads(graph_to_json(r.solution.graph)),
            }
            for r in results
        ]
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "srv_results.json").write_text(json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_export(args) -> int:
    g = json_to_graph(Path(args.graph).read_text())
    if args.format == "dot":
        sys.stdout.write(graph_to_dot(g))
    else:
        sys.stdout.write(graph_to_json(g) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="theseus",
                                     description="Inverse design of linear-optics experiment graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="search for a graph producing a target")
    p.add_argument("--target", required=True)
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--heralds", default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--flimit", type=float, default=None)
    p.add_argument("--climit", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--policy", choices=("uniform_random", "greedy_min_weight", "boltzmann"),
                   default="greedy_min_weight")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("evaluate", help="fidelity and rates of a stored graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--max-pairs", type=int, default=None)
    p.add_argument("--detector", choices=(NUMBER_RESOLVING, THRESHOLD), default=THRESHOLD)
    p.add_argument("--rep-rate", type=float, default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("benchmark", help="benchmark harnesses")
    bsub = p.add_subparsers(dest="benchmark_kind", required=True)
    b = bsub.add_parser("srv", help="Schmidt-rank-vector class sweep")
    b.add_argument("--max-dim", type=int, required=True)
    b.add_argument("--budget", type=float, required=True)
    b.add_argument("--alpha", type=float, default=None)
    b.add_argument("--flimit", type=float, default=None)
    b.add_argument("--climit", type=int, default=None)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--config", default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("export", help="re-emit a stored graph as dot or json")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=("dot", "json"), required=True)
    p.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, SchemaError, GraphError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
