"""Command-line entry point: ``ccm {sample,diagnose,stats,test,verify}``."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import degree_assortativity, m_statistics, outcome_summary, theta, top_degree_mv
from .graph import GraphFormatError, cdm, jcm, load_graph, write_edges
from .oracle import AtlasLimitError, enumerate_states, exact_transition_matrices, report_json, to_dot, verify_chain
from .polarization import RwcConfig, RwcError, significance_test
from .samplers import ChainConfig, PeriodicChainError, run_chain, sample_ensemble

EXIT_INPUT = 2
EXIT_VERIFY = 3

log = logging.getLogger("ccmsampler")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CCM_SEED")
    if env:
        return int(env)
    return int(np.random.SeedSequence().entropy % (1 << 63))


def _sampler_args(p: argparse.ArgumentParser, algos=("sirius", "sirius-b", "cm")) -> None:
    p.add_argument("--edges", help="edge list, one 'u<TAB>v' per line")
    p.add_argument("--colors", help="node colors, one 'vertex<TAB>color' per line")
    p.add_argument("--algo", choices=algos, default="sirius")
    p.add_argument("--iters", type=int, default=None, help="chain steps (default ceil(m ln m))")
    p.add_argument("--lazy", action="store_true", help="hold with probability 1/2 per step")
    p.add_argument("--strict", action="store_true", help="refuse to run a possibly periodic chain")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (env CCM_SEED)")


def _config(args, **extra) -> ChainConfig:
    return ChainConfig(
        algorithm=args.algo,
        iterations=args.iters,
        laziness="half" if args.lazy else "none",
        seed=args.resolved_seed,
        strict=args.strict,
        **extra,
    )


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _manifest(args, g, config: ChainConfig, **extra) -> dict:
    return {
        "tool": "ccmsampler",
        "version": __version__,
        "command": args.command,
        "edges": str(args.edges),
        "colors": str(args.colors),
        "algorithm": config.algorithm,
        "iterations": config.resolved_iterations(g.m),
        "iterations_default": args.iters is None,
        "laziness": config.laziness,
        "strict": config.strict,
        "seed": config.seed,
        **extra,
    }


def cmd_sample(args) -> int:
    g = load_graph(args.colors, args.edges)
    config = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = sample_ensemble(g, config, args.samples, args.parallel,
                              progress=lambda i: log.info("sample %d done", i))
    width = max(3, len(str(args.samples - 1)))
    files = []
    totals = dict.fromkeys(results[0].tallies, 0)
    for i, res in enumerate(results):
        name = f"sample_{i:0{width}d}.tsv"
        write_edges(res.graph, out / name)
        files.append(name)
        for k, v in res.tallies.items():
            totals[k] += v
    _write_json(out / "manifest.json", _manifest(args, g, config, samples=args.samples, outputs=files))
    _write_json(out / "tallies.json", {
        "per_sample": [r.tallies for r in results],
        "total": totals,
        "fractions": outcome_summary(totals),
    })
    return 0


def cmd_diagnose(args) -> int:
    g = load_graph(args.colors, args.edges)
    extra = {"trace_stride": args.trace_stride} if args.trace_stride else {"trace_points": 100}
    config = _config(args, **extra)
    res = run_chain(g, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res.trace.to_csv(out / "trace.csv")
    summary = {
        "iterations": res.iterations,
        "lazy": res.lazy,
        "tallies": res.tallies,
        "fractions": res.fractions(),
        "theta": theta(g) if g.m >= 2 else None,
        "assortativity_initial": _nan_none(degree_assortativity(g)),
        "assortativity_final": _nan_none(degree_assortativity(res.graph)),
        "trace_rows": len(res.trace),
    }
    _write_json(out / "summary.json", summary)
    _write_json(out / "manifest.json", _manifest(args, g, config, trace=extra))
    return 0


def _nan_none(x: float):
    return None if x != x else x


def graph_stats(g, k: int = 10) -> dict:
    C = cdm(g)
    M, mv = m_statistics(g)
    names = g.vertex_names
    return {
        "n": g.n,
        "m": g.m,
        "colors": [str(c) for c in g.color_names],
        "theta": theta(g) if g.m >= 2 else None,
        "M": _nan_none(M),
        "top_degree_mv": [{"vertex": str(names[v]), "degree": int(g.degrees()[v]), "M_v": _nan_none(x)}
                          for v, x in top_degree_mv(g, k)],
        "jcm": jcm(g).tolist(),
        "cdm_shape": list(C.shape),
        "cdm_sha256": hashlib.sha256(np.ascontiguousarray(C, dtype="<i8").tobytes()).hexdigest(),
        "degree_assortativity": _nan_none(degree_assortativity(g)) if g.m else None,
    }


def cmd_stats(args) -> int:
    g = load_graph(args.colors, args.edges)
    print(json.dumps(graph_stats(g, args.top), indent=2))
    return 0


def cmd_test(args) -> int:
    g = load_graph(args.colors, args.edges)
    config = ChainConfig(algorithm=args.null, iterations=args.iters,
                         laziness="half" if args.lazy else "none", seed=args.resolved_seed)
    rwc_cfg = RwcConfig(restart=args.restart, k=args.k)
    res = significance_test(g, config, args.score, args.samples, rwc_cfg, args.parallel)
    text = res.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_verify(args) -> int:
    g = load_graph(args.colors, args.edges)
    atlas = enumerate_states(g, args.limit)
    exact = True if args.exact else (False if args.float else None)
    mats = exact_transition_matrices(atlas, exact=exact)
    report = verify_chain(atlas, mats)
    text = report_json(report)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.dot:
        Path(args.dot).write_text(to_dot(atlas), encoding="utf-8")
    return 0 if report["ok"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccm", description="Colored configuration model sampler")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw null-model graphs")
    _sampler_args(p)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="rerun from a manifest.json (overrides input and chain flags)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("diagnose", help="trace assortativity and step outcomes")
    _sampler_args(p)
    p.add_argument("--trace-stride", type=int, default=None, help="steps between snapshots (default t/100)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("stats", help="theta, M, top-degree M_v, JCM, CDM digest")
    p.add_argument("--edges", required=True)
    p.add_argument("--colors", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("test", help="significance of a polarization score against a null model")
    _sampler_args(p)
    p.add_argument("--score", choices=("rwc", "m"), default="rwc")
    p.add_argument("--null", choices=("sirius", "cm"), default="sirius")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--restart", type=float, default=0.15)
    p.add_argument("--k", type=int, default=10, help="influencers per side")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("verify", help="enumerate the state space and check the chain exactly")
    p.add_argument("--edges", required=True)
    p.add_argument("--colors", required=True)
    p.add_argument("--limit", type=int, default=5000)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--float", action="store_true")
    p.add_argument("--out")
    p.add_argument("--dot", help="write the state graph in DOT format")
    p.set_defaults(func=cmd_verify)
    return parser


def _apply_manifest(args) -> None:
    man = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    args.edges, args.colors = man["edges"], man["colors"]
    args.algo = man["algorithm"]
    args.iters = None if man.get("iterations_default") else man["iterations"]
    args.lazy = man["laziness"] == "half"
    args.strict = man.get("strict", False)
    args.seed = man["seed"]
    args.samples = man.get("samples", args.samples)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        if getattr(args, "manifest", None):
            _apply_manifest(args)
        if not (args.edges and args.colors):
            raise ValueError("--edges and --colors are required")
        if hasattr(args, "seed"):
            args.resolved_seed = _seed(args)
        if getattr(args, "samples", 1) is not None and getattr(args, "samples", 1) < 1:
            raise ValueError("--samples must be at least 1")
        return args.func(args)
    except (GraphFormatError, FileNotFoundError, ValueError, KeyError, AtlasLimitError,
            PeriodicChainError, RwcError) as exc:
        print(f"ccm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
