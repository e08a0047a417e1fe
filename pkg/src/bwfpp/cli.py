"""Command line entry point: ``bwfpp {generate,percolate,gossip,experiment,predict}``."""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import degrees as deg
from .confmodel import read_edgelist, sample_simple, write_edgelist
from .gossip import GossipConfig, simulate_gossip
from .harness import emit, load_config, run_experiment
from .metrics import NodeWeightSpec, ZERO, broadcast_coefficients, theory_coefficients
from .percolation import assign_edge_weights, first_passage


def _rate(text: str):
    """Exact rational where possible (``1/3``, ``0.5``); ``inf`` stays a float."""
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _show(x) -> str:
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    x = float(x)
    return "inf" if math.isinf(x) else f"{x:.7g}"


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


def _degree_spec(args) -> deg.DegreeSpec:
    if args.regular is not None:
        return deg.Regular(args.regular)
    if args.pmf:
        pmf = {}
        for part in args.pmf.split(","):
            k, p = part.split(":")
            pmf[int(k)] = float(p)
        return deg.IIDFromPMF(pmf)
    if args.degrees_file:
        return deg.Explicit(deg.load_degrees(args.degrees_file))
    raise ValueError("give one of --regular, --pmf, --degrees-file")


def _graph(args, rng):
    if getattr(args, "graph", None):
        return read_edgelist(args.graph)
    spec = _degree_spec(args)
    n = args.n if args.n is not None else len(getattr(spec, "degrees", ()))
    if not n:
        raise ValueError("--n is required")
    g, _ = sample_simple(deg.build_degree_sequence(spec, n, rng), rng)
    return g


def cmd_generate(args) -> int:
    rng = np.random.default_rng(_seed(args))
    spec = _degree_spec(args)
    n = args.n if args.n is not None else len(getattr(spec, "degrees", ()))
    ds = deg.build_degree_sequence(spec, n, rng)
    g, attempts = sample_simple(ds, rng, args.max_attempts)
    if args.output:
        write_edgelist(g, args.output)
        print(f"wrote n={g.n} m={g.m} after {attempts} pairing attempt(s) to {args.output}", file=sys.stderr)
    else:
        print(f"{g.n} {g.m}")
        for u, v in g.edges.tolist():
            print(u + 1, v + 1)
    return 0


def cmd_percolate(args) -> int:
    rng = np.random.default_rng(_seed(args))
    g = _graph(args, rng)
    w = assign_edge_weights(g, float(args.lam), rng)
    dmap, trace = first_passage(g, w, args.source - 1)
    out = Path(args.output or "percolate")
    dmap.to_csv(out.with_name(out.name + ".dist.csv"))
    trace.to_csv(out.with_name(out.name + ".trace.csv"))
    print(f"max distance {dmap.dist.max()!r}, component size {trace.component_size}")
    return 0


def cmd_gossip(args) -> int:
    rng = np.random.default_rng(_seed(args))
    g = _graph(args, rng)
    root = "uniform-random" if args.root is None else args.root - 1
    cfg = GossipConfig(float(args.kappa), NodeWeightSpec.parse(args.incubation), root)
    res = simulate_gossip(g, cfg, rng)
    res.to_csv(args.output or "trajectory.csv")
    print(f"flood1={res.flood1!r} flood2={res.flood2!r} root={res.root + 1}")
    return 0


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    res = run_experiment(cfg, threads=args.threads)
    out = args.output or f"{Path(args.config).stem}.{args.format}"
    for p in emit(res, args.format, out):
        print(f"wrote {p}", file=sys.stderr)
    if res.disconnected:
        print(f"{len(res.disconnected)} disconnected sample(s) excluded from aggregates", file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    tail0, tail1 = args.tail0, args.tail1
    if args.kappa is not None:
        lam = args.kappa / args.delta
        nu = args.nu if args.nu is not None else Fraction(args.delta - 1)
    else:
        if args.lam is None or args.nu is None:
            raise ValueError("predict needs --lambda and --nu, or --kappa")
        lam, nu = args.lam, args.nu
    p = theory_coefficients(lam, args.delta, nu, tail0, tail1)
    print(f"c_typical = {_show(p.c_typical)}")
    print(f"c_flood = {_show(p.c_flood)}")
    print(f"c_max = {_show(p.c_max)}")
    if args.kappa is not None:
        f1, f2 = broadcast_coefficients(args.kappa, args.delta, tail1)
        print(f"flood1 = {_show(f1)}")
        print(f"flood2 = {_show(f2)}")
    return 0


def _global_flags(default) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=default(None), help="master random seed")
    p.add_argument("--threads", type=int, default=default(1), help="worker processes")
    p.add_argument("--output", "-o", default=default(None), help="output file or prefix")
    return p


def build_parser() -> argparse.ArgumentParser:
    # flags are accepted before or after the subcommand; the subcommand copy
    # must not clobber a value given before it
    top = _global_flags(lambda v: v)
    common = _global_flags(lambda v: argparse.SUPPRESS)

    degspec = argparse.ArgumentParser(add_help=False)
    g = degspec.add_mutually_exclusive_group()
    g.add_argument("--regular", type=int, help="delta-regular degrees")
    g.add_argument("--pmf", help="i.i.d. degrees, e.g. 3:0.5,4:0.5")
    g.add_argument("--degrees-file", help="newline-delimited degree list")
    degspec.add_argument("--n", type=int, default=None)

    parser = argparse.ArgumentParser(prog="bwfpp", parents=[top],
                                     description="First passage percolation with boundary weights on random graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common, degspec], help="sample a simple graph to an edge list")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("percolate", parents=[common, degspec], help="distances and exploration trace")
    p.add_argument("--graph", help="edge-list file (otherwise sample one)")
    p.add_argument("--lambda", dest="lam", type=_rate, required=True)
    p.add_argument("--source", type=int, default=1, help="1-based source node")
    p.set_defaults(func=cmd_percolate)

    p = sub.add_parser("gossip", parents=[common, degspec], help="one push-gossip trajectory as CSV")
    p.add_argument("--graph")
    p.add_argument("--kappa", type=_rate, default=Fraction(1))
    p.add_argument("--incubation", default=str(ZERO), help='e.g. "kind=exponential rate=0.5"')
    p.add_argument("--root", type=int, default=None, help="1-based root (default uniform)")
    p.set_defaults(func=cmd_gossip)

    p = sub.add_parser("experiment", parents=[common], help="Monte Carlo sweep from a TOML config")
    p.add_argument("config")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("predict", parents=[common], help="log n coefficients")
    p.add_argument("--lambda", dest="lam", type=_rate)
    p.add_argument("--kappa", type=_rate, help="push rate; implies lambda=kappa/delta, nu=delta-1")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--nu", type=_rate)
    p.add_argument("--tail0", type=_rate, default=math.inf)
    p.add_argument("--tail1", type=_rate, default=math.inf)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"bwfpp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
