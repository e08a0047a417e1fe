"""Flooding times of push gossip against the log n laws.

    python scripts/figure1.py [config.toml] [--threads 4] [--output figure1.csv]

Prints mean flood/ln n per n next to the predicted coefficient and writes
the raw rows for plotting.
"""

import argparse
import math
from pathlib import Path

from bwfpp.harness import emit, load_config, run_experiment

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default=HERE / "configs" / "figure1.toml")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--output", default="figure1.csv")
    args = ap.parse_args()

    cfg = load_config(args.config)
    res = run_experiment(cfg, threads=args.threads)
    theory = cfg.theory()
    print(f"{'n':>6} {'observable':>14} {'mean/ln n':>10} {'sd/ln n':>8} {'theory':>7}")
    for a in res.aggregates:
        logn = math.log(a.n)
        print(f"{a.n:>6} {a.observable:>14} {a.mean / logn:>10.4f} {a.std / logn:>8.4f} {theory[a.observable]:>7.3f}")
    for p in emit(res, "csv", args.output):
        print("wrote", p)


if __name__ == "__main__":
    main()
