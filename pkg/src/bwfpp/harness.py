"""Monte Carlo experiment driver: seeded trials over an n grid, CSV/JSON output.

Each trial draws from its own generator seeded by
``SeedSequence([master_seed, n, trial]).generate_state(1, uint64)[0]``, so a
row depends only on the config and its ``(n, trial)`` coordinates, never on
how trials are scheduled across workers.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import degrees as deg
from .confmodel import DEFAULT_MAX_ATTEMPTS, connected_components, sample_simple
from .gossip import GossipConfig, simulate_gossip
from .metrics import (ZERO, NodeWeightSpec, assign_boundary_weights, boundary_distance,
                      flooding_time, max_flooding, theory_coefficients)
from .percolation import assign_edge_weights, first_passage, spacing_uniformity_check

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = 1
OBSERVABLES = ("typical", "flood", "maxflood", "gossip_flood1", "gossip_flood2", "spacing_check")
WEIGHTED = {"typical", "flood", "maxflood", "spacing_check"}
GOSSIP = {"gossip_flood1", "gossip_flood2"}
ROW_FIELDS = ("n", "trial", "observable", "value", "value_over_logn", "theory_coeff", "seed")
AGG_FIELDS = ("n", "observable", "mean", "std", "count", "excluded")
EXACT_MAXFLOOD_LIMIT = 4000
SAMPLED_SOURCES = 64


@dataclass(frozen=True)
class ExperimentConfig:
    degrees: deg.DegreeSpec
    n_grid: tuple[int, ...]
    trials: int
    observables: tuple[str, ...]
    seed: int = 0
    lam: float | None = None
    kappa: float | None = None
    entry: NodeWeightSpec = ZERO
    exit: NodeWeightSpec = ZERO
    # "exact", a source count, or None for exact up to n=4000 and 64 sources above
    maxflood_mode: str | int | None = None
    spacing_k_max: int = 50
    connect_retries: int = 10
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n grid must be nonempty and strictly increasing")
        if min(self.n_grid) < 2:
            raise ValueError("n must be >= 2 so that log n > 0")
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown or not self.observables:
            raise ValueError(f"unknown or empty observables: {sorted(unknown)}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        if self.lam is None and self.kappa is None:
            raise ValueError("config needs lambda or kappa")
        if self.maxflood_mode not in (None, "exact") and int(self.maxflood_mode) < 1:
            raise ValueError("sampled maxflood mode needs >= 1 source")

    def regular_degree(self) -> int | None:
        if isinstance(self.degrees, deg.Regular):
            return self.degrees.delta
        return None

    def edge_rate(self) -> float:
        if self.lam is not None:
            return float(self.lam)
        d = self.regular_degree()
        if not d:
            raise ValueError("lambda can only be derived from kappa on a regular degree spec")
        return self.kappa / d

    def gossip_rate(self) -> float:
        if self.kappa is not None:
            return float(self.kappa)
        d = self.regular_degree()
        if not d:
            raise ValueError("kappa can only be derived from lambda on a regular degree spec")
        return self.lam * d

    def maxflood_for(self, n: int) -> str | int:
        if self.maxflood_mode is not None:
            return self.maxflood_mode
        return "exact" if n <= EXACT_MAXFLOOD_LIMIT else SAMPLED_SOURCES

    def theory(self) -> dict[str, float]:
        """log n coefficient per observable; nan where no formula applies."""
        out = {name: math.nan for name in self.observables}
        try:
            st = deg.spec_stats(self.degrees)
        except ValueError:
            return out
        if st.nu <= 1:
            return out
        if WEIGHTED & set(self.observables):
            p = theory_coefficients(self.edge_rate(), st.min_degree, st.nu,
                                    self.entry.tail_rate, self.exit.tail_rate)
            out.update(typical=float(p.c_typical), flood=float(p.c_flood), maxflood=float(p.c_max))
        if GOSSIP & set(self.observables) and self.regular_degree():
            lam = self.gossip_rate() / self.regular_degree()
            p1 = theory_coefficients(lam, st.min_degree, st.nu)
            p2 = theory_coefficients(lam, st.min_degree, st.nu, tail1=self.exit.tail_rate)
            out.update(gossip_flood1=float(p1.c_flood), gossip_flood2=float(p2.c_flood))
        out["spacing_check"] = math.nan
        return {k: v for k, v in out.items() if k in self.observables}


@dataclass(frozen=True)
class Row:
    n: int
    trial: int
    observable: str
    value: float
    value_over_logn: float
    theory_coeff: float
    seed: int


@dataclass(frozen=True)
class Aggregate:
    n: int
    observable: str
    mean: float
    std: float
    count: int
    excluded: int


@dataclass
class ExperimentResult:
    rows: list[Row]
    aggregates: list[Aggregate] = field(default_factory=list)
    disconnected: list[tuple[int, int]] = field(default_factory=list)

    def values(self, n: int, observable: str) -> np.ndarray:
        return np.array([r.value for r in self.rows if r.n == n and r.observable == observable])

    def aggregate(self, n: int, observable: str) -> Aggregate:
        for a in self.aggregates:
            if a.n == n and a.observable == observable:
                return a
        raise KeyError((n, observable))


def child_seed(master: int, n: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, n, trial]).generate_state(1, np.uint64)[0])


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> tuple[list[Row], bool]:
    """All observables for one ``(n, trial)`` cell; the flag marks a disconnected sample."""
    seed = child_seed(cfg.seed, n, trial)
    rng = np.random.default_rng(seed)
    theory = cfg.theory()
    ds = deg.build_degree_sequence(cfg.degrees, n, rng)

    for _ in range(cfg.connect_retries + 1):
        g, _attempts = sample_simple(ds, rng, cfg.max_attempts)
        connected = connected_components(g).count == 1
        if connected:
            break

    values: dict[str, float] = {}
    if not connected:
        values = {name: math.inf for name in cfg.observables}
    else:
        wanted = set(cfg.observables)
        if wanted & WEIGHTED:
            lam = cfg.edge_rate()
            w = assign_edge_weights(g, lam, rng)
            bw = assign_boundary_weights(n, cfg.entry, cfg.exit, rng)
            u, v = (int(x) for x in rng.integers(n, size=2))
            dmap, trace = first_passage(g, w, u)
            values["typical"] = boundary_distance(dmap, bw, u, v)
            values["flood"] = flooding_time(dmap, bw)
            if "maxflood" in wanted:
                values["maxflood"] = max_flooding(g, w, bw, cfg.maxflood_for(n), rng).value
            if "spacing_check" in wanted:
                values["spacing_check"] = spacing_uniformity_check([trace], lam, cfg.spacing_k_max).statistic
        if wanted & GOSSIP:
            res = simulate_gossip(g, GossipConfig(cfg.gossip_rate(), cfg.exit), rng)
            values["gossip_flood1"] = res.flood1
            values["gossip_flood2"] = res.flood2

    logn = math.log(n)
    rows = [Row(n, trial, name, float(values[name]), float(values[name]) / logn, theory[name], seed)
            for name in cfg.observables]
    return rows, not connected


def _run_cell(args):
    return run_trial(*args)


def aggregate_rows(rows: Sequence[Row]) -> list[Aggregate]:
    """Mean and sample std (ddof=1) of finite values per ``(n, observable)``."""
    groups: dict[tuple[int, str], list[float]] = {}
    for r in rows:
        groups.setdefault((r.n, r.observable), []).append(r.value)
    out = []
    for (n, name), vals in groups.items():
        arr = np.array(vals)
        fin = arr[np.isfinite(arr)]
        mean = float(np.mean(fin)) if len(fin) else math.nan
        std = float(np.std(fin, ddof=1)) if len(fin) > 1 else 0.0 if len(fin) else math.nan
        out.append(Aggregate(n, name, mean, std, len(fin), len(arr) - len(fin)))
    return out


def run_experiment(cfg: ExperimentConfig, threads: int = 1, order: Sequence[tuple[int, int]] | None = None) -> ExperimentResult:
    """Run every ``(n, trial)`` cell and gather rows in ``(n, trial, observable)`` order.

    ``order`` overrides the execution order of cells (the output is the same).
    """
    cells = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)] if order is None else list(order)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(_run_cell, [(cfg, n, t) for n, t in cells]))
    else:
        outs = [run_trial(cfg, n, t) for n, t in cells]

    rank = {name: i for i, name in enumerate(cfg.observables)}
    rows, disconnected = [], []
    for (n, t), (cell_rows, flag) in zip(cells, outs):
        rows.extend(cell_rows)
        if flag:
            disconnected.append((n, t))
    rows.sort(key=lambda r: (r.n, r.trial, rank[r.observable]))
    aggs = aggregate_rows(rows)
    aggs.sort(key=lambda a: (a.n, rank[a.observable]))
    return ExperimentResult(rows, aggs, sorted(disconnected))


# -- config files -----------------------------------------------------------

def config_from_mapping(data: Mapping[str, Any]) -> ExperimentConfig:
    """Build a config from the parsed TOML document (schema in the README)."""
    if "degrees" not in data:
        raise ValueError("config lacks a [degrees] section")
    weights = data.get("weights", {})
    mode = data.get("maxflood")
    if mode not in (None, "exact"):
        mode = int(mode)
    n_grid = data.get("n")
    if isinstance(n_grid, int):
        n_grid = [n_grid]
    if not n_grid:
        raise ValueError("config lacks an n grid")
    return ExperimentConfig(
        degrees=deg.parse_degree_spec(data["degrees"]),
        n_grid=tuple(int(x) for x in n_grid),
        trials=int(data.get("trials", 1)),
        observables=tuple(data.get("observables", ())),
        seed=int(data.get("seed", 0)),
        lam=_number(data.get("lambda")),
        kappa=_number(data.get("kappa")),
        entry=NodeWeightSpec.parse(weights.get("entry", ZERO)),
        exit=NodeWeightSpec.parse(weights.get("exit", ZERO)),
        maxflood_mode=mode,
        spacing_k_max=int(data.get("spacing_k_max", 50)),
        connect_retries=int(data.get("connect_retries", 10)),
        max_attempts=int(data.get("max_attempts", DEFAULT_MAX_ATTEMPTS)),
    )


def _number(x):
    if x is None:
        return None
    if isinstance(x, str) and "/" in x:
        a, b = x.split("/")
        return float(a) / float(b)
    return float(x)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        return config_from_mapping(tomllib.load(fh))


# -- output -----------------------------------------------------------------

def _cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit(result: ExperimentResult, fmt: str, path: str | Path) -> list[Path]:
    """Write rows (and aggregates) as CSV or JSON; returns the files written.

    CSV goes to ``path`` with aggregates next to it as ``<stem>.agg.csv``;
    both start with a ``# schema_version=`` comment. JSON holds both tables.
    """
    if not result.rows:
        raise ValueError("nothing to emit")
    path = Path(path)
    if fmt == "csv":
        agg_path = path.with_name(path.name[:-4] + ".agg.csv" if path.suffix == ".csv" else path.name + ".agg.csv")
        _write_csv(path, ROW_FIELDS, [[getattr(r, f) for f in ROW_FIELDS] for r in result.rows])
        _write_csv(agg_path, AGG_FIELDS, [[getattr(a, f) for f in AGG_FIELDS] for a in result.aggregates])
        return [path, agg_path]
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "records": [{f: getattr(r, f) for f in ROW_FIELDS} for r in result.rows],
            "aggregates": [{f: getattr(a, f) for f in AGG_FIELDS} for a in result.aggregates],
            "disconnected": [list(x) for x in result.disconnected],
        }
        path.write_text(json.dumps(doc, indent=1) + "\n")
        return [path]
    raise ValueError(f"unknown format {fmt!r}")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema_version={SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def read_rows(path: str | Path) -> list[Row]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        out.append(Row(int(rec["n"]), int(rec["trial"]), rec["observable"], float(rec["value"]),
                       float(rec["value_over_logn"]), float(rec["theory_coeff"]), int(rec["seed"])))
    return out


def read_aggregates(path: str | Path) -> list[Aggregate]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [Aggregate(int(r["n"]), r["observable"], float(r["mean"]), float(r["std"]),
                      int(r["count"]), int(r["excluded"])) for r in csv.DictReader(lines)]


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
