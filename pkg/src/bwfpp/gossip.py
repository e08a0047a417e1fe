"""Continuous-time push broadcast with incubation, and its weighted-graph counterpart.

States: 0 susceptible, 1 infected without symptoms, 2 symptomatic. Every
node carries a rate-``kappa`` Poisson clock; when it rings, an infected
initiator (state 1 or 2) pushes to a uniformly random neighbour and turns it
from 0 into 1. A node entering state 1 at time ``t`` turns to 2 at
``t + X1(v)``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .confmodel import SimpleGraph, connected_components
from .metrics import BoundaryWeights, NodeWeightSpec, ZERO
from .percolation import assign_edge_weights, first_passage

INF = math.inf
_ACTIVATE, _SYMPTOMS = 0, 1


@dataclass(frozen=True)
class GossipConfig:
    kappa: float
    incubation: NodeWeightSpec = ZERO
    root: Union[int, str] = "uniform-random"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not (self.root == "uniform-random" or isinstance(self.root, (int, np.integer))):
            raise ValueError(f"invalid root {self.root!r}")


@dataclass
class GossipResult:
    flood1: float
    flood2: float
    root: int
    trajectory: np.ndarray  # rows (time, reached, symptomatic)
    transitions: int = 0
    events: int = 0
    disconnected: bool = False
    incubation: np.ndarray = field(default=None, repr=False)

    def to_csv(self, path: str | Path) -> None:
        lines = ["time,reached,symptomatic"]
        for t, a, b in self.trajectory.tolist():
            lines.append(f"{t!r},{int(a)},{int(b)}")
        Path(path).write_text("\n".join(lines) + "\n")


class _Draws:
    """Block-buffered exponential and uniform variates from one generator."""

    def __init__(self, rng: np.random.Generator, rate: float, block: int = 4096):
        self.rng, self.scale, self.block = rng, 1.0 / rate, block
        self._exp, self._uni = [], []

    def exp(self) -> float:
        if not self._exp:
            self._exp = self.rng.exponential(self.scale, self.block).tolist()
        return self._exp.pop()

    def uniform(self) -> float:
        if not self._uni:
            self._uni = self.rng.random(self.block).tolist()
        return self._uni.pop()


def _pick_root(cfg: GossipConfig, n: int, rng: np.random.Generator) -> int:
    if cfg.root == "uniform-random":
        return int(rng.integers(n))
    root = int(cfg.root)
    if not 0 <= root < n:
        raise ValueError(f"root {root} out of range for n={n}")
    return root


def simulate_gossip(g: SimpleGraph, cfg: GossipConfig, rng: np.random.Generator,
                    lazy_activation: bool = True) -> GossipResult:
    """Event-driven simulation until every node is symptomatic.

    With ``lazy_activation`` the clocks of susceptible nodes are not run: their
    rings would be no-ops and a memoryless clock can be started afresh at
    infection time without changing the law of the process.
    """
    n = g.n
    deg = g.degrees()
    if n > 1 and np.any(deg == 0):
        raise ValueError("graph has an isolated node")
    root = _pick_root(cfg, n, rng)
    incubation = cfg.incubation.sample(n, rng)

    if n > 1 and connected_components(g).count > 1:
        return GossipResult(INF, INF, root, np.array([[0.0, 1, 0]]), disconnected=True, incubation=incubation)

    nbrs = g.adjacency()
    x1 = incubation.tolist()
    draws = _Draws(rng, cfg.kappa)
    state = [0] * n
    reached, symptomatic = 1, 0
    traj = [(0.0, 1, 0)]
    heap: list = []
    seq = 0

    def push(t, kind, v):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, v))
        seq += 1

    state[root] = 1
    push(x1[root], _SYMPTOMS, root)
    if lazy_activation:
        push(draws.exp(), _ACTIVATE, root)
    else:
        for v in range(n):
            push(draws.exp(), _ACTIVATE, v)

    flood1 = 0.0 if n == 1 else INF
    flood2 = INF
    events = 0
    while heap:
        t, _, kind, v = heapq.heappop(heap)
        events += 1
        if kind == _SYMPTOMS:
            state[v] = 2
            symptomatic += 1
            traj.append((t, reached, symptomatic))
            if symptomatic == n:
                flood2 = t
                break
            continue
        if reached == n:
            continue
        if state[v]:
            nb = nbrs[v]
            target = nb[int(draws.uniform() * len(nb))]
            if state[target] == 0:
                state[target] = 1
                reached += 1
                traj.append((t, reached, symptomatic))
                push(t + x1[target], _SYMPTOMS, target)
                if lazy_activation:
                    push(t + draws.exp(), _ACTIVATE, target)
                if reached == n:
                    flood1 = t
                    continue
        push(t + draws.exp(), _ACTIVATE, v)

    return GossipResult(flood1, flood2, root, np.array(traj, dtype=float),
                        transitions=len(traj) - 1, events=events, incubation=incubation)


def gossip_as_weighted(g: SimpleGraph, cfg: GossipConfig,
                       rng: np.random.Generator) -> tuple[np.ndarray, BoundaryWeights, float]:
    """Edge weights Exponential(kappa/delta), zero entry delays, exit delays from the incubation law.

    Only defined for delta-regular graphs: elsewhere a push along an edge
    happens at a degree-dependent rate and the weights are not i.i.d.
    """
    delta = g.is_regular()
    if delta is None or delta == 0:
        raise ValueError("gossip_as_weighted needs a regular graph of positive degree")
    lam = cfg.kappa / delta
    w = assign_edge_weights(g, lam, rng)
    bw = BoundaryWeights(np.zeros(g.n), cfg.incubation.sample(g.n, rng))
    return w, bw, lam


def weighted_flood(g: SimpleGraph, cfg: GossipConfig, rng: np.random.Generator) -> tuple[float, float]:
    """``(max_v W_G(root, v), max_v W_G(root, v) + X1(v))`` on the weighted counterpart."""
    w, bw, _ = gossip_as_weighted(g, cfg, rng)
    root = _pick_root(cfg, g.n, rng)
    dmap, _ = first_passage(g, w, root)
    return float(dmap.dist.max()), float(np.max(dmap.dist + bw.x1))
