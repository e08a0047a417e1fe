"""Boundary-weighted distances, flooding observables and log n coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Mapping, Sequence

import numpy as np

from .confmodel import SimpleGraph
from .percolation import DistanceMap, distance_matrix

INF = math.inf

_KINDS = {
    "constant": ("value",),
    "exponential": ("rate",),
    "uniform": ("low", "high"),
    "pareto": ("scale", "shape"),
}


@dataclass(frozen=True)
class NodeWeightSpec:
    """Law of a node delay.

    ``kind`` is one of constant(value), exponential(rate), uniform(low, high)
    or pareto(scale, shape); pareto has survival ``(scale / t) ** shape``.
    """

    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown node weight kind {self.kind!r}")
        if len(self.params) != len(_KINDS[self.kind]):
            raise ValueError(f"{self.kind} takes parameters {_KINDS[self.kind]}, got {self.params}")
        p = self.params
        bad = {
            "constant": lambda: p[0] < 0,
            "exponential": lambda: not p[0] > 0,
            "uniform": lambda: not 0 <= p[0] < p[1],
            "pareto": lambda: not (p[0] > 0 and p[1] > 0),
        }[self.kind]()
        if bad:
            raise ValueError(f"invalid parameters for {self.kind}: {p}")

    @classmethod
    def constant(cls, value: float = 0.0) -> "NodeWeightSpec":
        return cls("constant", (float(value),))

    @classmethod
    def exponential(cls, rate: float) -> "NodeWeightSpec":
        return cls("exponential", (float(rate),))

    @classmethod
    def uniform(cls, low: float, high: float) -> "NodeWeightSpec":
        return cls("uniform", (float(low), float(high)))

    @classmethod
    def pareto(cls, scale: float, shape: float) -> "NodeWeightSpec":
        return cls("pareto", (float(scale), float(shape)))

    @classmethod
    def parse(cls, obj) -> "NodeWeightSpec":
        """Accept ``"kind=exponential rate=0.5"``, ``"exponential(0.5)"`` or a mapping."""
        if isinstance(obj, NodeWeightSpec):
            return obj
        if isinstance(obj, str):
            s = obj.strip()
            if "=" in s:
                obj = dict(tok.split("=", 1) for tok in s.split())
            elif "(" in s and s.endswith(")"):
                kind, args = s[:-1].split("(", 1)
                vals = [float(a) for a in args.split(",") if a.strip()]
                return cls(kind.strip(), tuple(vals))
            else:
                return cls(s, ())
        if not isinstance(obj, Mapping) or "kind" not in obj:
            raise ValueError(f"cannot parse node weight spec {obj!r}")
        kind = obj["kind"]
        if kind not in _KINDS:
            raise ValueError(f"unknown node weight kind {kind!r}")
        try:
            vals = tuple(float(obj[name]) for name in _KINDS[kind])
        except KeyError as exc:
            raise ValueError(f"{kind} spec missing parameter {exc}") from None
        return cls(kind, vals)

    def __str__(self) -> str:
        args = " ".join(f"{k}={v!r}" for k, v in zip(_KINDS[self.kind], self.params))
        return f"kind={self.kind} {args}".strip()

    @property
    def tail_rate(self) -> float:
        """Limit of ``-log P(X > t) / t``."""
        if self.kind == "exponential":
            return self.params[0]
        if self.kind == "pareto":
            return 0.0
        return INF

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        p = self.params
        if self.kind == "constant":
            return np.full(n, p[0])
        if self.kind == "exponential":
            return rng.exponential(1.0 / p[0], size=n)
        if self.kind == "uniform":
            return rng.uniform(p[0], p[1], size=n)
        return p[0] * (1.0 + rng.pareto(p[1], size=n))


ZERO = NodeWeightSpec.constant(0.0)


@dataclass(frozen=True)
class BoundaryWeights:
    x0: np.ndarray
    x1: np.ndarray

    def __post_init__(self):
        if self.x0.shape != self.x1.shape or self.x0.ndim != 1:
            raise ValueError("entry and exit arrays must be 1-d of equal length")
        if np.any(self.x0 < 0) or np.any(self.x1 < 0):
            raise ValueError("boundary weights must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.x0)

    @classmethod
    def zeros(cls, n: int) -> "BoundaryWeights":
        return cls(np.zeros(n), np.zeros(n))


def assign_boundary_weights(n: int, spec0: NodeWeightSpec, spec1: NodeWeightSpec,
                            rng: np.random.Generator) -> BoundaryWeights:
    """Entry delays i.i.d. from ``spec0`` and exit delays i.i.d. from ``spec1``, independently."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x0 = spec0.sample(n, rng)
    x1 = spec1.sample(n, rng)
    return BoundaryWeights(x0, x1)


def boundary_distance(dmap: DistanceMap, bw: BoundaryWeights, u: int, v: int) -> float:
    n = len(dmap.dist)
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"node out of range for n={n}")
    if u != dmap.source:
        raise ValueError(f"distance map is rooted at {dmap.source}, not {u}")
    return float(bw.x0[u] + dmap.dist[v] + bw.x1[v])


def flooding_time(dmap: DistanceMap, bw: BoundaryWeights) -> float:
    """Max over all nodes, the source included, of the boundary-weighted distance."""
    return float(bw.x0[dmap.source] + np.max(dmap.dist + bw.x1))


@dataclass(frozen=True)
class MaxFloodReport:
    value: float
    mode: str
    sources: int
    exact: bool


def max_flooding_time(dist_rows: np.ndarray, sources: Sequence[int], bw: BoundaryWeights,
                      exact: bool | None = None) -> MaxFloodReport:
    """``max_{u in sources, v} x0[u] + dist[u, v] + x1[v]`` from precomputed rows.

    With every node among ``sources`` this is the true maximum; otherwise it
    is a lower bound.
    """
    sources = np.asarray(sources, dtype=np.int64)
    if len(sources) == 0:
        raise ValueError("empty source set")
    rows = np.asarray(dist_rows)
    per_source = bw.x0[sources] + np.max(rows + bw.x1[None, :], axis=1)
    full = len(np.unique(sources)) == bw.n if exact is None else exact
    return MaxFloodReport(float(per_source.max()), "exact" if full else f"sampled({len(sources)})",
                          len(sources), full)


def max_flooding(g: SimpleGraph, w: np.ndarray, bw: BoundaryWeights, mode: str | int = "exact",
                 rng: np.random.Generator | None = None, chunk: int = 512) -> MaxFloodReport:
    """Exact (``mode="exact"``) or sampled (``mode=k``) maximum flooding time.

    Sampled mode draws ``k`` distinct sources uniformly and returns a lower
    bound on the exact value.
    """
    if mode == "exact":
        sources = np.arange(g.n)
    else:
        k = int(mode)
        if k < 1:
            raise ValueError("sampled mode needs at least one source")
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        sources = np.sort(rng.choice(g.n, size=min(k, g.n), replace=False))
    best = -INF
    for i in range(0, len(sources), chunk):
        part = sources[i:i + chunk]
        rep = max_flooding_time(distance_matrix(g, w, part), part, bw, exact=False)
        best = max(best, rep.value)
    full = mode == "exact" or len(sources) == g.n
    return MaxFloodReport(best, "exact" if full else f"sampled({len(sources)})", len(sources), full)


@dataclass(frozen=True)
class TheoryPrediction:
    c_typical: Real
    c_flood: Real
    c_max: Real


def _inv(x):
    # 1/0 = inf; 1/inf never occurs because lam * delta is finite
    if x == 0:
        return INF
    return 1 / x


def theory_coefficients(lam, delta: int, nu, tail0=INF, tail1=INF) -> TheoryPrediction:
    """log n coefficients of the typical passage, typical flooding and maximum flooding times.

    Exact for :class:`fractions.Fraction` inputs with finite tails.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not nu > 1:
        raise ValueError("nu must exceed 1")
    for t in (tail0, tail1):
        if t < 0:
            raise ValueError("tail rates lie in [0, inf]")
    typical = 1 / (lam * (nu - 1))
    entry = _inv(min(lam * delta, tail0))
    exit_ = _inv(min(lam * delta, tail1))
    return TheoryPrediction(typical, typical + exit_, entry + typical + exit_)


def broadcast_coefficients(kappa, delta: int, tail1=INF) -> tuple:
    """flood1 and flood2 coefficients for push gossip on a delta-regular graph,
    in the simplified closed form."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if delta < 3:
        raise ValueError("delta must be at least 3")
    if isinstance(kappa, int):
        kappa = Fraction(kappa)
    flood1 = 2 * (delta - 1) / (kappa * (delta - 2))
    flood2 = delta / (kappa * (delta - 2)) + _inv(min(kappa, tail1))
    return flood1, flood2


def estimate_tail_rate(samples, quantile_window: tuple[float, float] = (0.90, 0.999)) -> float:
    """Least-squares slope of ``-log(empirical survival)`` against ``t`` over a quantile window."""
    x = np.sort(np.asarray(samples, dtype=float))
    N = len(x)
    if N < 100:
        raise ValueError("need at least 100 samples")
    if x[0] == x[-1]:
        raise ValueError("degenerate samples")
    lo, hi = quantile_window
    if not 0 <= lo < hi < 1:
        raise ValueError("quantile window must satisfy 0 <= lo < hi < 1")
    level = np.arange(1, N + 1) / N
    keep = (level >= lo) & (level <= hi)
    t = x[keep]
    if len(np.unique(t)) < 2:
        raise ValueError("quantile window holds fewer than two distinct values")
    y = -np.log1p(-level[keep])
    slope, _ = np.polyfit(t, y, 1)
    return float(slope)
