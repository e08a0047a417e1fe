"""Configuration-model sampling: uniform half-edge pairings and simple graphs by rejection."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .degrees import DegreeSequence

DEFAULT_MAX_ATTEMPTS = 1000


class SimplicityExhausted(RuntimeError):
    """No simple pairing was found within the attempt budget."""


@dataclass(frozen=True)
class Multigraph:
    """A half-edge pairing.

    Half-edge ``h`` belongs to node ``stub_node[h]`` and is that node's
    ``stub_slot[h]``-th half-edge; ``pairing`` is an ``(m, 2)`` array of
    half-edge indices.
    """

    n: int
    stub_node: np.ndarray
    stub_slot: np.ndarray
    pairing: np.ndarray

    @property
    def m(self) -> int:
        return len(self.pairing)

    @cached_property
    def edges(self) -> np.ndarray:
        return self.stub_node[self.pairing]

    def pairing_record(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        out = []
        for a, b in self.pairing:
            out.append(((int(self.stub_node[a]), int(self.stub_slot[a])),
                        (int(self.stub_node[b]), int(self.stub_slot[b]))))
        return out

    def degrees(self) -> np.ndarray:
        # a loop contributes both of its endpoints, i.e. counts twice
        return np.bincount(self.edges.ravel(), minlength=self.n)


class SimpleGraph:
    """Undirected simple graph on nodes ``0..n-1`` stored as CSR adjacency.

    ``edges`` is the sorted ``(m, 2)`` array with ``u < v``; ``edge_id[i]``
    maps adjacency slot ``i`` back to its row in ``edges`` so that per-edge
    weights can be looked up from either endpoint.
    """

    def __init__(self, n: int, edges) -> None:
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            edges = np.sort(edges, axis=1)
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loop in simple graph")
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("parallel edge in simple graph")
        self.n = int(n)
        self.edges = edges
        self.edges.setflags(write=False)

        m = len(edges)
        heads = np.concatenate([edges[:, 0], edges[:, 1]])
        tails = np.concatenate([edges[:, 1], edges[:, 0]])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((tails, heads))
        self.indices = tails[order]
        self.edge_id = eids[order]
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(heads, minlength=self.n), out=self.indptr[1:])
        # python-list views for the hot loops in Dijkstra and gossip
        self._nbr = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def adjacency_lists(self):
        """Per-node lists of ``(neighbor, edge index)``; cached."""
        if self._nbr is None:
            idx = self.indices.tolist()
            eid = self.edge_id.tolist()
            ptr = self.indptr.tolist()
            self._nbr = [list(zip(idx[ptr[v]:ptr[v + 1]], eid[ptr[v]:ptr[v + 1]]))
                         for v in range(self.n)]
        return self._nbr

    def is_regular(self) -> int | None:
        d = self.degrees()
        if self.n and np.all(d == d[0]):
            return int(d[0])
        return None

    def with_edge(self, u: int, v: int) -> "SimpleGraph":
        return SimpleGraph(self.n, np.vstack([self.edges, [[u, v]]]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, SimpleGraph) and self.n == other.n
                and np.array_equal(self.edges, other.edges))

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, m={self.m})"


def _half_edges(ds: DegreeSequence) -> tuple[np.ndarray, np.ndarray]:
    deg = ds.degrees
    node = np.repeat(np.arange(ds.n, dtype=np.int64), deg)
    starts = np.repeat(np.cumsum(deg) - deg, deg)
    slot = np.arange(len(node), dtype=np.int64) - starts
    return node, slot


def sample_pairing(ds: DegreeSequence, rng: np.random.Generator) -> Multigraph:
    """Uniform perfect matching of the half-edges of ``ds``.

    The lowest-index unmatched half-edge is paired with a uniformly chosen
    other unmatched half-edge until none remain. Each step multiplies the
    count of choices by ``2m-1, 2m-3, ..., 1``, so every one of the
    ``(2m-1)!!`` matchings has equal probability.
    """
    total = ds.total
    if total % 2:
        raise ValueError(f"odd total degree {total}")
    node, slot = _half_edges(ds)
    m = total // 2
    if m == 0:
        return Multigraph(ds.n, node, slot, np.zeros((0, 2), dtype=np.int64))

    draws = rng.integers(0, np.arange(2 * m - 1, 0, -2)).tolist()
    pool = list(range(2 * m))
    pos = list(range(2 * m))
    matched = [False] * (2 * m)
    pairs = []
    low = 0

    def take(h):
        i = pos[h]
        last = pool.pop()
        if last != h:
            pool[i] = last
            pos[last] = i

    for j in draws:
        while matched[low]:
            low += 1
        a = low
        take(a)
        b = pool[j]
        take(b)
        matched[a] = matched[b] = True
        pairs.append((a, b))
    return Multigraph(ds.n, node, slot, np.array(pairs, dtype=np.int64))


def is_simple(g: Multigraph) -> bool:
    e = g.edges
    if len(e) == 0:
        return True
    if np.any(e[:, 0] == e[:, 1]):
        return False
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    keys = lo * g.n + hi
    return len(np.unique(keys)) == len(keys)


def sample_simple(ds: DegreeSequence, rng: np.random.Generator,
                  max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> tuple[SimpleGraph, int]:
    """Rejection-sample a uniform simple graph with degrees ``ds``.

    Returns the graph and the number of pairings drawn.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    for attempt in range(1, max_attempts + 1):
        mg = sample_pairing(ds, rng)
        if is_simple(mg):
            return SimpleGraph(ds.n, mg.edges), attempt
    raise SimplicityExhausted(f"no simple pairing in {max_attempts} attempts")


@dataclass(frozen=True)
class Components:
    labels: np.ndarray
    count: int
    largest: int


def connected_components(g: SimpleGraph) -> Components:
    mat = csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(g.n, g.n))
    count, labels = _cc(mat, directed=False)
    sizes = np.bincount(labels)
    return Components(labels=labels, count=int(count), largest=int(sizes.max()))


def write_edgelist(g: SimpleGraph, path: str | Path) -> None:
    """Header ``n m`` then one ``u v`` line per edge, 1-based, ``u < v``, sorted."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges.tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path: str | Path) -> SimpleGraph:
    rows = Path(path).read_text().split("\n")
    n, m = (int(x) for x in rows[0].split())
    body = [r for r in rows[1:] if r.strip()]
    if len(body) != m:
        raise ValueError(f"header says {m} edges, file has {len(body)}")
    edges = np.array([[int(x) - 1 for x in r.split()] for r in body], dtype=np.int64).reshape(-1, 2)
    return SimpleGraph(n, edges)
