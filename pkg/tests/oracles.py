"""Brute-force references kept independent of the code under test."""

import itertools
import math


def simple_path_minima(n, edges, weights, source):
    """Minimum weight over every simple path from ``source``, by exhaustive DFS."""
    adj = {v: [] for v in range(n)}
    for (u, v), w in zip(edges, weights):
        adj[u].append((v, w))
        adj[v].append((u, w))
    best = [math.inf] * n
    best[source] = 0.0

    def walk(v, total, seen):
        for u, w in adj[v]:
            if u in seen:
                continue
            t = total + w
            if t < best[u]:
                best[u] = t
            walk(u, t, seen | {u})

    walk(source, 0.0, {source})
    return best


def perfect_matchings(items):
    """All perfect matchings of a list, each as a frozenset of frozenset pairs."""
    items = list(items)
    if not items:
        yield frozenset()
        return
    a = items[0]
    for i in range(1, len(items)):
        b = items[i]
        rest = items[1:i] + items[i + 1:]
        for m in perfect_matchings(rest):
            yield m | {frozenset((a, b))}


def cut_size(edges, inside):
    return sum((u in inside) != (v in inside) for u, v in edges)


def all_pairs(n):
    return itertools.product(range(n), range(n))
