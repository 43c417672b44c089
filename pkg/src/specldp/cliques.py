"""Exact maximum-clique search: Bron-Kerbosch with pivoting plus core peeling.

Sparse sub-critical graphs have tiny cliques, so the search first peels to
the 3-core (any clique of size >= 4 survives there) and answers sizes 1-3
from edge and triangle existence; branch and bound only runs on the core.
A recursion-node budget caps pathological inputs, in which case the result
is a flagged lower bound.
"""

from __future__ import annotations

import numpy as np


class CliqueBudgetExceeded(Exception):
    pass


def adjacency_sets(n: int, edges: np.ndarray) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for i, j in edges:
        adj[int(i)].add(int(j))
        adj[int(j)].add(int(i))
    return adj


def _bron_kerbosch(adj, p: set[int], x: set[int], depth: int, state) -> int:
    """Size of the largest clique extendable from (R of size `depth`, P, X)."""
    state["nodes"] += 1
    if state["nodes"] > state["budget"]:
        raise CliqueBudgetExceeded
    if not p and not x:
        return depth
    best = depth
    pivot = max(p | x, key=lambda u: len(p & adj[u]))
    for v in list(p - adj[pivot]):
        best = max(best, _bron_kerbosch(adj, p & adj[v], x & adj[v], depth + 1, state))
        p.discard(v)
        x.add(v)
    return best


def _three_core(adj, vertices: set[int]) -> set[int]:
    deg = {v: len(adj[v] & vertices) for v in vertices}
    queue = [v for v, d in deg.items() if d < 3]
    alive = set(vertices)
    while queue:
        v = queue.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] < 3:
                    queue.append(u)
    return alive


def _has_triangle(adj, vertices: set[int]) -> bool:
    for v in vertices:
        nv = adj[v] & vertices
        for u in nv:
            if u > v and adj[u] & nv:
                return True
    return False


def max_clique_subset(adj, vertices: set[int], budget: int = 10**6) -> tuple[int, bool]:
    """(max clique size, exact flag) for the induced subgraph on ``vertices``."""
    if not vertices:
        return 0, True
    has_edge = any(adj[v] & vertices for v in vertices)
    if not has_edge:
        return 1, True
    base = 3 if _has_triangle(adj, vertices) else 2
    core = _three_core(adj, vertices)
    if not core:
        return base, True
    state = {"nodes": 0, "budget": budget}
    try:
        omega = _bron_kerbosch(adj, set(core), set(), 0, state)
        return max(base, omega), True
    except CliqueBudgetExceeded:
        return base, False


def max_clique(n: int, edges: np.ndarray, budget: int = 10**6) -> tuple[int, bool]:
    """(max clique size, exact flag) of a whole graph given as an edge array."""
    if n == 0:
        return 0, True
    adj = adjacency_sets(n, edges)
    return max_clique_subset(adj, set(range(n)), budget=budget)


def max_clique_bruteforce(n: int, edges: np.ndarray) -> int:
    """Subset enumeration oracle, only for n <= 16 (test cross-check)."""
    if n > 16:
        raise ValueError("brute force limited to n <= 16")
    adjmask = [0] * n
    for i, j in edges:
        adjmask[int(i)] |= 1 << int(j)
        adjmask[int(j)] |= 1 << int(i)
    best = 1 if n else 0
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if size <= best:
            continue
        ok = True
        mm = mask
        while mm:
            v = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            if (mask & ~(adjmask[v] | (1 << v))) != 0:
                ok = False
                break
        if ok:
            best = size
    return best
