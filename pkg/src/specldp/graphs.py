"""Sparse random graphs with weighted edges and their structural analyzers.

Graphs are stored as a sorted, duplicate-free edge list over vertices
0..n-1; a WeightedGraph aligns one real weight per edge and represents the
symmetric matrix with those off-diagonal entries and zero diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import WeibullSpec, sample as sample_weights
from . import cliques

DEFAULT_GAMMA_GRID = tuple(round(0.1 * i, 1) for i in range(16))  # 0.0 .. 1.5


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count plus a sorted (m, 2) edge array."""

    n: int
    edges: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", e)
        if self.n < 0:
            raise ValueError("vertex count must be >= 0")
        if e.size:
            if e.min() < 0 or e.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if not (e[:, 0] < e[:, 1]).all():
                raise ValueError("edges must satisfy i < j")
            keys = e[:, 0] * self.n + e[:, 1]
            if not (np.diff(keys) > 0).all():
                raise ValueError("edges must be sorted lexicographically without duplicates")

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        if self.m:
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg

    @staticmethod
    def from_edges(n: int, pairs) -> "Graph":
        """Canonicalize arbitrary (i, j) pairs: orient, sort, deduplicate."""
        e = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if e.size:
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            if (lo == hi).any():
                raise ValueError("self-loops are not allowed")
            keys = np.unique(lo * n + hi)
            e = np.column_stack([keys // n, keys % n])
        return Graph(n, e)


@dataclass(frozen=True)
class WeightedGraph:
    """Graph plus one real weight per edge (symmetric matrix, zero diagonal)."""

    graph: Graph
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        object.__setattr__(self, "weights", w)
        if w.shape[0] != self.graph.m:
            raise ValueError(f"{w.shape[0]} weights for {self.graph.m} edges")


def _pairs_from_indices(k: np.ndarray, n: int) -> np.ndarray:
    """Invert the lexicographic linear index of pairs (i, j), i < j."""
    k = np.asarray(k, dtype=np.int64)
    tn = 2 * n - 1
    i = ((tn - np.sqrt(tn * tn - 8.0 * k)) / 2.0).astype(np.int64)
    i = np.clip(i, 0, n - 2)

    def offset(ii):
        return ii * (2 * n - ii - 1) // 2

    # Two vectorized fix-up passes keep the float solve exact.
    for _ in range(2):
        i = np.where(offset(i + 1) <= k, i + 1, i)
        i = np.where(offset(i) > k, i - 1, i)
    j = k - offset(i) + i + 1
    return np.column_stack([i, j])


def sample_er(n: int, d: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi graph G(n, d/n) via geometric skipping (O(dn) expected).

    Each of the C(n, 2) pairs is present independently with probability
    p = d/n; d = n (p = 1) gives the complete graph.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 < d <= n:
        raise ValueError(f"need 0 < d <= n (edge density d/n in (0, 1]), got d={d}")
    p = d / n
    total = n * (n - 1) // 2
    if p >= 1.0:
        return Graph(n, _pairs_from_indices(np.arange(total), n))
    hits = []
    pos = -1
    expected_left = total * p
    while pos < total:
        size = int(expected_left + 6.0 * math.sqrt(expected_left + 1.0) + 16.0)
        gaps = rng.geometric(p, size=size)
        idx = pos + np.cumsum(gaps)
        inside = idx < total
        if inside.all():
            hits.append(idx)
            pos = int(idx[-1])
            expected_left = (total - 1 - pos) * p
        else:
            hits.append(idx[inside])
            break
    if not hits or sum(h.size for h in hits) == 0:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    return Graph(n, _pairs_from_indices(np.concatenate(hits), n))


def attach_weights(g: Graph, spec: WeibullSpec, rng: np.random.Generator) -> WeightedGraph:
    """Attach i.i.d. canonical Weibull weights to every edge."""
    spec.require_canonical("attach_weights")
    w = sample_weights(spec, rng, size=g.m) if g.m else np.empty(0)
    return WeightedGraph(g, w)


def split_by_threshold(z: WeightedGraph, threshold: float) -> tuple[WeightedGraph, WeightedGraph]:
    """Partition edges into (|w| > threshold, |w| <= threshold) subgraphs."""
    mask = np.abs(z.weights) > threshold
    n = z.graph.n
    high = WeightedGraph(Graph(n, z.graph.edges[mask]), z.weights[mask])
    low = WeightedGraph(Graph(n, z.graph.edges[~mask]), z.weights[~mask])
    return high, low


def degree_scale(n: float) -> float:
    """The typical maximum-degree scale log n / log log n."""
    logn = math.log(n)
    if logn <= 1.0:
        raise ValueError(f"need log log n > 0, got n={n}")
    return logn / math.log(logn)


def scaled_degree(gamma: float, n: int) -> int:
    """Degree threshold ceil(gamma * log n / log log n); 0 for gamma = 0."""
    if gamma < 0:
        raise ValueError(f"need gamma >= 0, got {gamma}")
    if n < 16:
        raise ValueError(f"degree thresholds need n >= 16, got {n}")
    return int(math.ceil(gamma * degree_scale(n)))


@dataclass(frozen=True)
class ComponentStats:
    size: int
    edge_count: int
    tree_excess: int  # |E| - |V|; -1 exactly for trees
    max_clique: int
    clique_exact: bool


@dataclass(frozen=True)
class StructureReport:
    n: int
    degree_counts: dict[int, int]
    d_gamma_counts: dict[float, int]
    components: tuple[ComponentStats, ...]
    max_degree: int

    @property
    def max_clique(self) -> int:
        return max((c.max_clique for c in self.components), default=0)

    @property
    def clique_exact(self) -> bool:
        return all(c.clique_exact for c in self.components)

    @property
    def tree_fraction(self) -> float:
        if not self.components:
            return 1.0
        return sum(1 for c in self.components if c.tree_excess == -1) / len(self.components)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def connected_components(g: Graph) -> list[np.ndarray]:
    """Vertex sets of the connected components (singletons included)."""
    uf = _UnionFind(g.n)
    for i, j in g.edges:
        uf.union(int(i), int(j))
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(uf.find(v), []).append(v)
    return [np.array(vs, dtype=np.int64) for vs in groups.values()]


def structure_report(
    g: Graph,
    gammas: tuple[float, ...] | None = None,
    clique_budget: int = 10**6,
) -> StructureReport:
    """Exact degree profile, component and clique statistics.

    ``gammas`` selects the degree-threshold grid for the high-degree counts
    (defaults to 0.0..1.5 in steps of 0.1 when n >= 16, else empty).  The
    per-component maximum clique is exact unless the branch-and-bound budget
    is exhausted, in which case the value is a flagged lower bound.
    """
    deg = g.degrees()
    degree_counts = {int(k): int(c) for k, c in zip(*np.unique(deg, return_counts=True))}
    if gammas is None:
        gammas = DEFAULT_GAMMA_GRID if g.n >= 16 else ()
    d_gamma = {float(gamma): int(np.sum(deg >= scaled_degree(gamma, g.n))) for gamma in gammas}

    adj = cliques.adjacency_sets(g.n, g.edges)
    comps = []
    for verts in connected_components(g):
        vset = set(int(v) for v in verts)
        edge_count = sum(len(adj[v] & vset) for v in vset) // 2
        size = len(vset)
        omega, exact = cliques.max_clique_subset(adj, vset, budget=clique_budget)
        comps.append(ComponentStats(size, edge_count, edge_count - size, omega, exact))
    return StructureReport(
        n=g.n,
        degree_counts=degree_counts,
        d_gamma_counts=d_gamma,
        components=tuple(comps),
        max_degree=int(deg.max()) if g.n else 0,
    )


@dataclass(frozen=True)
class StarDecomposition:
    """Vertex-disjoint stars plus the leftover graph on the same vertex set."""

    stars: tuple[tuple[int, tuple[int, ...]], ...]
    remainder: Graph
    success: bool
    degree_threshold: int

    @property
    def star_edge_count(self) -> int:
        return sum(len(leaves) for _, leaves in self.stars)


def star_decomposition(g: Graph, degree_threshold: int) -> StarDecomposition:
    """Greedy extraction of vertex-disjoint stars.

    Repeatedly pick the unused vertex of maximum residual degree (ties to the
    lowest index).  While that degree exceeds the threshold, emit the star on
    its currently-unused neighbors, mark the center and leaves used, and move
    the center's remaining edges to the remainder; a high-degree vertex with
    no unused neighbors forfeits its edges to the remainder.  Neighbors whose
    own leftover degree would exceed the threshold are not absorbed as leaves:
    they stay available to center their own stars, which is what keeps the
    remainder degree small on chains of high-degree vertices.  Extraction
    stops once the maximum residual degree is at or below the threshold;
    ``success`` records whether the remainder's maximum degree stayed there.
    """
    if degree_threshold < 1:
        raise ValueError(f"need degree_threshold >= 1, got {degree_threshold}")
    import heapq

    adj = cliques.adjacency_sets(g.n, g.edges)
    resdeg = [len(adj[v]) for v in range(g.n)]
    used = [False] * g.n
    heap = [(-resdeg[v], v) for v in range(g.n) if resdeg[v] > degree_threshold]
    heapq.heapify(heap)
    stars: list[tuple[int, tuple[int, ...]]] = []
    remainder_edges: list[tuple[int, int]] = []

    def drop_edge(a: int, b: int) -> None:
        adj[a].discard(b)
        adj[b].discard(a)
        resdeg[a] -= 1
        resdeg[b] -= 1

    while heap:
        negd, v = heapq.heappop(heap)
        if -negd != resdeg[v]:
            continue  # stale entry
        if resdeg[v] <= degree_threshold:
            break
        nbrs = sorted(adj[v])
        if used[v]:
            leaves = []
        else:
            leaves = [u for u in nbrs if not used[u] and resdeg[u] - 1 <= degree_threshold]
        if leaves:
            stars.append((v, tuple(leaves)))
            used[v] = True
            for u in leaves:
                used[u] = True
        for u in nbrs:
            drop_edge(v, u)
            if u not in leaves:
                remainder_edges.append((min(v, u), max(v, u)))
            if resdeg[u] > degree_threshold:
                heapq.heappush(heap, (-resdeg[u], u))
    for v in range(g.n):
        for u in adj[v]:
            if v < u:
                remainder_edges.append((v, u))
    remainder = Graph.from_edges(g.n, remainder_edges)
    rdeg = remainder.degrees()
    success = bool(rdeg.max() <= degree_threshold) if remainder.m else True
    return StarDecomposition(tuple(stars), remainder, success, degree_threshold)
