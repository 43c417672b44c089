"""Text edge-list serialization: "n m" header, then "i j [w]" lines.

Weights are written with Python's shortest round-trip repr, so reading a
written file reproduces the weight bit-for-bit.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graphs import Graph, WeightedGraph


def dumps_graph(g: Graph | WeightedGraph) -> str:
    if isinstance(g, WeightedGraph):
        lines = [f"{g.graph.n} {g.graph.m}"]
        lines += [f"{i} {j} {repr(float(w))}" for (i, j), w in zip(g.graph.edges, g.weights)]
    else:
        lines = [f"{g.n} {g.m}"]
        lines += [f"{i} {j}" for i, j in g.edges]
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> Graph | WeightedGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header {lines[0]!r}; expected 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(lines) != m + 1:
        raise ValueError(f"header promises {m} edges, file has {len(lines) - 1}")
    rows = [ln.split() for ln in lines[1:]]
    widths = {len(r) for r in rows}
    if not rows:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    if widths == {2}:
        edges = np.array([[int(a), int(b)] for a, b in rows], dtype=np.int64)
        return Graph(n, edges)
    if widths == {3}:
        edges = np.array([[int(r[0]), int(r[1])] for r in rows], dtype=np.int64)
        weights = np.array([float(r[2]) for r in rows])
        return WeightedGraph(Graph(n, edges), weights)
    raise ValueError("mixed weighted/unweighted edge lines")


def write_graph(path: str | Path, g: Graph | WeightedGraph) -> None:
    Path(path).write_text(dumps_graph(g))


def read_graph(path: str | Path) -> Graph | WeightedGraph:
    return loads_graph(Path(path).read_text())
