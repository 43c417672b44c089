"""Deterministic structures that certify lower bounds on the largest eigenvalue.

Three constructions: the block matrix achieving equality in the quasinorm
spectral bound, a weighted clique whose restriction reaches a prescribed
multiple of the heavy-tail typical value, and a uniform-weight star doing
the same for light tails.  Constructors certify their target against the
dense eigensolver before returning; ``embed`` plants a structure inside an
ambient weighted graph without weakening the certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import variational
from .graphs import Graph, WeightedGraph, scaled_degree
from .spectral import dense_matrix, lambda1_dense, lambda1_sparse
from .serialize import write_graph


class CertificationError(RuntimeError):
    """A constructed structure failed its eigenvalue certification."""


@dataclass(frozen=True)
class PlantedStructure:
    kind: str  # "star" | "clique" | "block-matrix"
    size: int  # number of vertices of the structure
    edges: np.ndarray  # (m, 2) local vertex indices
    weights: np.ndarray
    target_lambda1: float
    params: dict

    def as_weighted_graph(self) -> WeightedGraph:
        return WeightedGraph(Graph(self.size, self.edges), self.weights)

    def scaled(self, c: float) -> "PlantedStructure":
        """Homogeneity: scaling all weights by c > 0 scales the target by c."""
        if not c > 0:
            raise ValueError(f"need c > 0, got {c}")
        return PlantedStructure(
            self.kind,
            self.size,
            self.edges,
            self.weights * c,
            self.target_lambda1 * c,
            dict(self.params, scaled_by=self.params.get("scaled_by", 1.0) * c),
        )


def _certify_at_least(structure: PlantedStructure, slack: float = 1e-9) -> float:
    lam = lambda1_dense(dense_matrix(structure.as_weighted_graph()))
    if lam < structure.target_lambda1 - slack:
        raise CertificationError(
            f"{structure.kind}: measured lambda1 {lam} below target {structure.target_lambda1}"
        )
    return lam


def _clique_support_matrix(theta: float, p_exponent: float, k: int):
    """Weights (f_i f_j)**(q/(2p)) on the support clique of the Lagrangian
    maximizer f, so that every entry satisfies a_ij**p = f_i**(q/2) f_j**(q/2)."""
    sol = variational.clique_lagrangian(theta, k)
    f = np.concatenate([np.full(sol.k1, sol.x), np.full(sol.k2, sol.y)])
    f = f[f > 0]
    s = f.size
    edges = np.array([[i, j] for i in range(s) for j in range(i + 1, s)], dtype=np.int64)
    q = 2.0 * theta
    expo = q / (2.0 * p_exponent)
    weights = np.array([(f[i] * f[j]) ** expo for i, j in edges])
    return sol, edges, weights, s


def equality_network(p: float, k: int) -> PlantedStructure:
    """Block matrix achieving equality in the 1 < p < 2 quasinorm bound.

    Builds the maximizer of the Lagrangian at exponent q/2 (q conjugate to
    p) and certifies lambda1 / (L**((p-1)/p) * ||A||_p) to be 1 within
    [1 - 1e-6, 1 + 1e-10].
    """
    if not 1.0 < p < 2.0:
        raise ValueError(f"equality network needs 1 < p < 2, got {p}")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    q = p / (p - 1.0)
    sol, edges, weights, s = _clique_support_matrix(q / 2.0, p, k)
    norm_p = (2.0 * np.sum(weights**p)) ** (1.0 / p)
    bound = sol.value ** ((p - 1.0) / p) * norm_p
    structure = PlantedStructure(
        kind="block-matrix",
        size=s,
        edges=edges,
        weights=weights,
        target_lambda1=bound,
        params={"p": p, "k": k, "k1": sol.k1, "k2": sol.k2, "x": sol.x, "y": sol.y},
    )
    lam = lambda1_dense(dense_matrix(structure.as_weighted_graph()))
    ratio = lam / bound
    if not (1.0 - 1e-6 <= ratio <= 1.0 + 1e-10):
        raise CertificationError(f"equality ratio {ratio} outside [1-1e-6, 1+1e-10]")
    return structure


def plant_clique(alpha: float, delta: float, n: float, k: int) -> PlantedStructure:
    """Weighted clique whose restriction certifies a (1+delta) heavy deviation.

    For alpha <= 1 the optimal structure is a single edge of weight
    (1+delta) * (log n)**(1/alpha) (k must be 2).  For 1 < alpha < 2 the
    weights are the equality block matrix rescaled so its top eigenvalue is
    exactly the target; the reported planting cost per Weibull exponent is
    (1/2) * (1+delta)**alpha * L_{b/2}(k)**(1-alpha).
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"need 0 < alpha < 2, got {alpha}")
    if not delta > 0.0:
        raise ValueError(f"need delta > 0, got {delta}")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if k > 1000:
        raise ValueError(f"certification budget limits k <= 1000, got {k}")
    target = (1.0 + delta) * variational.typical_heavy(alpha, n)
    logn = math.log(n)
    if alpha <= 1.0:
        if k != 2:
            raise ValueError("for alpha <= 1 the optimal structure is a single edge; use k = 2")
        structure = PlantedStructure(
            kind="clique",
            size=2,
            edges=np.array([[0, 1]], dtype=np.int64),
            weights=np.array([target]),
            target_lambda1=target,
            params={"alpha": alpha, "delta": delta, "n": n, "k": 2,
                    "cost": target**alpha / (2.0 * logn) * 2.0,
                    "cost_predicted": (1.0 + delta) ** alpha / 2.0 * 2.0},
        )
        _certify_at_least(structure)
        return structure
    beta = variational.conjugate_exponent(alpha)
    sol, edges, weights, s = _clique_support_matrix(beta / 2.0, alpha, k)
    base = WeightedGraph(Graph(s, edges), weights)
    lam_base = lambda1_dense(dense_matrix(base))
    weights = weights * (target / lam_base)
    cost = float(2.0 * np.sum(weights**alpha)) / (2.0 * logn)
    cost_predicted = 0.5 * (1.0 + delta) ** alpha * sol.value ** (1.0 - alpha)
    structure = PlantedStructure(
        kind="clique",
        size=s,
        edges=edges,
        weights=weights,
        target_lambda1=target,
        params={"alpha": alpha, "delta": delta, "n": n, "k": k,
                "k1": sol.k1, "k2": sol.k2, "cost": cost, "cost_predicted": cost_predicted},
    )
    _certify_at_least(structure)
    return structure


def plant_star(alpha: float, delta: float, n: int) -> PlantedStructure:
    """Uniform-weight star certifying a (1+delta) light-tail deviation.

    Degree is the scaled threshold at the optimal fraction
    (1+delta)**2 (1-2/alpha); the uniform weight makes the star eigenvalue
    exactly (1+delta) times the typical value (the degree ceiling can only
    help).
    """
    if not alpha > 2.0:
        raise ValueError(f"need alpha > 2, got {alpha}")
    if delta < 0.0:
        raise ValueError(f"need delta >= 0, got {delta}")
    gamma = variational.star_gamma(alpha, delta)
    deg = scaled_degree(gamma, n)
    if deg == 0:
        raise ValueError(f"degenerate star degree 0 for alpha={alpha}, delta={delta}, n={n}")
    target = (1.0 + delta) * variational.typical_light(alpha, n)
    w = target / math.sqrt(deg)
    edges = np.array([[0, j] for j in range(1, deg + 1)], dtype=np.int64)
    structure = PlantedStructure(
        kind="star",
        size=deg + 1,
        edges=edges,
        weights=np.full(deg, w),
        target_lambda1=target,
        params={"alpha": alpha, "delta": delta, "n": n, "gamma": gamma, "degree": deg, "weight": w},
    )
    _certify_at_least(structure)
    return structure


@dataclass(frozen=True)
class EmbedResult:
    graph: WeightedGraph
    slots: np.ndarray  # ambient vertex hosting each structure vertex
    collisions: int  # ambient edges inside the slot set that were overwritten
    lambda1_measured: float | None


def embed(
    ambient: WeightedGraph,
    structure: PlantedStructure,
    rng: np.random.Generator,
    check: bool = True,
    tol: float = 1e-10,
) -> EmbedResult:
    """Plant ``structure`` on random vertex slots of ``ambient``.

    Every ambient edge with both endpoints inside the slot set is removed
    (collision), so the restriction of the output to the slots equals the
    planted weight assignment verbatim and eigenvalue interlacing gives
    lambda1(output) >= target unconditionally.  With ``check`` the sparse
    solver verifies that within 1e-9.
    """
    n = ambient.graph.n
    if n < structure.size:
        raise ValueError(f"ambient graph has {n} vertices; structure needs {structure.size}")
    slots = np.sort(rng.choice(n, size=structure.size, replace=False))
    slot_set = set(int(v) for v in slots)
    keep = np.array(
        [not (int(i) in slot_set and int(j) in slot_set) for i, j in ambient.graph.edges],
        dtype=bool,
    )
    collisions = int((~keep).sum())
    mapped = slots[structure.edges]
    lo = np.minimum(mapped[:, 0], mapped[:, 1])
    hi = np.maximum(mapped[:, 0], mapped[:, 1])
    all_edges = np.vstack([ambient.graph.edges[keep], np.column_stack([lo, hi])])
    all_weights = np.concatenate([ambient.weights[keep], structure.weights])
    order = np.lexsort((all_edges[:, 1], all_edges[:, 0]))
    out = WeightedGraph(Graph(n, all_edges[order]), all_weights[order])
    measured = None
    if check:
        measured = lambda1_sparse(out, tol=tol, want_eigvec=False).lambda1
        if measured < structure.target_lambda1 - 1e-9:
            raise CertificationError(
                f"embedded lambda1 {measured} below target {structure.target_lambda1}"
            )
    return EmbedResult(out, slots, collisions, measured)


def write_structure(path: str | Path, structure: PlantedStructure) -> None:
    """Edge-list file plus a JSON sidecar with kind, target and parameters."""
    path = Path(path)
    write_graph(path, structure.as_weighted_graph())
    sidecar = {
        "kind": structure.kind,
        "target_lambda1": structure.target_lambda1,
        "size": structure.size,
        "params": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                   for k, v in structure.params.items()},
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
