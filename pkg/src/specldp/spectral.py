"""Largest-eigenvalue computation and deterministic spectral inequalities.

``lambda1`` always means the largest *signed* eigenvalue, not the spectral
radius.  The sparse solver is a restarted Lanczos iteration run on the
shifted matrix Z + sigma*I (sigma = max absolute row sum), which makes the
target eigenvalue the dominant one even for bipartite pieces like weighted
stars whose spectrum is symmetric about zero; the shift is subtracted from
the reported value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graphs import WeightedGraph
from .streams import derive_stream
from . import variational


class CoverageError(ValueError):
    """The provided parts do not cover the target graph's edges."""


@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    eigvec: np.ndarray | None
    iterations: int
    residual: float
    converged: bool


def lambda1_dense(a: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric matrix via LAPACK (test oracle).

    Intended for n <= 2000; raises on larger inputs and on matrices that are
    asymmetric beyond 1e-12 relative.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > 2000:
        raise ValueError(f"dense oracle is limited to n <= 2000, got {n}")
    if n == 0:
        raise ValueError("empty matrix")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric within 1e-12 relative")
    return float(np.linalg.eigvalsh(a)[-1])


def dense_matrix(z: WeightedGraph) -> np.ndarray:
    """Materialize the symmetric weight matrix (zero diagonal)."""
    n = z.graph.n
    a = np.zeros((n, n))
    if z.graph.m:
        i, j = z.graph.edges[:, 0], z.graph.edges[:, 1]
        a[i, j] = z.weights
        a[j, i] = z.weights
    return a


def _csr(z: WeightedGraph) -> sp.csr_matrix:
    n = z.graph.n
    i, j = z.graph.edges[:, 0], z.graph.edges[:, 1]
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    vals = np.concatenate([z.weights, z.weights])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _lanczos_sweep(matvec, v0: np.ndarray, m: int, shift: float):
    """m steps of the three-term recurrence on (Z + shift*I) from v0.

    Returns (alphas, betas, steps, v0) where the recurrence orthogonalizes
    only against the previous two basis vectors (window 2); restarts recover
    the accuracy lost to finite precision.
    """
    n = v0.shape[0]
    alphas, betas = [], []
    q_prev = np.zeros(n)
    q = v0 / np.linalg.norm(v0)
    beta = 0.0
    for _ in range(m):
        u = matvec(q) + shift * q
        alpha = float(q @ u)
        alphas.append(alpha)
        r = u - alpha * q - beta * q_prev
        # window-2 reorthogonalization
        r -= (q @ r) * q + (q_prev @ r) * q_prev
        beta = float(np.linalg.norm(r))
        if beta < 1e-14 * max(1.0, abs(alpha)):
            break
        betas.append(beta)
        q_prev, q = q, r / beta
    return np.array(alphas), np.array(betas)


def _ritz_vector(matvec, v0: np.ndarray, shift: float, alphas, betas, y) -> np.ndarray:
    """Second pass: accumulate x = sum_j y_j q_j without storing the basis."""
    n = v0.shape[0]
    q_prev = np.zeros(n)
    q = v0 / np.linalg.norm(v0)
    x = y[0] * q
    beta = 0.0
    for j in range(len(alphas) - 1):
        u = matvec(q) + shift * q
        r = u - alphas[j] * q - beta * q_prev
        r -= (q @ r) * q + (q_prev @ r) * q_prev
        beta = betas[j]
        q_prev, q = q, r / beta
        x += y[j + 1] * q
    nrm = np.linalg.norm(x)
    return x / nrm if nrm > 0 else x


def lambda1_sparse(
    z: WeightedGraph,
    tol: float = 1e-10,
    max_iter: int | None = None,
    want_eigvec: bool = True,
) -> SpectralResult:
    """Largest signed eigenvalue of a sparse weighted graph.

    Restarted Lanczos with a deterministic start vector; the result carries
    the achieved residual ||Z v - lambda v||.  On non-convergence within
    ``max_iter`` matrix-vector products the best estimate is returned with
    ``converged = False``.
    """
    if tol <= 0:
        raise ValueError(f"need tol > 0, got {tol}")
    n = z.graph.n
    if max_iter is None:
        max_iter = 10 * max(n, 10)
    if z.graph.m == 0:
        vec = np.zeros(n)
        if n:
            vec[0] = 1.0
        return SpectralResult(0.0, vec if want_eigvec else None, 0, 0.0, True)

    a = _csr(z)
    shift = float(np.abs(a).sum(axis=1).max())
    matvec = lambda v: a @ v

    rng = derive_stream(0x5BEC, n, z.graph.m)
    v0 = rng.standard_normal(n)
    block = int(min(n, max(24, min(90, 2 * math.isqrt(n) + 10))))

    iterations = 0
    best_val, best_vec, best_res = -math.inf, None, math.inf
    while iterations < max_iter:
        m = int(min(block, max_iter - iterations))
        if m < 2:
            break
        alphas, betas = _lanczos_sweep(matvec, v0, m, shift)
        iterations += len(alphas)
        betas = betas[: len(alphas) - 1]
        t = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        evals, evecs = np.linalg.eigh(t)
        mu = float(evals[-1])
        y = evecs[:, -1]
        x = _ritz_vector(matvec, v0, shift, alphas, betas, y)
        iterations += max(0, len(alphas) - 1)
        lam = float(x @ matvec(x))
        res = float(np.linalg.norm(matvec(x) - lam * x))
        iterations += 2
        if lam > best_val or res < best_res:
            best_val, best_vec, best_res = lam, x, res
        if res <= tol * max(1.0, abs(lam)):
            return SpectralResult(lam, x if want_eigvec else None, iterations, res, True)
        if len(alphas) < m:
            # Krylov breakdown: mix in fresh randomness to escape the
            # invariant subspace in case the start vector was deficient.
            v0 = x + 1e-3 * rng.standard_normal(n)
        else:
            v0 = x
    return SpectralResult(best_val, best_vec if want_eigvec else None, iterations, best_res, False)


def lambda1_auto(z: WeightedGraph, tol: float = 1e-10) -> float:
    """Dense solve for small graphs, sparse iteration otherwise."""
    if z.graph.n <= 600:
        return lambda1_dense(dense_matrix(z))
    return lambda1_sparse(z, tol=tol, want_eigvec=False).lambda1


def star_lambda1(weights) -> float:
    """Largest eigenvalue of a weighted star: sqrt of the sum of squares."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        return 0.0
    return float(np.sqrt(np.sum(w * w)))


def max_abs_entry(z: WeightedGraph) -> float:
    """Max |weight|; a lower bound for lambda1 of any zero-diagonal matrix."""
    if z.graph.m == 0:
        return 0.0
    return float(np.abs(z.weights).max())


def lp_quasinorm(z: WeightedGraph, p: float) -> float:
    """Entrywise quasinorm (sum over ordered pairs |w|**p)**(1/p).

    The sum runs over ordered pairs, hence the factor 2 on the edge sum;
    the equality cases of the spectral bound depend on this convention.
    """
    if not p > 0:
        raise ValueError(f"need p > 0, got {p}")
    if z.graph.m == 0:
        return 0.0
    return float((2.0 * np.sum(np.abs(z.weights) ** p)) ** (1.0 / p))


def spectral_lp_bound(z: WeightedGraph, p: float, clique_k: int | None = None) -> float:
    """Deterministic upper bound on lambda1 from the entrywise L^p quasinorm.

    For 1 < p < 2 the bound is L_{p/(2(p-1))}(k)**((p-1)/p) * ||Z||_p where k
    must dominate the true maximum clique size of the support; for
    0 < p <= 1 it is 2**(-1/p) * ||Z||_p, clique-free.
    """
    if p >= 2.0:
        raise ValueError(f"the quasinorm bound needs p < 2, got {p}")
    if not p > 0.0:
        raise ValueError(f"need p > 0, got {p}")
    norm = lp_quasinorm(z, p)
    if p <= 1.0:
        return 2.0 ** (-1.0 / p) * norm
    if clique_k is None or clique_k < 2:
        raise ValueError("1 < p < 2 needs clique_k >= 2 (a bound on the max clique size)")
    theta = p / (2.0 * (p - 1.0))
    lag = variational.clique_lagrangian(theta, clique_k).value
    return lag ** ((p - 1.0) / p) * norm


def edge_cover_bound_check(z: WeightedGraph, parts: list[WeightedGraph], slack: float = 1e-9) -> bool:
    """Check lambda1(z) <= sum of the parts' lambda1 for an edge cover.

    Every edge of ``z`` must appear in at least one part with its weight, and
    parts may not carry edges absent from ``z``; otherwise a CoverageError is
    raised.
    """
    target = {(int(i), int(j)): float(w) for (i, j), w in zip(z.graph.edges, z.weights)}
    covered = set()
    for part in parts:
        for (i, j), w in zip(part.graph.edges, part.weights):
            key = (int(i), int(j))
            if key not in target:
                raise CoverageError(f"part edge {key} is not an edge of the target")
            if target[key] != float(w):
                raise CoverageError(f"part edge {key} carries weight {w} != {target[key]}")
            covered.add(key)
    if len(covered) != len(target):
        missing = set(target) - covered
        raise CoverageError(f"{len(missing)} target edges are uncovered, e.g. {next(iter(missing))}")
    total = sum(lambda1_auto(part) for part in parts)
    return lambda1_auto(z) <= total + slack
