"""specldp: a numerical laboratory for the largest eigenvalue of sparse
random graphs with Weibull edge-weights.

Subpackages: ``distributions`` (exact samplers and tail bounds),
``graphs`` (Erdos-Renyi sampling and structure analyzers), ``spectral``
(eigensolvers and deterministic inequalities), ``variational`` (the
generalized clique Lagrangian and every rate function), ``planting``
(deterministic certificates), ``experiments`` (seeded Monte Carlo
campaigns) and ``cli``.
"""

from . import cliques, distributions, experiments, graphs, planting, serialize, spectral, streams, variational

__all__ = [
    "cliques",
    "distributions",
    "experiments",
    "graphs",
    "planting",
    "serialize",
    "spectral",
    "streams",
    "variational",
]

__version__ = "0.1.0"
