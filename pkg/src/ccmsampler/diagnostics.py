"""Summary statistics used to compare samplers and check convergence."""
from __future__ import annotations

import numpy as np

from . import _kernels as K
from .graph import ColoredMultigraph


def degree_assortativity(g: ColoredMultigraph) -> float:
    """Degree assortativity of a multigraph.

    Pearson correlation between endpoint degrees over the ``2m`` ordered
    endpoint pairs (each occurrence in both orientations, self-loops
    included).  Returns NaN when every endpoint has the same degree.
    """
    if g.m == 0:
        raise ValueError("degree assortativity is undefined for a graph without edges")
    e = g.edge_array()
    return float(K.endpoint_degree_assortativity(e[:, 0].copy(), e[:, 1].copy(), g.degrees()))


def theta(g: ColoredMultigraph) -> float:
    r"""Probability that a uniform baseline proposal lands in the CDM space.

    .. math::

        \theta = \sum_\ell \frac{|E_{\ell\ell}|(|E_{\ell\ell}|-1)}{m(m-1)}
               + \sum_{\ell<r} \frac{|E_{\ell r}|(|E_{\ell r}|-1)}{2m(m-1)}
    """
    m = g.m
    if m < 2:
        raise ValueError("theta needs at least two edges")
    total = 0
    for (a, b), s in g.class_sizes().items():
        total += s * (s - 1) * (2 if a == b else 1)
    return total / (2 * m * (m - 1))


def m_statistics(g: ColoredMultigraph) -> tuple[float, np.ndarray]:
    """Average and per-vertex fraction of same-color neighbors.

    ``M_v = d^{c(v)}(v) / d(v)`` counted with multiplicity.  Isolated vertices
    get NaN and are left out of the average.
    """
    C = g._cdeg
    deg = C.sum(axis=0)
    same = C[g.color, np.arange(g.n)] if g.n else np.zeros(0)
    mv = np.full(g.n, np.nan)
    nz = deg > 0
    mv[nz] = same[nz] / deg[nz]
    M = float(mv[nz].mean()) if nz.any() else float("nan")
    return M, mv


def top_degree_mv(g: ColoredMultigraph, k: int = 10) -> list[tuple[int, float]]:
    """``(vertex, M_v)`` for the ``k`` highest-degree vertices, ties by id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    deg = g.degrees()
    order = np.lexsort((np.arange(g.n), -deg))[:k]
    _, mv = m_statistics(g)
    return [(int(v), float(mv[v])) for v in order]


def outcome_summary(tallies: dict[str, int]) -> dict[str, float]:
    total = sum(tallies.values())
    return {k: (v / total if total else 0.0) for k, v in tallies.items()}
