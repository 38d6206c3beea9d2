"""Random Walk Controversy score and null-model significance testing."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .diagnostics import m_statistics
from .graph import ColoredMultigraph
from .samplers import ChainConfig, sample_ensemble


class RwcError(RuntimeError):
    pass


@dataclass
class RwcConfig:
    restart: float = 0.15
    k: int = 10
    sides: dict[int, int] | None = None   # color id -> 0 (side A) or 1 (side B)
    tol: float = 1e-10

    def __post_init__(self):
        if not 0 < self.restart < 1:
            raise ValueError("restart probability must lie in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be at least 1")


def map_communities(g: ColoredMultigraph) -> dict[int, int]:
    """Side A (0) is the most populous color, lowest id on ties; the rest is side B (1)."""
    counts = np.bincount(g.color, minlength=g.n_colors)
    present = np.flatnonzero(counts)
    if len(present) < 2:
        raise ValueError("need at least two colors to form two sides")
    top = int(np.argmax(counts))
    return {c: (0 if c == top else 1) for c in range(g.n_colors)}


def influencers(g: ColoredMultigraph, side_of: np.ndarray, k: int) -> list[np.ndarray]:
    """Top-``k`` vertices by degree in each side, ties broken by vertex id."""
    deg = g.degrees()
    out = []
    for s in (0, 1):
        members = np.flatnonzero(side_of == s)
        order = np.lexsort((members, -deg[members]))
        out.append(members[order[:k]])
    return out


def _walk_matrix(g: ColoredMultigraph) -> sp.csr_matrix:
    """Row-stochastic neighbor transition matrix; self-loops weigh 2, isolated
    vertices stay put."""
    n = g.n
    rows, cols, vals = [], [], []
    for (a, b), w in g._mult.items():
        if a == b:
            rows.append(a); cols.append(a); vals.append(2.0 * w)
        else:
            rows += [a, b]; cols += [b, a]; vals += [float(w), float(w)]
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    deg = np.asarray(A.sum(axis=1)).ravel()
    iso = deg == 0
    if iso.any():
        A = A + sp.csr_matrix((np.ones(iso.sum()), (np.flatnonzero(iso), np.flatnonzero(iso))), shape=(n, n))
        deg[iso] = 1.0
    return sp.diags(1.0 / deg) @ A


@dataclass
class RwcResult:
    score: float
    P: np.ndarray          # P[x, y]: start side x, absorbed at side y (conditional)
    absorbed: np.ndarray   # unconditional absorption mass per start side


def absorption_probabilities(g: ColoredMultigraph, side_of: np.ndarray, infl: list[np.ndarray],
                             restart: float, tol: float = 1e-10) -> np.ndarray:
    """``R[x, y]``: probability that a restart walk launched uniformly in side
    ``x`` is first absorbed at an influencer of side ``y``.

    A walk is absorbed the first time it stands on any influencer, including
    its start vertex and any vertex it restarts to.
    """
    n = g.n
    T = _walk_matrix(g)
    is_infl = np.zeros(n, dtype=bool)
    label = np.full(n, -1)
    for s in (0, 1):
        is_infl[infl[s]] = True
        label[infl[s]] = s
    N = np.flatnonzero(~is_infl)
    I = np.flatnonzero(is_infl)
    T_NN = T[N][:, N]
    T_NI = T[N][:, I]
    R = np.zeros((2, 2))
    for x in (0, 1):
        start = (side_of == x).astype(float)
        start /= start.sum()
        sN, sI = start[N], start[I]
        # unknowns: q on non-influencers, then the restart value r
        # q = a r 1 + (1 - a) (T_NN q + T_NI b);   r = sN.q + sI.b
        k = len(N)
        top = sp.hstack([sp.identity(k) - (1 - restart) * T_NN,
                         sp.csr_matrix(-restart * np.ones((k, 1)))])
        bottom = sp.hstack([sp.csr_matrix(-sN[None, :]), sp.csr_matrix(np.ones((1, 1)))])
        M = sp.vstack([top, bottom]).tocsc()
        for y in (0, 1):
            b = (label[I] == y).astype(float)
            rhs = np.concatenate([(1 - restart) * (T_NI @ b), [sI @ b]])
            sol = _solve(M, rhs, tol)
            R[x, y] = sol[-1]
    return R


def _solve(M, rhs, tol):
    try:
        sol = spla.spsolve(M, rhs)
    except RuntimeError as exc:  # singular factorization
        raise RwcError(f"absorption system is singular: {exc}") from None
    if not np.all(np.isfinite(sol)):
        raise RwcError("absorption system is singular (walks may never be absorbed)")
    for _ in range(3):
        res = rhs - M @ sol
        if np.abs(res).max() < tol:
            return sol
        sol = sol + spla.spsolve(M, res)
    res = np.abs(rhs - M @ sol).max()
    if res >= tol:
        raise RwcError(f"absorption solve did not converge (residual {res:.3g})")
    return sol


def rwc(g: ColoredMultigraph, config: RwcConfig | None = None) -> RwcResult:
    """Random Walk Controversy ``P_AA P_BB - P_AB P_BA``.

    ``P_XY`` is the probability that a restart walk started uniformly in side
    ``X`` ends at an influencer of side ``Y``, conditioned on absorption.
    """
    config = config or RwcConfig()
    sides = config.sides if config.sides is not None else map_communities(g)
    side_of = np.array([sides[int(c)] for c in g.color])
    if not ((side_of == 0).any() and (side_of == 1).any()):
        raise RwcError("both sides need at least one vertex")
    infl = influencers(g, side_of, config.k)
    R = absorption_probabilities(g, side_of, infl, config.restart, config.tol)
    mass = R.sum(axis=1)
    if np.any(mass <= 0):
        raise RwcError("walks from one side are never absorbed")
    P = R / mass[:, None]
    score = P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
    return RwcResult(float(score), P, mass)


# -------------------------------------------------------------------- testing
def _score_fn(score, rwc_config) -> tuple[str, Callable[[ColoredMultigraph], float]]:
    if callable(score):
        return getattr(score, "__name__", "custom"), score
    if score == "rwc":
        return "rwc", lambda h: rwc(h, rwc_config).score
    if score in ("m", "M"):
        return "M", lambda h: m_statistics(h)[0]
    raise ValueError(f"unknown score {score!r}")


@dataclass
class SignificanceResult:
    score_name: str
    observed: float
    nulls: list[float]
    p_one_sided_ge: float
    p_one_sided_le: float
    p_two_sided: float
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def empirical_p_values(observed: float, nulls, rel_tol: float = 1e-12) -> tuple[float, float, float]:
    """Add-one empirical p-values ``(p_ge, p_le, p_two_sided)``."""
    nulls = np.asarray(nulls, dtype=float)
    z = len(nulls)
    eps = rel_tol * max(1.0, abs(observed))
    ge = (1 + int(np.sum(nulls >= observed - eps))) / (z + 1)
    le = (1 + int(np.sum(nulls <= observed + eps))) / (z + 1)
    return ge, le, min(1.0, 2 * min(ge, le))


def significance_test(g: ColoredMultigraph, sampler_config: ChainConfig | None = None,
                      score="rwc", z: int = 100, rwc_config: RwcConfig | None = None,
                      parallelism: int = 1) -> SignificanceResult:
    """Compare a score on ``g`` with its values on ``z`` null-model samples.

    For the RWC score, communities are mapped once on ``g`` (colors never
    change) and influencers are recomputed on every sample.
    """
    sampler_config = sampler_config or ChainConfig()
    rwc_config = rwc_config or RwcConfig()
    if score == "rwc" and rwc_config.sides is None:
        rwc_config = RwcConfig(rwc_config.restart, rwc_config.k, map_communities(g), rwc_config.tol)
    name, fn = _score_fn(score, rwc_config)
    observed = float(fn(g))
    samples = sample_ensemble(g, sampler_config, z, parallelism)
    nulls = [float(fn(s.graph)) for s in samples]
    ge, le, two = empirical_p_values(observed, nulls)
    cfg = {
        "algorithm": sampler_config.algorithm,
        "iterations": sampler_config.resolved_iterations(g.m),
        "seed": sampler_config.seed,
        "z": z,
    }
    if name == "rwc":
        cfg.update(restart=rwc_config.restart, k=rwc_config.k)
    return SignificanceResult(name, observed, nulls, ge, le, two, cfg)
