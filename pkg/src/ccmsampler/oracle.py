"""Exhaustive ground truth for tiny instances.

Enumerates every multigraph reachable from a seed graph by changing
CDM-preserving swaps and builds the exact one-step transition matrices of
the refined chain (``P``) and the baseline chain (``P_B``) by summing over
every ordered occurrence pair and orientation coin.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .diagnostics import theta
from .graph import ColoredMultigraph, cdm
from .samplers import UNIFORM, ChainConfig, SelfLoopTarget, _ArrayChain, aperiodicity_conditions
from .swaps import SwapKind, apply_swap, propose

EXACT_STATE_LIMIT = 64
DEFAULT_LIMIT = 5000

State = tuple[tuple[int, int], ...]


class AtlasLimitError(RuntimeError):
    pass


@dataclass
class StateSpaceAtlas:
    colors: np.ndarray
    states: list[State]
    index: dict[State, int]
    moves: list[set[int]]          # changing-swap neighbors per state
    holds: list[bool]              # state has a non-changing in-space swap
    seed_state: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.states)

    def graph(self, i: int) -> ColoredMultigraph:
        return ColoredMultigraph(self.colors, self.states[i])


def _all_proposals(g: ColoredMultigraph):
    """Every ordered occurrence pair with both orientation coins."""
    m = g.m
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            for flip in (False, True):
                yield propose(g, a, b, flip)


def _neighbor(g: ColoredMultigraph, prop) -> State:
    h = g.copy()
    apply_swap(h, prop)
    return h.multiset()


def enumerate_states(g: ColoredMultigraph, limit: int = DEFAULT_LIMIT) -> StateSpaceAtlas:
    """Breadth-first closure of ``g`` under changing CDM-preserving swaps."""
    start = g.multiset()
    states, index = [start], {start: 0}
    moves: list[set[int]] = []
    holds: list[bool] = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        h = ColoredMultigraph(g.color, states[i])
        nbrs, hold = set(), False
        for prop in _all_proposals(h):
            if prop.kind is SwapKind.OUT_OF_SPACE:
                continue
            if not prop.changing:
                hold = True
                continue
            key = _neighbor(h, prop)
            if key not in index:
                if len(states) >= limit:
                    raise AtlasLimitError(f"state space exceeds {limit} states")
                index[key] = len(states)
                states.append(key)
                queue.append(index[key])
            nbrs.add(index[key])
        while len(moves) <= i:
            moves.append(set())
            holds.append(False)
        moves[i], holds[i] = nbrs, hold
    return StateSpaceAtlas(g.color.copy(), states, index, moves, holds)


@dataclass
class TransitionMatrices:
    P: np.ndarray
    P_B: np.ndarray
    theta: float | Fraction
    exact: bool


def exact_transition_matrices(atlas: StateSpaceAtlas, exact: bool | None = None,
                              target: SelfLoopTarget = UNIFORM,
                              class_weighting: str = "edge") -> TransitionMatrices:
    """Exact one-step matrices of the refined and baseline chains.

    ``exact=None`` picks rational arithmetic for atlases of at most
    ``EXACT_STATE_LIMIT`` states.  ``class_weighting`` selects how the
    refined chain picks its first occurrence: ``"edge"`` uniform over edges in
    classes of size at least two, ``"pair"`` proportional to the number of
    in-space ordered pairs of its class.
    """
    if exact is None:
        exact = len(atlas) <= EXACT_STATE_LIMIT
    one = Fraction(1) if exact else 1.0
    zero = 0 * one
    S = len(atlas)
    dtype = object if exact else np.float64
    P = np.full((S, S), zero, dtype=dtype)
    PB = np.full((S, S), zero, dtype=dtype)
    base = Fraction(target.base) if exact else float(target.base)

    def acceptance(prop) -> Fraction | float:
        dl = sum(a == b for a, b in prop.targets) - sum(a == b for a, b in prop.source)
        a = prop.rho * (base ** dl if dl >= 0 else one / base ** (-dl))
        return a if a < 1 else one

    def accumulate(M, i, h, prop, prob):
        if not prop.changing:
            M[i, i] += prob
            return
        j = atlas.index[_neighbor(h, prop)]
        acc = acceptance(prop)
        M[i, j] += prob * acc
        M[i, i] += prob * (one - acc)

    for i in range(S):
        h = atlas.graph(i)
        m = h.m
        sizes = h.class_sizes()
        # refined chain
        active = [s for s in range(m) if sizes[h.class_of(s)] >= 2]
        if not active:
            P[i, i] += one
        else:
            if class_weighting == "pair":
                w = {s: (sizes[h.class_of(s)] - 1) * (one if h.class_of(s)[0] == h.class_of(s)[1] else one / 2)
                     for s in active}
            else:
                w = {s: one for s in active}
            total = sum(w.values())
            for a in active:
                key = h.class_of(a)
                partners = [b for b in h.class_members(key) if b != a]
                pa = w[a] / total / len(partners)
                mono = key[0] == key[1]
                for b in partners:
                    if mono:
                        for flip in (False, True):
                            accumulate(P, i, h, propose(h, a, b, flip, exact=exact), pa / 2)
                    else:
                        # both occurrences are stored lower color first; flipping
                        # the first gives the only color-compatible swap
                        accumulate(P, i, h, propose(h, a, b, True, exact=exact), pa)
        # baseline chain
        if m < 2:
            PB[i, i] += one
            continue
        pb = one / (m * (m - 1) * 2)
        for a in range(m):
            for b in range(m):
                if a == b:
                    continue
                for flip in (False, True):
                    accumulate(PB, i, h, propose(h, a, b, flip, exact=exact), pb)

    g0 = atlas.graph(0)
    if g0.m < 2:
        th = one   # no proposals at all; both chains are the identity
    else:
        th = _theta_exact(g0) if exact else theta(g0)
    return TransitionMatrices(P, PB, th, exact)


def _theta_exact(g: ColoredMultigraph) -> Fraction:
    m = g.m
    total = sum(s * (s - 1) * (2 if a == b else 1) for (a, b), s in g.class_sizes().items())
    return Fraction(total, 2 * m * (m - 1))


# ------------------------------------------------------------------- checks
def scaling_residual(mats: TransitionMatrices):
    """Largest deviation from ``P_B = theta P`` off the diagonal and
    ``P_B = 1 - theta + theta P`` on it; an exact zero in rational mode."""
    P, PB, th = mats.P, mats.P_B, mats.theta
    S = P.shape[0]
    worst = 0 * th
    for i in range(S):
        for j in range(S):
            expected = th * P[i, j] + ((1 - th) if i == j else 0)
            worst = max(worst, abs(PB[i, j] - expected))
    return worst


def strongly_connected(atlas: StateSpaceAtlas) -> bool:
    S = len(atlas)
    for s in range(S):
        seen = {s}
        queue = deque([s])
        while queue:
            i = queue.popleft()
            for j in atlas.moves[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        if len(seen) != S:
            return False
    return True


def period(adjacency: list[set[int]]) -> int:
    """Period (gcd of cycle lengths) of a strongly connected directed graph."""
    level = {0: 0}
    queue = deque([0])
    g = 0
    while queue:
        i = queue.popleft()
        for j in adjacency[i]:
            if j not in level:
                level[j] = level[i] + 1
                queue.append(j)
            else:
                g = math.gcd(g, level[i] + 1 - level[j])
    return abs(g) if g else 0


def chain_graph(atlas: StateSpaceAtlas) -> list[set[int]]:
    """State graph of swaps: changing moves plus self-loops from non-changing swaps."""
    return [set(mv) | ({i} if atlas.holds[i] else set()) for i, mv in enumerate(atlas.moves)]


def stationary_weights(atlas: StateSpaceAtlas, target: SelfLoopTarget = UNIFORM) -> np.ndarray:
    w = np.array([target.weight(atlas.graph(i)) for i in range(len(atlas))], dtype=float)
    return w / w.sum()


def _as_float(M) -> np.ndarray:
    return np.asarray(M, dtype=np.float64)


def detailed_balance_residual(M, pi) -> float:
    F = _as_float(M)
    flow = pi[:, None] * F
    return float(np.abs(flow - flow.T).max())


def stationarity_residual(M, pi) -> float:
    return float(np.abs(pi @ _as_float(M) - pi).max())


def slem(M, pi, lazy: bool = True) -> float:
    """Second-largest eigenvalue modulus of a reversible transition matrix."""
    F = _as_float(M)
    if lazy:
        F = 0.5 * (np.eye(F.shape[0]) + F)
    d = np.sqrt(pi)
    sym = d[:, None] * F / d[None, :]
    sym = 0.5 * (sym + sym.T)
    ev = np.sort(np.abs(np.linalg.eigvalsh(sym)))[::-1]
    return float(ev[1]) if len(ev) > 1 else 0.0


def verify_chain(atlas: StateSpaceAtlas, mats: TransitionMatrices | None = None,
                    target: SelfLoopTarget = UNIFORM, tol: float = 1e-12) -> dict:
    """Numerical check of irreducibility, aperiodicity, stationarity and the
    P / P_B relation on an enumerated atlas."""
    mats = mats or exact_transition_matrices(atlas, target=target)
    g0 = atlas.graph(0)
    cond1, cond2 = aperiodicity_conditions(g0)
    pi = stationary_weights(atlas, target)
    per = period(chain_graph(atlas)) if len(atlas) > 1 or atlas.holds[0] else 0
    report = {
        "states": len(atlas),
        "edges": g0.m,
        "theta": float(mats.theta),
        "exact_arithmetic": mats.exact,
        "irreducible": strongly_connected(atlas),
        "aperiodicity_condition_1": cond1,
        "aperiodicity_condition_2": cond2,
        "period": per,
        "aperiodic": per == 1,
        "scaling_residual": float(scaling_residual(mats)),
        "detailed_balance_P": detailed_balance_residual(mats.P, pi),
        "detailed_balance_P_B": detailed_balance_residual(mats.P_B, pi),
        "stationarity_P": stationarity_residual(mats.P, pi),
        "stationarity_P_B": stationarity_residual(mats.P_B, pi),
        "slem_lazy_P": slem(mats.P, pi),
        "slem_lazy_P_B": slem(mats.P_B, pi),
    }
    checks = {
        "irreducible": report["irreducible"],
        "aperiodic_when_condition_holds": report["aperiodic"] or not (cond1 or cond2),
        "detailed_balance": max(report["detailed_balance_P"], report["detailed_balance_P_B"]) < tol,
        "rows_stochastic": bool(
            np.allclose(_as_float(mats.P).sum(1), 1, atol=tol, rtol=0)
            and np.allclose(_as_float(mats.P_B).sum(1), 1, atol=tol, rtol=0)
        ),
        "cdm_constant": all(
            np.array_equal(cdm(atlas.graph(i)), cdm(g0)) for i in range(len(atlas))
        ),
    }
    report["checks"] = checks
    report["ok"] = all(checks.values())
    return report


def _state_key(src: np.ndarray, dst: np.ndarray) -> State:
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    order = np.lexsort((hi, lo))
    return tuple(zip(lo[order].tolist(), hi[order].tolist()))


def empirical_histogram(atlas: StateSpaceAtlas, config: ChainConfig, steps: int, thin: int = 1,
                        rng: np.random.Generator | None = None, burn_in: int = 0,
                        lazy: bool = False) -> np.ndarray:
    """Visit frequencies of atlas states along one chain run.

    The state is recorded every ``thin`` steps after ``burn_in`` steps, for
    ``steps`` steps in total after burn-in.  With ``lazy`` each block of
    ``thin`` steps holds with probability 1/2 per step.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    chain = _ArrayChain(atlas.graph(atlas.seed_state), config)
    chain.advance(burn_in, rng)
    counts = np.zeros(len(atlas), dtype=np.int64)
    for _ in range(steps // thin):
        chain.advance(int(rng.binomial(thin, 0.5)) if lazy else thin, rng)
        counts[atlas.index[_state_key(chain.src, chain.dst)]] += 1
    return counts / counts.sum()


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def to_dot(atlas: StateSpaceAtlas) -> str:
    lines = ["digraph states {"]
    for i, s in enumerate(atlas.states):
        label = " ".join(f"{a}-{b}" for a, b in s)
        lines.append(f'  {i} [label="{label}"];')
    for i, mv in enumerate(atlas.moves):
        for j in sorted(mv):
            lines.append(f"  {i} -> {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def brute_force_states(colors, C: np.ndarray, m: int) -> set[State]:
    """Every edge multiset on ``len(colors)`` vertices with colored degrees ``C``.

    Direct constrained enumeration, independent of the swap machinery.
    """
    colors = np.asarray(colors)
    n = len(colors)
    pairs = [(a, b) for a in range(n) for b in range(a, n)]
    out: set[State] = set()
    need = C.astype(np.int64).copy()

    def rec(start, chosen):
        if len(chosen) == m:
            if not need.any():
                out.add(tuple(chosen))
            return
        for p in range(start, len(pairs)):
            a, b = pairs[p]
            ca, cb = colors[a], colors[b]
            if a == b:
                if need[ca, a] < 2:
                    continue
                need[ca, a] -= 2
            else:
                if need[cb, a] < 1 or need[ca, b] < 1:
                    continue
                need[cb, a] -= 1
                need[ca, b] -= 1
            chosen.append((a, b))
            rec(p, chosen)
            chosen.pop()
            if a == b:
                need[ca, a] += 2
            else:
                need[cb, a] += 1
                need[ca, b] += 1

    rec(0, [])
    return out

