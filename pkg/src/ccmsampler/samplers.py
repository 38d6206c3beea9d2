"""Markov chains over colored multigraphs.

Three chains share one step structure:

* ``sirius``: the partner edge is drawn from the color class of the first
  one, so every proposal keeps the colored degree matrix.
* ``sirius_b``: a uniform pair of distinct occurrences plus an orientation
  coin; proposals that would change the colored degrees are counted as out of
  space and the chain stays put.
* ``cm``: the same proposal with no color check, i.e. the plain
  configuration-model chain preserving only the degree sequence.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _kernels as K
from .graph import ColoredMultigraph, from_arrays, to_arrays

log = logging.getLogger(__name__)

ALGORITHMS = ("sirius", "sirius_b", "cm")
OUTCOMES = ("out_of_space", "non_changing", "accepted", "rejected", "lazy_hold")


class PeriodicChainError(RuntimeError):
    """The chain may be periodic and laziness was not allowed."""


@dataclass(frozen=True)
class SelfLoopTarget:
    """Target weight ``base ** (number of self-loops)``; ``base=1`` is uniform."""

    base: float = 1.0

    def __post_init__(self):
        if not self.base > 0:
            raise ValueError("target base must be positive")

    @property
    def log_base(self) -> float:
        return math.log(self.base)

    def weight(self, g: ColoredMultigraph) -> float:
        return self.base ** g.self_loops()


UNIFORM = SelfLoopTarget(1.0)


def default_iterations(m: int) -> int:
    """``ceil(m ln m)``, zero for graphs with fewer than two edges."""
    return int(math.ceil(m * math.log(m))) if m >= 2 else 0


@dataclass
class ChainConfig:
    algorithm: str = "sirius"
    iterations: int | None = None
    laziness: str = "none"
    seed: int | None = None
    target: SelfLoopTarget = UNIFORM
    trace_stride: int | None = None
    trace_points: int | None = None
    strict: bool = False
    until_valid: bool = False
    class_weighting: str = "edge"
    burn_in: int | None = None
    thinning: int | None = None

    def __post_init__(self):
        self.algorithm = self.algorithm.replace("-", "_")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.laziness not in ("none", "half"):
            raise ValueError("laziness must be 'none' or 'half'")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.trace_stride is not None and self.trace_stride < 1:
            raise ValueError("trace_stride must be at least 1")
        if self.trace_points is not None and self.trace_points < 1:
            raise ValueError("trace_points must be at least 1")
        if self.class_weighting not in ("edge", "pair"):
            raise ValueError("class_weighting must be 'edge' or 'pair'")

    def resolved_iterations(self, m: int) -> int:
        return default_iterations(m) if self.iterations is None else self.iterations


@dataclass
class ChainTrace:
    """Snapshots of (iteration, degree assortativity, cumulative tallies)."""

    iterations: list[int] = field(default_factory=list)
    assortativity: list[float] = field(default_factory=list)
    tallies: list[tuple[int, ...]] = field(default_factory=list)

    def append(self, it: int, r: float, tallies) -> None:
        if self.iterations and it <= self.iterations[-1]:
            raise ValueError("trace iterations must increase")
        self.iterations.append(int(it))
        self.assortativity.append(float(r))
        self.tallies.append(tuple(int(t) for t in tallies))

    def __len__(self) -> int:
        return len(self.iterations)

    def to_csv(self, dest) -> None:
        rows = ["iteration,assortativity," + ",".join(OUTCOMES) + "\n"]
        for it, r, t in zip(self.iterations, self.assortativity, self.tallies):
            rows.append(f"{it},{r!r}," + ",".join(map(str, t)) + "\n")
        if hasattr(dest, "writelines"):
            dest.writelines(rows)
        else:
            with open(dest, "w", encoding="utf-8") as fh:
                fh.writelines(rows)


@dataclass
class ChainResult:
    graph: ColoredMultigraph
    tallies: dict[str, int]
    trace: ChainTrace | None
    iterations: int
    lazy: bool

    @property
    def steps(self) -> int:
        return sum(self.tallies.values())

    def fractions(self) -> dict[str, float]:
        total = self.steps
        return {k: (v / total if total else 0.0) for k, v in self.tallies.items()}


# ------------------------------------------------------------------ aperiodicity
def aperiodicity_conditions(g: ColoredMultigraph) -> tuple[bool, bool]:
    """The two sufficient aperiodicity conditions.

    1. some color has at least two monochromatic edges;
    2. some vertex has at least two neighbors of one color other than its own.
    """
    cond1 = any(a == b and size >= 2 for (a, b), size in g.class_sizes().items())
    C = g._cdeg.copy()
    if C.size:
        C[g.color, np.arange(g.n)] = 0
    cond2 = bool(C.size and C.max() >= 2)
    return cond1, cond2


def _needs_lazy(g: ColoredMultigraph, config: ChainConfig) -> bool:
    if config.laziness == "half":
        return True
    if config.algorithm == "cm":
        return False
    if any(aperiodicity_conditions(g)):
        return False
    if config.strict:
        raise PeriodicChainError(
            "neither aperiodicity condition holds (no color with two monochromatic "
            "edges, no vertex with two neighbors of a foreign color); rerun with "
            "laziness='half' or without strict mode"
        )
    log.warning("aperiodicity conditions fail; running the lazy chain")
    return True


# ------------------------------------------------------------------------ engine
class _ArrayChain:
    """Mutable array state driving one compiled chain."""

    def __init__(self, g: ColoredMultigraph, config: ChainConfig):
        self.template = g
        self.config = config
        arr = to_arrays(g)
        self.src = arr.src.copy()
        self.dst = arr.dst.copy()
        self.cstart = arr.class_start
        self.csize = arr.class_size
        self.color = arr.color
        self.n_active = arr.n_active
        self.n = max(g.n, 1)
        self.keys, self.vals, self.mask, self.shift = K.build_table(self.src, self.dst, self.n)
        self.deg = g.degrees()
        self.tallies = np.zeros(K.N_OUTCOMES, dtype=np.int64)
        self.cum_weights = np.zeros(0, dtype=np.float64)
        if config.algorithm == "sirius" and config.class_weighting == "pair" and self.n_active:
            self.cum_weights = _pair_weights(self.cstart, self.csize, self.src, self.dst, self.color,
                                             self.n_active)

    def advance(self, steps: int, rng: np.random.Generator) -> None:
        if steps <= 0:
            return
        cfg = self.config
        lw = cfg.target.log_base
        if cfg.algorithm == "sirius":
            K.run_sirius(self.src, self.dst, self.cstart, self.csize, self.color,
                         self.keys, self.vals, self.n, self.mask, self.shift,
                         self.n_active, steps, lw, self.cum_weights, rng, self.tallies)
        else:
            K.run_des(self.src, self.dst, self.color, self.keys, self.vals, self.n,
                      self.mask, self.shift, steps, cfg.algorithm == "sirius_b",
                      cfg.until_valid and cfg.algorithm == "sirius_b", lw, rng, self.tallies)

    def assortativity(self) -> float:
        return float(K.endpoint_degree_assortativity(self.src, self.dst, self.deg))

    def graph(self) -> ColoredMultigraph:
        return from_arrays(self.template, self.src, self.dst)


def _pair_weights(cstart, csize, src, dst, color, n_active):
    """Per-slot first-draw weights making class choice proportional to
    ``|C| (|C| - 1)``, halved for bichromatic classes."""
    sizes = csize[:n_active].astype(np.float64)
    mono = color[src[:n_active]] == color[dst[:n_active]]
    w = (sizes - 1.0) * np.where(mono, 1.0, 0.5)
    return np.cumsum(w)


def run_chain(g: ColoredMultigraph, config: ChainConfig | None = None,
              rng: np.random.Generator | None = None) -> ChainResult:
    """Run the configured chain from ``g`` and return the final graph.

    ``g`` itself is not modified.  When laziness applies, the number of
    effective steps is drawn from Binomial(2t, 1/2) and the remaining steps
    of the 2t-step lazy chain are tallied as holds.
    """
    config = config or ChainConfig()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    t = config.resolved_iterations(g.m)
    lazy = _needs_lazy(g, config)
    steps = int(rng.binomial(2 * t, 0.5)) if lazy and t > 0 else t

    chain = _ArrayChain(g, config)
    trace = None
    checkpoints = _checkpoints(steps, config)
    if checkpoints is not None:
        trace = ChainTrace()
        done = 0
        for cp in checkpoints:
            chain.advance(cp - done, rng)
            done = cp
            trace.append(done, chain.assortativity(), chain.tallies)
    else:
        chain.advance(steps, rng)
    if lazy:
        chain.tallies[K.LAZY_HOLD] += 2 * t - steps
    tallies = dict(zip(OUTCOMES, (int(x) for x in chain.tallies)))
    return ChainResult(chain.graph(), tallies, trace, t, lazy)


def _checkpoints(steps: int, config: ChainConfig) -> list[int] | None:
    if config.trace_stride is not None:
        pts = list(range(config.trace_stride, steps + 1, config.trace_stride))
        if not pts or pts[-1] != steps:
            pts.append(steps)
    elif config.trace_points is not None:
        k = config.trace_points
        pts = sorted({-(-i * steps // k) for i in range(1, k + 1)})
    else:
        return None
    return [p for p in pts if p > 0]


def run_sirius(g, config=None, rng=None) -> ChainResult:
    return run_chain(g, replace(config or ChainConfig(), algorithm="sirius"), rng)


def run_sirius_b(g, config=None, rng=None) -> ChainResult:
    return run_chain(g, replace(config or ChainConfig(), algorithm="sirius_b"), rng)


def run_cm(g, config=None, rng=None) -> ChainResult:
    return run_chain(g, replace(config or ChainConfig(), algorithm="cm"), rng)


def run_lazy(g, config=None, rng=None) -> ChainResult:
    """Lazy version of the configured chain (holds with probability 1/2)."""
    return run_chain(g, replace(config or ChainConfig(), laziness="half"), rng)


# ---------------------------------------------------------------------- ensemble
def chain_seeds(seed: int | None, z: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(z)


def sample_ensemble(g: ColoredMultigraph, config: ChainConfig | None = None, z: int = 100,
                    parallelism: int = 1,
                    progress: Callable[[int], None] | None = None) -> list[ChainResult]:
    """Draw ``z`` graphs.

    By default each sample comes from its own chain of ``t`` steps, seeded
    from ``SeedSequence(seed).spawn(z)``.  If ``config.thinning`` is set, a
    single chain is burned in for ``burn_in`` (default ``t``) steps and a
    sample is kept every ``thinning`` steps.  Results are ordered by sample
    index.
    """
    config = config or ChainConfig()
    if z < 1:
        raise ValueError("z must be at least 1")
    if config.thinning is not None:
        return _thinned(g, config, z)
    seeds = chain_seeds(config.seed, z)

    def one(i):
        res = run_chain(g, config, np.random.default_rng(seeds[i]))
        if progress is not None:
            progress(i)
        return res

    if parallelism <= 1:
        return [one(i) for i in range(z)]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, range(z)))


def _thinned(g, config, z):
    rng = np.random.default_rng(chain_seeds(config.seed, 1)[0])
    t = config.resolved_iterations(g.m)
    burn = t if config.burn_in is None else config.burn_in
    first = run_chain(g, replace(config, iterations=burn, trace_stride=None), rng)
    out, cur = [], first.graph
    for _ in range(z):
        res = run_chain(cur, replace(config, iterations=config.thinning, trace_stride=None), rng)
        out.append(res)
        cur = res.graph
    return out
