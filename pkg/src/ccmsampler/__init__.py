"""Sampling vertex-colored multigraphs with a fixed colored degree matrix."""

__version__ = "0.1.0"

from .graph import ColoredMultigraph, cdm, jcm, load_graph, write_edges
from .samplers import (
    ChainConfig,
    ChainResult,
    SelfLoopTarget,
    UNIFORM,
    run_chain,
    run_cm,
    run_lazy,
    run_sirius,
    run_sirius_b,
    sample_ensemble,
)
from .diagnostics import degree_assortativity, m_statistics, theta, top_degree_mv
from .polarization import RwcConfig, rwc, significance_test

__all__ = [
    "ColoredMultigraph", "cdm", "jcm", "load_graph", "write_edges",
    "ChainConfig", "ChainResult", "SelfLoopTarget", "UNIFORM",
    "run_chain", "run_cm", "run_lazy", "run_sirius", "run_sirius_b", "sample_ensemble",
    "degree_assortativity", "m_statistics", "theta", "top_degree_mv",
    "RwcConfig", "rwc", "significance_test",
]
