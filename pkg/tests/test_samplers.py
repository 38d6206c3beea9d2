import logging

import numpy as np
import pytest

from ccmsampler.diagnostics import m_statistics
from ccmsampler.graph import ColoredMultigraph, cdm, jcm
from ccmsampler.oracle import (
    _state_key, empirical_histogram, enumerate_states, exact_transition_matrices, stationary_weights,
    total_variation,
)
from ccmsampler.samplers import (
    ChainConfig, PeriodicChainError, SelfLoopTarget, _ArrayChain, aperiodicity_conditions, chain_seeds,
    default_iterations, run_chain, run_cm, run_lazy, run_sirius, run_sirius_b, sample_ensemble,
)

from conftest import assortative_graph, random_graph, tiny

MATCHING = ColoredMultigraph([0, 0, 1, 1], [(0, 2), (1, 3)])


@pytest.fixture
def medium():
    return random_graph(np.random.default_rng(12), 60, 300, 3)


def test_default_iterations():
    assert default_iterations(100) == 461
    assert default_iterations(1) == 0


def test_zero_steps_is_identity(medium):
    for algo in ("sirius", "sirius_b", "cm"):
        res = run_chain(medium, ChainConfig(algorithm=algo, iterations=0, seed=1))
        assert res.graph == medium
        assert res.steps == 0


def test_input_graph_not_modified(medium):
    before = medium.multiset()
    run_sirius(medium, ChainConfig(iterations=1000, seed=2))
    assert medium.multiset() == before


@pytest.mark.parametrize("runner", [run_sirius, run_sirius_b])
def test_cdm_preserved(medium, runner):
    res = runner(medium, ChainConfig(iterations=20000, seed=3))
    assert np.array_equal(cdm(res.graph), cdm(medium))
    assert np.array_equal(jcm(res.graph), jcm(medium))
    assert res.graph != medium
    res.graph.check_consistency()


def test_cm_preserves_degrees_only(medium):
    res = run_cm(medium, ChainConfig(iterations=20000, seed=4))
    assert np.array_equal(res.graph.degrees(), medium.degrees())
    assert not np.array_equal(cdm(res.graph), cdm(medium))


def test_tallies_sum_to_steps(medium):
    for algo in ("sirius", "sirius_b", "cm"):
        res = run_chain(medium, ChainConfig(algorithm=algo, iterations=5000, seed=5))
        assert res.steps == 5000
        assert res.tallies["lazy_hold"] == 0
        assert sum(res.fractions().values()) == pytest.approx(1.0)
    assert run_sirius(medium, ChainConfig(iterations=5000, seed=5)).tallies["out_of_space"] == 0


def test_until_valid_counts_in_space_proposals(medium):
    res = run_sirius_b(medium, ChainConfig(iterations=3000, seed=6, until_valid=True))
    assert res.steps - res.tallies["out_of_space"] == 3000
    assert res.tallies["out_of_space"] > 0


def test_deterministic(medium):
    cfg = ChainConfig(iterations=3000, seed=7)
    a, b = run_sirius(medium, cfg), run_sirius(medium, cfg)
    assert a.graph.multiset() == b.graph.multiset() and a.tallies == b.tallies
    c = run_sirius(medium, ChainConfig(iterations=3000, seed=8))
    assert c.graph.multiset() != a.graph.multiset()


def test_monochromatic_never_out_of_space():
    g = random_graph(np.random.default_rng(1), 30, 100, 1)
    res = run_sirius_b(g, ChainConfig(iterations=20000, seed=1))
    assert res.tallies["out_of_space"] == 0


def test_lazy_effective_steps_binomial():
    g = tiny("two_color_mixed")
    t, runs = 1000, 10000
    rng = np.random.default_rng(9)
    eff = np.array([2 * t - run_lazy(g, ChainConfig(iterations=t), rng).tallies["lazy_hold"]
                    for _ in range(runs)])
    assert abs(eff.mean() - t) < 3 * np.sqrt(2 * t * 0.25 / runs)
    assert eff.var() == pytest.approx(t / 2, rel=0.05)


def test_lazy_tallies_cover_2t():
    res = run_lazy(tiny("star_multi"), ChainConfig(iterations=500, seed=3))
    assert res.lazy and res.steps == 1000


# --------------------------------------------------------------- aperiodicity
def test_conditions():
    assert aperiodicity_conditions(MATCHING) == (False, False)
    assert aperiodicity_conditions(tiny("two_mono_classes"))[0]
    assert aperiodicity_conditions(tiny("star_multi"))[1]   # vertex 0 has two copies of blue neighbor 1


def test_strict_raises():
    with pytest.raises(PeriodicChainError, match="aperiodicity"):
        run_sirius(MATCHING, ChainConfig(iterations=10, strict=True))


def test_auto_lazy_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="ccmsampler"):
        res = run_sirius(MATCHING, ChainConfig(iterations=10, seed=1))
    assert res.lazy
    assert "lazy" in caplog.text


# -------------------------------------------------------------------- traces
def test_trace_points():
    g = random_graph(np.random.default_rng(2), 40, 150, 2)
    res = run_sirius(g, ChainConfig(iterations=1234, seed=1, trace_points=100))
    assert len(res.trace) == 100
    assert res.trace.iterations[-1] == 1234
    assert np.all(np.diff(res.trace.iterations) > 0)
    assert sum(res.trace.tallies[-1]) == 1234


def test_trace_stride():
    g = random_graph(np.random.default_rng(2), 40, 150, 2)
    res = run_sirius_b(g, ChainConfig(iterations=1050, seed=1, trace_stride=100))
    assert res.trace.iterations == list(range(100, 1001, 100)) + [1050]


def test_cm_drifts_m_statistic():
    g = assortative_graph(np.random.default_rng(5), 200, 1000, bias=4.0)
    M0 = m_statistics(g)[0]
    assert m_statistics(run_cm(g, ChainConfig(seed=1)).graph)[0] < M0 - 0.1
    assert m_statistics(run_sirius(g, ChainConfig(seed=1)).graph)[0] == M0


# ------------------------------------------------------------------- ensemble
def test_ensemble_seeding(medium):
    cfg = ChainConfig(iterations=2000, seed=42)
    ens = sample_ensemble(medium, cfg, 1)
    direct = run_chain(medium, cfg, np.random.default_rng(chain_seeds(42, 1)[0]))
    assert ens[0].graph.multiset() == direct.graph.multiset()


def test_ensemble_reproducible_and_parallel(medium):
    cfg = ChainConfig(iterations=2000, seed=43)
    a = sample_ensemble(medium, cfg, 6)
    b = sample_ensemble(medium, cfg, 6, parallelism=3)
    assert [r.graph.multiset() for r in a] == [r.graph.multiset() for r in b]
    assert len({r.graph.multiset() for r in a}) == 6


def test_ensemble_cdm_constant(medium):
    C = cdm(medium)
    for res in sample_ensemble(medium, ChainConfig(seed=44), 100):
        assert np.array_equal(cdm(res.graph), C)


def test_thinned_ensemble(medium):
    ens = sample_ensemble(medium, ChainConfig(iterations=500, seed=1, thinning=200, burn_in=1000), 5)
    assert len(ens) == 5 and all(r.steps == 200 for r in ens)
    assert len({r.graph.multiset() for r in ens}) == 5


# -------------------------------------------------------- exact distributions
@pytest.mark.parametrize("algo", ["sirius", "sirius_b"])
def test_one_step_matches_exact_row(algo):
    g = tiny("two_mono_classes")
    atlas = enumerate_states(g)
    mats = exact_transition_matrices(atlas, exact=False)
    row = (mats.P if algo == "sirius" else mats.P_B)[0]
    rng = np.random.default_rng(10)
    draws = 20000
    counts = np.zeros(len(atlas))
    cfg = ChainConfig(algorithm=algo)
    for _ in range(draws):
        chain = _ArrayChain(g, cfg)
        chain.advance(1, rng)
        counts[atlas.index[_state_key(chain.src, chain.dst)]] += 1
    sigma = np.sqrt(draws * row * (1 - row))
    assert np.all(np.abs(counts - draws * row) <= 4 * sigma + 1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("algo, steps, lazy", [("sirius", 10**6, False), ("sirius_b", 10**7, False),
                                              ("sirius", 10**6, True)])
def test_long_run_is_uniform(algo, steps, lazy):
    atlas = enumerate_states(tiny("two_color_mixed"))
    hist = empirical_histogram(atlas, ChainConfig(algorithm=algo, seed=3), steps,
                               thin=steps // 50000, lazy=lazy)
    assert total_variation(hist, stationary_weights(atlas)) < 0.05


def test_loop_weighted_target():
    atlas = enumerate_states(tiny("loops_two_colors"))
    target = SelfLoopTarget(2.0)
    hist = empirical_histogram(atlas, ChainConfig(seed=4, target=target), 3 * 10**5, thin=10)
    pi = stationary_weights(atlas, target)
    assert total_variation(pi, stationary_weights(atlas)) > 0.05
    assert total_variation(hist, pi) < 0.03


def test_pair_weighting_runs_and_preserves_cdm(medium):
    res = run_sirius(medium, ChainConfig(iterations=5000, seed=1, class_weighting="pair"))
    assert np.array_equal(cdm(res.graph), cdm(medium))


@pytest.mark.parametrize("kwargs", [dict(algorithm="x"), dict(laziness="full"), dict(iterations=-1),
                                    dict(trace_stride=0), dict(class_weighting="class")])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ChainConfig(**kwargs)
