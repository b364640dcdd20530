import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from nbpagerank.experiments import (
    CONSTANT,
    DECREASING,
    DEFAULT_GRID,
    DEFAULT_PERCENTS,
    INCREASING,
    NON_MONOTONE,
    biregular_gap,
    degree_one_report,
    equivalence_gaps,
    monotonicity_verdicts,
    monte_carlo_walk,
    mu_sweep,
    overlap_experiment,
    top_k,
    topk_overlap,
    trial_seed,
)
from nbpagerank.generators import GeneratorSpec, generate_connected
from nbpagerank.graph import build_graph
from nbpagerank.solvers import PageRankConfig, mu_pagerank

C4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)], 4)
# P3 plus extra edges: a fixed 5-node graph with a degree-one node
FIVE = build_graph([(0, 1), (1, 2), (2, 3), (3, 1), (3, 4), (2, 4)], 5)


def test_default_grid():
    assert len(DEFAULT_GRID) == 20
    assert DEFAULT_GRID[0] == 0.0 and DEFAULT_GRID[-1] == 100.0
    assert np.allclose(np.diff(DEFAULT_GRID), 100 / 19)


def test_regular_sweep_constant():
    g = generate_connected(GeneratorSpec("regular", {"n": 12, "k": 3}, seed=1))
    result = mu_sweep(g, 0.85)
    assert np.allclose(result.values, 1 / 12)
    assert set(result.verdicts) == {CONSTANT}
    assert np.allclose(result.range_widths, 0.0, atol=1e-12)


def test_fixed_graph_matches_finer_oracle():
    grid = np.linspace(0.0, 100.0, 20)
    result = mu_sweep(FIVE, 0.85, grid)
    assert np.allclose(result.values, [oracles.dense_mu_pagerank(FIVE, mu) for mu in grid], atol=1e-10)
    fine = np.array([oracles.dense_mu_pagerank(FIVE, mu) for mu in np.linspace(0.0, 100.0, 200)])
    assert result.verdicts == oracles.verdicts(fine, 1e-9)


def test_sweep_rejects_bad_grid():
    with pytest.raises(ValueError):
        mu_sweep(C4, 0.85, [0.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        mu_sweep(C4, 0.85, [-1.0, 2.0])


@pytest.mark.filterwarnings("ignore::nbpagerank.solvers.ConvergenceWarning")
def test_sweep_marks_failures():
    result = mu_sweep(FIVE, 0.85, [0.0, 1.0, 2.0], cfg=PageRankConfig(max_iter=2))
    assert result.failed == [0, 1, 2]
    assert np.isnan(result.values).all()


def test_verdict_classification():
    values = np.array([[0.0, 3.0, 1.0, 1.0],
                       [1.0, 2.0, 2.0, 1.0],
                       [2.0, 1.0, 1.0, 1.0 + 1e-12]])
    assert monotonicity_verdicts(values, 1e-9) == [INCREASING, DECREASING, NON_MONOTONE, CONSTANT]


def test_range_shrinks():
    result = mu_sweep(FIVE, 0.85)
    assert isinstance(result.range_shrinks(), bool)
    assert (result.range_widths >= 0).all()


def test_topk_examples():
    a = np.arange(10.0)
    assert topk_overlap(a, a, 20) == 1.0
    assert topk_overlap(a, a[::-1], 50) == 0.0
    assert len(top_k(np.arange(10.0), 25)) == 3


def test_topk_ties_go_to_lower_index():
    assert top_k(np.ones(10), 30).tolist() == [0, 1, 2]


@given(st.lists(st.floats(0, 1), min_size=1, max_size=60), st.lists(st.floats(0, 1), min_size=60, max_size=60),
       st.sampled_from(DEFAULT_PERCENTS))
@settings(max_examples=60, deadline=None)
def test_overlap_bounds(a, b, pct):
    a = np.array(a)
    b = np.array(b[: len(a)])
    ov = topk_overlap(a, b, pct)
    assert 0.0 <= ov <= 1.0
    assert topk_overlap(a, a, pct) == 1.0


def test_topk_validation():
    with pytest.raises(ValueError):
        top_k(np.ones(3), 0)
    with pytest.raises(ValueError):
        topk_overlap(np.ones(3), np.ones(4), 10)


def test_regular_overlap_is_one():
    report = overlap_experiment(GeneratorSpec("regular", {"n": 40, "k": 4}), trials=4)
    assert report.percents == DEFAULT_PERCENTS
    assert np.allclose(report.mean_overlap, 1.0)


def test_overlap_threading_is_deterministic():
    spec = GeneratorSpec("gnp", {"n": 150, "p": 0.04}, seed=9)
    serial = overlap_experiment(spec, trials=6)
    threaded = overlap_experiment(spec, trials=6, threads=3)
    assert serial.per_trial == threaded.per_trial
    assert serial.trial_ids == list(range(6))


def test_overlap_records_skipped_trials():
    report = overlap_experiment(GeneratorSpec("gnp", {"n": 20, "p": 0.0}), trials=3)
    assert len(report.skipped) == 3
    assert np.isnan(report.mean_overlap).all()


def test_trial_seed_distinct():
    assert len({trial_seed(0, i) for i in range(100)}) == 100
    assert trial_seed(1, 0) != trial_seed(0, 1)


def test_equivalence_gaps_regular():
    g = generate_connected(GeneratorSpec("regular", {"n": 20, "k": 3}, seed=0))
    gaps = equivalence_gaps(g, [0, 1, 10])
    assert max(gaps.values()) <= 1e-10


def test_biregular_gap():
    g = generate_connected(GeneratorSpec("biregular", {"n1": 6, "n2": 9, "d1": 3, "d2": 2}, seed=0))
    assert biregular_gap(g) <= 1e-10


def test_degree_one_report():
    rows = degree_one_report(FIVE)
    assert [r[0] for r in rows] == [0]
    assert rows[0][2] == pytest.approx(0.15 / 5)


def test_walk_cycle():
    freq = monte_carlo_walk(C4, 0.85, 1.0, 1_000_000, seed=0)
    assert np.allclose(freq, 0.25, atol=0.005)


def test_walk_reproducible():
    a = monte_carlo_walk(FIVE, 0.85, 0.0, 10_000, seed=3)
    b = monte_carlo_walk(FIVE, 0.85, 0.0, 10_000, seed=3)
    assert np.array_equal(a, b)
    assert a.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("mu", [0.0, 0.5, 4.0])
def test_walk_matches_solver(mu):
    node, _ = mu_pagerank(FIVE, PageRankConfig(mu=mu))
    freq = monte_carlo_walk(FIVE, 0.85, mu, 1_000_000, seed=11)
    assert np.abs(freq - node.values).max() <= 0.01


def test_walk_validation():
    with pytest.raises(ValueError):
        monte_carlo_walk(C4, 0.85, 1.0, 0)
