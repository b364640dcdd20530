"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that appears in the pytest terminal
summary, then asserts.  Runtime limits are asserted alongside accuracy.
"""

import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from nbpagerank.clustering import best_match_accuracy, cluster, nmi, sbm_accuracy, accuracy_curve
from nbpagerank.experiments import mu_sweep, overlap_experiment
from nbpagerank.formats import read_graph
from nbpagerank.generators import GeneratorSpec, generate_connected
from nbpagerank.lift import apply_transition, build_lift, lift_distribution
from nbpagerank.experiments import monte_carlo_walk
from nbpagerank.solvers import (
    PageRankConfig,
    biregular_closed_form,
    infinity_pagerank,
    mu_pagerank,
    standard_pagerank,
)

MUS = (0.0, 0.3, 2.0, 10.0)
SEPARATIONS = [round(0.1 * i, 1) for i in range(1, 10)]


def small_graphs(count, n_max, seed):
    rng = np.random.default_rng(seed)
    return [oracles.random_connected(rng, n_max) for _ in range(count)]


def test_c01_lift_algebra(record):
    start = time.perf_counter()
    failures = 0
    for g in small_graphs(50, 8, seed=101):
        ops = oracles.dense_operators(g)
        S, T, tau, C, B = ops["S"], ops["T"], ops["tau"], ops["C"], ops["B"]
        lift = build_lift(g)
        checks = [
            np.array_equal(T @ S, ops["A"]),
            np.array_equal(T @ T.T, ops["D"]),
            np.array_equal(T @ tau, S.T),
            np.array_equal(tau @ tau, np.eye(len(tau), dtype=np.int64)),
            np.array_equal(B, C - tau),
            np.array_equal(np.diag(ops["Dhat"]), g.degrees[lift.head]),
            # the lift's index arrays describe the same operators
            np.array_equal(np.argmax(S, axis=1), lift.head),
            np.array_equal(np.argmax(T, axis=0), lift.tail),
            np.array_equal(np.argmax(tau, axis=1), lift.reverse),
        ]
        failures += not all(checks)
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 5
    record(1, f"lift identities exact on 50 graphs ({failures} failures, {elapsed:.2f}s)", ok)
    assert failures == 0
    assert elapsed < 5


def test_c02_column_stochastic(record):
    start = time.perf_counter()
    worst_sum = worst_entry = 0.0
    for g in small_graphs(50, 8, seed=101):
        lift = build_lift(g)
        u = lift_distribution(lift, np.full(g.n, 1.0 / g.n))
        eye = np.eye(lift.edge_count)
        for mu in (0.0, 0.5, 1.0, 3.0):
            W = np.column_stack([apply_transition(lift, mu, eye[:, e]) for e in range(lift.edge_count)])
            worst_entry = max(worst_entry, np.abs(W - oracles.dense_transition(g, mu)).max())
            dead = lift.dangling(mu)
            W[:, dead] = u[:, None]
            worst_sum = max(worst_sum, np.abs(W.sum(axis=0) - 1.0).max())
    elapsed = time.perf_counter() - start
    ok = worst_sum <= 1e-12 and worst_entry <= 1e-12 and elapsed < 5
    record(2, f"max |column sum - 1| = {worst_sum:.1e}, max entry gap vs dense = {worst_entry:.1e} "
              f"({elapsed:.2f}s)", ok)
    assert worst_sum <= 1e-12
    assert worst_entry <= 1e-12
    assert elapsed < 5


def test_c03_mu_one_reduction(record):
    start = time.perf_counter()
    worst = 0.0
    for g in small_graphs(100, 100, seed=303):
        cfg = PageRankConfig(epsilon=0.85, mu=1.0)
        node, _ = mu_pagerank(g, cfg)
        worst = max(worst, np.abs(node.values - standard_pagerank(g, cfg).values).max())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 30
    record(3, f"max |mu=1 - standard| = {worst:.1e} on 100 graphs ({elapsed:.2f}s)", ok)
    assert worst <= 1e-10
    assert elapsed < 30


def test_c04_regular_equivalence(record):
    start = time.perf_counter()
    rng = np.random.default_rng(404)
    worst = 0.0
    for i in range(20):
        k = (3, 4)[i % 2]
        n = int(rng.integers(k + 2, 26)) * 2
        g = generate_connected(GeneratorSpec("regular", {"n": n, "k": k}, seed=i))
        assert (g.degrees == k).all()
        base = standard_pagerank(g).values
        for mu in MUS:
            node, _ = mu_pagerank(g, PageRankConfig(mu=mu))
            worst = max(worst, np.abs(node.values - base).max())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 30
    record(4, f"regular graphs: max |pi_mu - pi_1| = {worst:.1e} ({elapsed:.2f}s)", ok)
    assert worst <= 1e-10
    assert elapsed < 30


def biregular_params(rng):
    while True:
        d1, d2 = (int(x) for x in rng.integers(2, 6, size=2))
        g = math.gcd(d1, d2)
        unit1, unit2 = d2 // g, d1 // g
        scale = int(rng.integers(1, 8))
        n1, n2 = unit1 * scale, unit2 * scale
        if n1 + n2 <= 60 and d1 <= n2 and d2 <= n1:
            return n1, n2, d1, d2


def test_c05_biregular_equivalence(record):
    start = time.perf_counter()
    rng = np.random.default_rng(505)
    worst_mu = worst_closed = 0.0
    for i in range(20):
        n1, n2, d1, d2 = biregular_params(rng)
        g = generate_connected(GeneratorSpec("biregular", {"n1": n1, "n2": n2, "d1": d1, "d2": d2}, seed=i))
        closed = biregular_closed_form(n1, n2, d1, d2, 0.85)
        expected = np.where(g.partition == 0, closed[0], closed[-1])
        base = standard_pagerank(g).values
        worst_closed = max(worst_closed, np.abs(base - expected).max())
        for mu in MUS:
            node, _ = mu_pagerank(g, PageRankConfig(mu=mu))
            worst_mu = max(worst_mu, np.abs(node.values - base).max())
            worst_closed = max(worst_closed, np.abs(node.values - expected).max())
    k23 = biregular_closed_form(2, 3, 3, 2, 0.85)
    k23_ok = abs(k23[0] - 0.245946) <= 1e-6 and abs(k23[-1] - 0.169369) <= 1e-6
    elapsed = time.perf_counter() - start
    ok = worst_mu <= 1e-10 and worst_closed <= 1e-10 and k23_ok and elapsed < 30
    record(5, f"biregular: gap {worst_mu:.1e}, closed-form gap {worst_closed:.1e}, "
              f"K23 = ({k23[0]:.6f}, {k23[-1]:.6f}) ({elapsed:.2f}s)", ok)
    assert worst_mu <= 1e-10
    assert worst_closed <= 1e-10
    assert k23_ok
    assert elapsed < 30


def test_c06_infinity_limit(record):
    start = time.perf_counter()
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(20):
        g = oracles.random_connected(rng, 100, min_n=5, p=rng.uniform(0.1, 0.5), min_degree=2)
        node, _ = mu_pagerank(g, PageRankConfig(mu=1e6))
        worst = max(worst, np.abs(node.values - infinity_pagerank(g, 0.85).values).max())
    from nbpagerank.graph import build_graph

    p3 = build_graph([(0, 1), (1, 2)], 3)
    pers = infinity_pagerank(p3, 0.85, np.array([1.0, 0.0, 0.0])).values
    p3_ok = np.allclose(pers, [0.540540, 0.459459, 0.0], atol=1e-6)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and p3_ok and elapsed < 30
    record(6, f"max |pi_1e6 - pi_inf| = {worst:.1e}; P3 personalized = {np.round(pers, 6).tolist()} "
              f"({elapsed:.2f}s)", ok)
    assert worst <= 1e-4
    assert p3_ok
    assert elapsed < 30


def test_c07_solver_cross_check(record):
    start = time.perf_counter()
    tol = 1e-12
    worst_series = 0.0
    mus = (0.0, 0.5, 1.0, 3.0)
    for i, g in enumerate(small_graphs(100, 30, seed=707)):
        mu = mus[i % len(mus)]
        a, _ = mu_pagerank(g, PageRankConfig(mu=mu, method="power", tol=tol))
        b, _ = mu_pagerank(g, PageRankConfig(mu=mu, method="linear-series", tol=tol))
        worst_series = max(worst_series, np.abs(a.values - b.values).sum())
    worst_mc = 0.0
    for i, g in enumerate(small_graphs(10, 6, seed=708)):
        mu = mus[i % len(mus)]
        node, _ = mu_pagerank(g, PageRankConfig(mu=mu))
        freq = monte_carlo_walk(g, 0.85, mu, 1_000_000, seed=i)
        worst_mc = max(worst_mc, np.abs(freq - node.values).max())
    elapsed = time.perf_counter() - start
    ok = worst_series <= 10 * tol and worst_mc <= 0.01 and elapsed < 120
    record(7, f"power vs series l1 gap {worst_series:.1e} (limit {10 * tol:.0e}); "
              f"Monte Carlo l_inf gap {worst_mc:.4f} ({elapsed:.1f}s)", ok)
    assert worst_series <= 10 * tol
    assert worst_mc <= 0.01
    assert elapsed < 120


def test_c08_sbm_clustering(record):
    start = time.perf_counter()
    acc = [sbm_accuracy(0.8, i, restarts=10, seed=808)[0] for i in range(20)]
    median = float(np.median(acc))
    elapsed = time.perf_counter() - start
    ok = median >= 0.90 and elapsed < 120
    record(8, f"SBM separation 0.8: median accuracy {median:.4f} over 20 instances "
              f"(min {min(acc):.4f}) ({elapsed:.1f}s)", ok)
    assert median >= 0.90
    assert elapsed < 120


def test_c09_accuracy_curve(record):
    start = time.perf_counter()
    curve = accuracy_curve(SEPARATIONS, instances=50, restarts=10, seed=909)
    mean = curve.mean_accuracy
    drops = -np.diff(mean)
    inversions = drops[drops > 0]
    monotone = len(inversions) == 0 or (len(inversions) == 1 and inversions[0] <= 0.03)
    elapsed = time.perf_counter() - start
    ok = monotone and elapsed < 600
    record(9, f"mean accuracy {np.round(mean, 3).tolist()} ({len(inversions)} inversions) "
              f"({elapsed:.1f}s)", ok)
    assert monotone
    assert elapsed < 600


def football_path():
    candidates = [os.environ.get("NBPAGERANK_FOOTBALL", ""),
                  Path(__file__).parent / "data" / "football.gml",
                  Path.home() / "data" / "football.gml"]
    for c in candidates:
        if c and Path(c).is_file():
            return Path(c)
    return None


def test_c10_football(record):
    path = football_path()
    if path is None:
        record(10, "football GML not found (set NBPAGERANK_FOOTBALL); skipped", None)
        pytest.skip("football GML not available; set NBPAGERANK_FOOTBALL=/path/to/football.gml")
    start = time.perf_counter()
    g, attrs = read_graph(path)
    truth = np.array([a["value"] for a in attrs])
    model = cluster(g, 12, 0.85, seed=0, restarts=10)
    score = nmi(model.labels, truth)
    elapsed = time.perf_counter() - start
    ok = g.n == 114 and len(set(truth)) == 12 and score >= 0.75 and elapsed < 60
    record(10, f"football: n={g.n}, classes={len(set(truth))}, NMI {score:.4f}, "
               f"accuracy {best_match_accuracy(model.labels, truth):.4f} ({elapsed:.1f}s)", ok)
    assert g.n == 114 and len(set(truth)) == 12
    assert score >= 0.75
    assert elapsed < 60


def test_c11_overlap_pareto_vs_gnp(record):
    start = time.perf_counter()
    n = 1000
    pareto = overlap_experiment(GeneratorSpec("pareto-cl", {"n": n, "gamma": 2.5, "w_min": 3.0}, seed=11),
                                trials=50, percents=(10.0,), threads=4)
    mean_degree = float(np.mean(pareto.mean_degrees))
    gnp = overlap_experiment(GeneratorSpec("gnp", {"n": n, "p": mean_degree / (n - 1)}, seed=12),
                             trials=50, percents=(10.0,), threads=4)
    a, b = pareto.mean_at(10.0), gnp.mean_at(10.0)
    elapsed = time.perf_counter() - start
    ok = a > b and elapsed < 300
    record(11, f"top-10% overlap pareto-cl {a:.4f} vs gnp {b:.4f} at mean degree {mean_degree:.2f} "
               f"({elapsed:.1f}s)", ok)
    assert a > b
    assert elapsed < 300


def test_c12_monotonicity_diagnostic(record):
    start = time.perf_counter()
    tol = 1e-9
    fine = np.linspace(0.0, 100.0, 200)
    mismatches = 0
    nodes = 0
    for i in range(10):
        g = generate_connected(GeneratorSpec("sbm", {"sizes": [6, 6], "p_in": 0.6, "p_out": 0.15}, seed=i))
        result = mu_sweep(g, 0.85, np.linspace(0.0, 100.0, 20), tol)
        assert len(result.mu_grid) == 20 and not result.failed
        reference = np.array([oracles.dense_mu_pagerank(g, mu) for mu in fine])
        expected = oracles.verdicts(reference, tol)
        mismatches += sum(a != b for a, b in zip(result.verdicts, expected))
        nodes += g.n
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 300
    record(12, f"20-point verdicts agree with 200-point oracle on {nodes - mismatches}/{nodes} nodes "
               f"({elapsed:.1f}s)", ok)
    assert mismatches == 0
    assert elapsed < 300
