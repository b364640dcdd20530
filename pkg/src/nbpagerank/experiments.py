"""Empirical studies: mu-sweeps, top-k overlap, equivalence gaps, Monte Carlo walks."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .generators import GenerationError, GeneratorSpec, generate
from .graph import Graph
from .lift import TAIL_DEGREE, build_lift, lift_distribution, project_to_nodes
from .solvers import PageRankConfig, biregular_closed_form, infinity_pagerank, mu_pagerank, standard_pagerank

log = logging.getLogger(__name__)

DEFAULT_GRID = np.linspace(0.0, 100.0, 20)
DEFAULT_PERCENTS = (1.0, 5.0, 10.0, 20.0)

CONSTANT = "constant"
INCREASING = "increasing"
DECREASING = "decreasing"
NON_MONOTONE = "non-monotone"


@dataclass
class SweepResult:
    mu_grid: np.ndarray
    values: np.ndarray
    verdicts: list[str]
    range_widths: np.ndarray
    failed: list[int] = field(default_factory=list)

    def range_shrinks(self, tol: float = 0.0) -> bool:
        """True when max - min never grows along the grid."""
        w = self.range_widths[np.isfinite(self.range_widths)]
        return bool(np.all(np.diff(w) <= tol))


def monotonicity_verdicts(values: np.ndarray, tol: float = 1e-9) -> list[str]:
    """Classify each column of ``values`` (rows ordered by mu).

    Steps within ``tol`` are compatible with either direction.
    """
    diffs = np.diff(values, axis=0)
    verdicts = []
    for col in diffs.T:
        col = col[np.isfinite(col)]
        if np.all(np.abs(col) <= tol):
            verdicts.append(CONSTANT)
        elif np.all(col >= -tol):
            verdicts.append(INCREASING)
        elif np.all(col <= tol):
            verdicts.append(DECREASING)
        else:
            verdicts.append(NON_MONOTONE)
    return verdicts


def mu_sweep(g: Graph, epsilon: float = 0.85, grid=None, tol_mono: float = 1e-9,
             cfg: PageRankConfig | None = None) -> SweepResult:
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if (grid < 0).any() or (np.diff(grid) <= 0).any():
        raise ValueError("mu grid must be non-negative and strictly increasing")
    base = replace(cfg or PageRankConfig(), epsilon=epsilon)
    lift = build_lift(g)
    values = np.full((len(grid), g.n), np.nan)
    failed = []
    for row, mu in enumerate(grid):
        try:
            node, _ = mu_pagerank(g, replace(base, mu=float(mu)), lift)
        except (ValueError, ArithmeticError) as exc:
            log.warning("sweep failed at mu=%g: %s", mu, exc)
            failed.append(row)
            continue
        if not node.converged:
            failed.append(row)
            continue
        values[row] = node.values
    ok = np.setdiff1d(np.arange(len(grid)), failed)
    verdicts = monotonicity_verdicts(values[ok], tol_mono)
    widths = values.max(axis=1) - values.min(axis=1)
    return SweepResult(grid, values, verdicts, widths, failed)


def top_k(values: np.ndarray, percent: float) -> np.ndarray:
    """Indices of the top ``ceil(percent * n / 100)`` entries; ties go to lower index."""
    if not 0 < percent <= 100:
        raise ValueError("percent must lie in (0, 100]")
    values = np.asarray(values)
    k = math.ceil(percent * len(values) / 100.0 - 1e-9)
    order = np.lexsort((np.arange(len(values)), -values))
    return order[:k]


def topk_overlap(a, b, percent: float) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("vectors differ in length")
    ta, tb = top_k(a, percent), top_k(b, percent)
    return len(np.intersect1d(ta, tb)) / len(ta)


@dataclass
class OverlapReport:
    spec: GeneratorSpec
    trials: int
    percents: tuple
    epsilon: float
    per_trial: list  # one overlap list per completed trial, aligned with percents
    skipped: list[tuple[int, str]] = field(default_factory=list)
    trial_ids: list[int] = field(default_factory=list)
    mean_degrees: list[float] = field(default_factory=list)

    @property
    def mean_overlap(self) -> np.ndarray:
        if not self.per_trial:
            return np.full(len(self.percents), np.nan)
        return np.mean(np.asarray(self.per_trial), axis=0)

    def mean_at(self, percent: float) -> float:
        return float(self.mean_overlap[list(self.percents).index(percent)])


def trial_seed(seed: int, index: int) -> int:
    """Deterministic per-trial seed derived from (seed, index)."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def _overlap_trial(spec: GeneratorSpec, index: int, percents, epsilon: float):
    g = generate(spec.with_seed(trial_seed(spec.seed, index))).without_isolated()
    std = standard_pagerank(g, PageRankConfig(epsilon=epsilon)).values
    inf = infinity_pagerank(g, epsilon).values
    return [topk_overlap(std, inf, p) for p in percents], float(g.degrees.mean())


def overlap_experiment(spec: GeneratorSpec, trials: int = 100, percents=DEFAULT_PERCENTS,
                       epsilon: float = 0.85, threads: int = 1) -> OverlapReport:
    """Top-x% overlap between standard and infinity-PageRank over random draws.

    Isolated nodes are dropped before ranking (PageRank is undefined there).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    percents = tuple(float(p) for p in percents)

    def run(i):
        try:
            return i, _overlap_trial(spec, i, percents, epsilon), None
        except (GenerationError, ValueError) as exc:
            return i, None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(i) for i in range(trials)]

    report = OverlapReport(spec, trials, percents, epsilon, [])
    for i, res, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            report.skipped.append((i, err))
            continue
        report.per_trial.append(res[0])
        report.mean_degrees.append(res[1])
        report.trial_ids.append(i)
    return report


def equivalence_gaps(g: Graph, mus, epsilon: float = 0.85) -> dict[float, float]:
    """l-infinity gap between mu-PageRank and standard PageRank for each mu."""
    lift = build_lift(g)
    ref = standard_pagerank(g, PageRankConfig(epsilon=epsilon)).values
    gaps = {}
    for mu in mus:
        node, _ = mu_pagerank(g, PageRankConfig(epsilon=epsilon, mu=float(mu)), lift)
        gaps[float(mu)] = float(np.abs(node.values - ref).max())
    return gaps


def biregular_gap(g: Graph, epsilon: float = 0.85) -> float:
    """Gap between standard PageRank and the biregular closed form (needs ``g.partition``)."""
    if g.partition is None:
        raise ValueError("graph carries no bipartition")
    first = g.partition == 0
    d1 = int(g.degrees[first][0])
    d2 = int(g.degrees[~first][0])
    closed = biregular_closed_form(int(first.sum()), int((~first).sum()), d1, d2, epsilon)
    expected = np.where(first, closed[0], closed[-1])
    return float(np.abs(standard_pagerank(g, PageRankConfig(epsilon=epsilon)).values - expected).max())


def degree_one_report(g: Graph, epsilon: float = 0.85) -> list[tuple[int, float, float]]:
    """(node, non-backtracking value, (1 - eps)/n) for each degree-one node.

    Diagnostic only; the underlying claim is unproven.
    """
    node, _ = mu_pagerank(g, PageRankConfig(epsilon=epsilon, mu=0.0))
    target = (1.0 - epsilon) / g.n
    return [(int(i), float(node.values[i]), target) for i in np.flatnonzero(g.degrees == 1)]


def monte_carlo_walk(g: Graph, epsilon: float, mu: float, steps: int, seed: int = 0,
                     v=None, mode: str = TAIL_DEGREE) -> np.ndarray:
    """Visit frequencies of the simulated mu-weighted edge walk, projected to nodes.

    The state is the current directed edge.  Each step teleports with
    probability 1 - eps (or when stuck on a dangling edge) to an edge drawn
    from the lifted teleportation distribution; otherwise it moves to an
    edge leaving the current head, backtracking with weight ``mu``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    lift = build_lift(g)
    u = lift_distribution(lift, PageRankConfig(epsilon=epsilon, v=v).teleport(g.n), mode)
    rng = np.random.default_rng(seed)
    deg = g.degrees.tolist()
    head = lift.head.tolist()
    out_ptr = lift.out_ptr.tolist()
    out_edges = lift.out_edges.tolist()
    # position of each edge within its tail's outgoing block
    slot = np.empty(lift.edge_count, dtype=np.int64)
    slot[lift.out_edges] = np.arange(lift.edge_count) - lift.out_ptr[lift.tail[lift.out_edges]]
    rev_slot = slot[lift.reverse].tolist()
    back_prob = [mu / (d - 1.0 + mu) if d - 1.0 + mu > 0 else 0.0 for d in lift.head_degree.tolist()]
    stuck = lift.dangling(mu).tolist()

    cdf = np.cumsum(u)
    cdf[-1] = 1.0
    counts = np.zeros(lift.edge_count, dtype=np.int64)
    batch = min(steps, 1 << 16)
    e = int(np.searchsorted(cdf, rng.random(), side="right"))
    done = 0
    while done < steps:
        size = min(batch, steps - done)
        jump = (rng.random(size) >= epsilon).tolist()
        r1 = rng.random(size).tolist()
        r2 = rng.random(size).tolist()
        teleport_to = np.searchsorted(cdf, rng.random(size), side="right").tolist()
        visited = []
        append = visited.append
        for t in range(size):
            if jump[t] or stuck[e]:
                e = teleport_to[t]
            else:
                x = head[e]
                d = deg[x]
                rs = rev_slot[e]
                if r1[t] < back_prob[e]:
                    e = out_edges[out_ptr[x] + rs]
                else:
                    j = int(r2[t] * (d - 1))
                    if j >= rs:
                        j += 1
                    e = out_edges[out_ptr[x] + j]
            append(e)
        counts += np.bincount(visited, minlength=lift.edge_count)
        done += size
    freq = project_to_nodes(lift, counts.astype(float))
    return freq / freq.sum()
