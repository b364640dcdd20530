"""Clustering on personalized infinity-PageRank vectors, plus scoring."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .generators import GeneratorSpec, generate
from .graph import Graph, GraphError


@dataclass(frozen=True)
class PersonalizedBasis:
    rho: np.ndarray  # row x is the infinity-PageRank personalized on node x
    degrees: np.ndarray


def personalized_basis(g: Graph, epsilon: float = 0.85) -> PersonalizedBasis:
    """Rows ``e_x / (1 + eps) + eps / (1 + eps) * A D^-1 e_x``.

    Row x is supported on x and its neighbors, each neighbor receiving
    ``eps / ((1 + eps) d_x)``.
    """
    if (g.degrees == 0).any():
        raise GraphError("personalized basis needs every node to have degree >= 1")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    rho = np.zeros((g.n, g.n))
    rows = np.repeat(np.arange(g.n), g.degrees)
    rho[rows, g.indices] = (epsilon / ((1.0 + epsilon) * g.degrees))[rows]
    rho[np.arange(g.n), np.arange(g.n)] = 1.0 / (1.0 + epsilon)
    return PersonalizedBasis(rho, g.degrees.astype(float))


def pr_distance(a, b, degrees) -> float:
    """Euclidean distance between a and b after scaling coordinate x by d_x^-1/2."""
    degrees = np.asarray(degrees, dtype=float)
    if (degrees <= 0).any():
        raise ValueError("PageRank distance needs positive degrees")
    diff = (np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) / np.sqrt(degrees)
    return float(np.sqrt(diff @ diff))


@dataclass
class ClusterModel:
    k: int
    centers: np.ndarray
    labels: np.ndarray
    iterations: int
    final_error: float
    seed: int
    converged: bool
    inertia: float
    reseeds: list[tuple[int, int, int]] = field(default_factory=list)  # (iteration, cluster, node)


def _distances(scaled_rows: np.ndarray, scaled_centers: np.ndarray) -> np.ndarray:
    out = np.empty((len(scaled_rows), len(scaled_centers)))
    for i, c in enumerate(scaled_centers):
        diff = scaled_rows - c
        out[:, i] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return out


def _assign(scaled_rows, centers, inv_sqrt_deg):
    dist = _distances(scaled_rows, centers * inv_sqrt_deg)
    return np.argmin(dist, axis=1), dist


def _run(basis: PersonalizedBasis, k: int, tol: float, rng: np.random.Generator,
         seed: int, max_iter: int) -> ClusterModel:
    rho = basis.rho
    n = len(rho)
    inv_sqrt_deg = 1.0 / np.sqrt(basis.degrees)
    scaled = rho * inv_sqrt_deg
    centers = rho[rng.choice(n, size=k, replace=False)].copy()
    error = math.inf
    reseeds = []
    it = 0
    labels = np.zeros(n, dtype=np.int64)
    while error > tol and it < max_iter:
        it += 1
        labels, dist = _assign(scaled, centers, inv_sqrt_deg)
        for i in range(k):
            if not (labels == i).any():
                # refill the empty cluster with the node worst served by its center
                own = dist[np.arange(n), labels]
                sizes = np.bincount(labels, minlength=k)
                own[sizes[labels] <= 1] = -1.0
                far = int(np.argmax(own))
                labels[far] = i
                reseeds.append((it, i, far))
        new = np.vstack([rho[labels == i].mean(axis=0) for i in range(k)])
        error = float(np.linalg.norm(centers - new))
        centers = new
    dist = _distances(scaled, centers * inv_sqrt_deg)
    inertia = float(dist[np.arange(n), labels].sum())
    converged = error <= tol
    return ClusterModel(k, centers, labels, it, error, seed, converged, inertia, reseeds)


def restart_seed(seed: int, restart: int) -> int:
    return int(np.random.SeedSequence([seed, restart]).generate_state(1, dtype=np.uint64)[0])


def cluster(g: Graph, k: int, epsilon: float = 0.85, tol: float = 1e-10, seed: int = 0,
            max_iter: int = 300, restarts: int = 1, threads: int = 1,
            basis: PersonalizedBasis | None = None) -> ClusterModel:
    """Cluster nodes by PageRank distance between personalized infinity-PageRank rows.

    Centers start at the rows of ``k`` distinct random nodes, then alternate
    nearest-center assignment and averaging until the centers move by less
    than ``tol`` (Frobenius norm) or ``max_iter`` passes run.  Empty clusters
    are refilled with the node farthest from its own center.  With several
    restarts, the model with the smallest total distance wins; ties go to
    the earliest restart.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} must lie in [1, n={g.n}]")
    basis = basis or personalized_basis(g, epsilon)

    def one(r):
        s = restart_seed(seed, r) if restarts > 1 else seed
        return _run(basis, k, tol, np.random.default_rng(s), s, max_iter)

    if threads > 1 and restarts > 1:
        with ThreadPoolExecutor(threads) as pool:
            models = list(pool.map(one, range(restarts)))
    else:
        models = [one(r) for r in range(restarts)]
    return min(models, key=lambda m: m.inertia)


def _contingency(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("label vectors differ in length")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(labels_a, labels_b) -> float:
    """Mutual information over the arithmetic mean of the two label entropies."""
    table = _contingency(labels_a, labels_b)
    total = table.sum()
    ha, hb = _entropy(table.sum(axis=1)), _entropy(table.sum(axis=0))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    joint = table / total
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / total**2
    nz = joint > 0
    mi = float((joint[nz] * np.log(joint[nz] / outer[nz])).sum())
    return min(1.0, max(0.0, mi / ((ha + hb) / 2.0)))


def best_match_accuracy(labels, truth) -> float:
    """Largest fraction of agreeing nodes over one-to-one label matchings."""
    table = _contingency(labels, truth)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / table.sum())


def sbm_spec(separation: float, sizes=(30, 30, 30), p_out: float = 0.05, seed: int = 0) -> GeneratorSpec:
    """SBM with p_in = p_out + separation."""
    return GeneratorSpec("sbm", {"sizes": list(sizes), "p_in": p_out + separation, "p_out": p_out}, seed)


@dataclass
class AccuracyCurve:
    separations: np.ndarray
    accuracy: np.ndarray  # instances x separations
    nmi: np.ndarray

    @property
    def mean_accuracy(self) -> np.ndarray:
        return self.accuracy.mean(axis=0)


def sbm_accuracy(separation: float, instance: int, sizes=(30, 30, 30), p_out: float = 0.05,
                 epsilon: float = 0.85, restarts: int = 10, seed: int = 0) -> tuple[float, float]:
    """Cluster one SBM draw; returns (best-match accuracy, NMI)."""
    spec = sbm_spec(separation, sizes, p_out, restart_seed(seed, instance))
    g = generate(spec).without_isolated()
    truth = g.partition
    model = cluster(g, len(sizes), epsilon, seed=restart_seed(seed + 1, instance), restarts=restarts)
    return best_match_accuracy(model.labels, truth), nmi(model.labels, truth)


def accuracy_curve(separations, instances: int = 50, sizes=(30, 30, 30), p_out: float = 0.05,
                   epsilon: float = 0.85, restarts: int = 10, seed: int = 0) -> AccuracyCurve:
    separations = np.asarray(separations, dtype=float)
    acc = np.zeros((instances, len(separations)))
    scores = np.zeros_like(acc)
    for j, sep in enumerate(separations):
        for i in range(instances):
            acc[i, j], scores[i, j] = sbm_accuracy(sep, i + instances * j, sizes, p_out,
                                                   epsilon, restarts, seed)
    return AccuracyCurve(separations, acc, scores)
