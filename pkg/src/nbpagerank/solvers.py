"""Stationary distributions for standard, mu-, non-backtracking and infinity-PageRank."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .graph import Graph, GraphError
from .lift import EdgeLift, MODES, TAIL_DEGREE, apply_transition, build_lift, lift_distribution, project_to_nodes

INF = math.inf
METHODS = ("power", "linear-series")


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PageRankConfig:
    """Solver settings.

    ``mu`` is the backtrack weight: 0 is non-backtracking, 1 standard, and
    ``math.inf`` selects the closed-form infinity limit.  ``v`` defaults to
    the uniform distribution.
    """

    epsilon: float = 0.85
    mu: float = 1.0
    v: np.ndarray | None = field(default=None, compare=False)
    mode: str = TAIL_DEGREE
    method: str = "power"
    tol: float = 1e-12
    max_iter: int = 100_000

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.mu >= 0:
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        method = "linear-series" if self.method == "linear" else self.method
        if method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "method", method)
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def teleport(self, n: int) -> np.ndarray:
        if self.v is None:
            return np.full(n, 1.0 / n)
        v = np.asarray(self.v, dtype=float)
        if v.shape != (n,):
            raise ValueError("teleportation vector length does not match node count")
        if (v < 0).any() or abs(v.sum() - 1.0) > 1e-9:
            raise ValueError("teleportation vector must be non-negative with unit l1 norm")
        return v


@dataclass
class PageRankVector:
    values: np.ndarray
    space: str = "node"
    residual: float = 0.0
    iterations: int = 0
    converged: bool = True

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return len(self.values)


def _check_degrees(g: Graph) -> None:
    isolated = np.flatnonzero(g.degrees == 0)
    if len(isolated):
        raise GraphError(f"node {g.label_of(int(isolated[0]))} is isolated; PageRank needs degree >= 1")


def _fixed_point(step: Callable[[np.ndarray], np.ndarray], source: np.ndarray, cfg: PageRankConfig, space: str):
    """Solve x = step(x) + source, where ``step`` is linear with l1 gain <= epsilon.

    ``power`` iterates the affine map starting from the teleportation
    distribution; ``linear-series`` sums the Neumann series term by term.
    Both stop once the l1 size of the last update drops below ``tol``.
    """
    residual = math.inf
    if cfg.method == "power":
        x = source / source.sum()
        for it in range(1, cfg.max_iter + 1):
            nxt = step(x) + source
            residual = np.abs(nxt - x).sum()
            x = nxt
            if residual < cfg.tol:
                break
    else:
        term = source.copy()
        x = term.copy()
        for it in range(1, cfg.max_iter + 1):
            term = step(term)
            x += term
            residual = np.abs(term).sum()
            if residual < cfg.tol:
                break
    converged = residual < cfg.tol
    if not converged:
        warnings.warn(f"no convergence after {cfg.max_iter} iterations (residual {residual:.3e})",
                      ConvergenceWarning, stacklevel=3)
    x = np.maximum(x, 0.0)
    return PageRankVector(x / x.sum(), space, float(residual), it, converged)


def standard_pagerank(g: Graph, cfg: PageRankConfig | None = None) -> PageRankVector:
    """Node PageRank: the solution of (I - eps A D^-1) pi = (1 - eps) v."""
    cfg = cfg or PageRankConfig()
    _check_degrees(g)
    v = cfg.teleport(g.n)
    adj = g.adjacency()
    inv_deg = 1.0 / g.degrees
    eps = cfg.epsilon
    return _fixed_point(lambda x: eps * (adj @ (x * inv_deg)), (1.0 - eps) * v, cfg, "node")


def edge_pagerank(lift: EdgeLift, cfg: PageRankConfig) -> PageRankVector:
    """Edge-space stationary vector of the mu-weighted walk with teleportation.

    Mass on dangling edges (mu == 0, head of degree 1) is sent through
    the teleportation distribution.
    """
    g = lift.graph
    _check_degrees(g)
    u = lift_distribution(lift, cfg.teleport(g.n), cfg.mode)
    eps, mu = cfg.epsilon, cfg.mu
    if math.isinf(mu):
        values = (u + eps * u[lift.reverse]) / (1.0 + eps)
        return PageRankVector(values, "edge")
    dangling = lift.dangling(mu)
    if dangling.any():
        def step(x):
            return eps * (apply_transition(lift, mu, x) + x[dangling].sum() * u)
    else:
        def step(x):
            return eps * apply_transition(lift, mu, x)
    return _fixed_point(step, (1.0 - eps) * u, cfg, "edge")


def mu_pagerank(g: Graph, cfg: PageRankConfig | None = None, lift: EdgeLift | None = None):
    """mu-PageRank as ``(node vector, edge vector)``; node = T (edge)."""
    cfg = cfg or PageRankConfig()
    lift = lift or build_lift(g)
    if math.isinf(cfg.mu) and cfg.mode == TAIL_DEGREE:
        edge = edge_pagerank(lift, cfg)
        return infinity_pagerank(g, cfg.epsilon, cfg.teleport(g.n)), edge
    edge = edge_pagerank(lift, cfg)
    node = project_to_nodes(lift, edge.values)
    return PageRankVector(node / node.sum(), "node", edge.residual, edge.iterations, edge.converged), edge


def nb_pagerank(g: Graph, cfg: PageRankConfig | None = None, lift: EdgeLift | None = None):
    """Non-backtracking PageRank (mu = 0)."""
    return mu_pagerank(g, replace(cfg or PageRankConfig(), mu=0.0), lift)


def infinity_pagerank(g: Graph, epsilon: float = 0.85, v: np.ndarray | None = None) -> PageRankVector:
    """Closed-form limit: v / (1 + eps) + eps / (1 + eps) * A D^-1 v, in O(n + m)."""
    _check_degrees(g)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    v = PageRankConfig(epsilon=epsilon, v=v).teleport(g.n)
    spread = g.adjacency() @ (v / g.degrees)
    values = (v + epsilon * spread) / (1.0 + epsilon)
    return PageRankVector(values, "node")


def biregular_closed_form(n1: int, n2: int, d1: int, d2: int, epsilon: float = 0.85) -> np.ndarray:
    """PageRank of any bipartite (d1, d2)-biregular graph, first part listed first."""
    if n1 * d1 != n2 * d2:
        raise ValueError("infeasible biregular parameters: n1*d1 != n2*d2")
    if min(d1, d2) < 1:
        raise ValueError("biregular degrees must be positive")
    n = n1 + n2
    scale = n * (1.0 + epsilon)
    return np.concatenate([
        np.full(n1, (1.0 + epsilon * d1 / d2) / scale),
        np.full(n2, (1.0 + epsilon * d2 / d1) / scale),
    ])
