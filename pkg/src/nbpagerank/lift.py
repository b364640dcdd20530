"""Directed-edge lift of an undirected graph and its matrix-free operators.

Each undirected edge ``{u, v}`` (``u < v``, rank ``t`` in sorted order)
becomes the directed edges ``u->v`` at index ``2t`` and ``v->u`` at
``2t + 1``, so the reverse of edge ``e`` is ``e ^ 1``.

All operators act on probability column vectors: mass sitting on edge
``e`` moves to the edges leaving ``head[e]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError

TAIL_DEGREE = "tail-degree"
HEAD_COPY = "head-copy"
MODES = (TAIL_DEGREE, HEAD_COPY)


@dataclass(frozen=True, eq=False)
class EdgeLift:
    graph: Graph
    tail: np.ndarray
    head: np.ndarray
    reverse: np.ndarray
    head_degree: np.ndarray
    out_ptr: np.ndarray
    out_edges: np.ndarray
    in_ptr: np.ndarray
    in_edges: np.ndarray

    @property
    def edge_count(self) -> int:
        return len(self.tail)

    def outgoing(self, x: int) -> np.ndarray:
        return self.out_edges[self.out_ptr[x]:self.out_ptr[x + 1]]

    def incoming(self, x: int) -> np.ndarray:
        return self.in_edges[self.in_ptr[x]:self.in_ptr[x + 1]]

    def dangling(self, mu: float) -> np.ndarray:
        """Mask of edges with no successor: only at mu == 0, head of degree 1."""
        if mu == 0:
            return self.head_degree == 1
        return np.zeros(self.edge_count, dtype=bool)

    def transition_scale(self, mu: float) -> np.ndarray:
        """Per-edge ``1 / (d_head - 1 + mu)``, zero on dangling edges."""
        _check_mu(mu)
        denom = self.head_degree - 1.0 + mu
        scale = np.zeros(self.edge_count)
        ok = denom > 0
        scale[ok] = 1.0 / denom[ok]
        return scale


def _check_mu(mu: float) -> None:
    if not mu >= 0:
        raise ValueError(f"backtrack weight must be non-negative, got {mu}")


def _grouped(keys: np.ndarray, n: int):
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, order


def build_lift(g: Graph) -> EdgeLift:
    if g.m == 0:
        raise GraphError("cannot lift a graph without edges")
    m = g.m
    tail = np.empty(2 * m, dtype=np.int64)
    head = np.empty(2 * m, dtype=np.int64)
    tail[0::2], head[0::2] = g.edges[:, 0], g.edges[:, 1]
    tail[1::2], head[1::2] = g.edges[:, 1], g.edges[:, 0]
    reverse = np.arange(2 * m) ^ 1
    head_degree = g.degrees[head].astype(float)
    out_ptr, out_edges = _grouped(tail, g.n)
    in_ptr, in_edges = _grouped(head, g.n)
    for arr in (tail, head, reverse, head_degree, out_ptr, out_edges, in_ptr, in_edges):
        arr.setflags(write=False)
    return EdgeLift(g, tail, head, reverse, head_degree, out_ptr, out_edges, in_ptr, in_edges)


def transition_weight(lift: EdgeLift, mu: float, e: int, f: int) -> float:
    """Probability of stepping from edge ``e`` to edge ``f``."""
    if lift.tail[f] != lift.head[e]:
        return 0.0
    scale = lift.transition_scale(mu)[e]
    return mu * scale if f == lift.reverse[e] else scale


def apply_transition(lift: EdgeLift, mu: float, x: np.ndarray) -> np.ndarray:
    """One step of the mu-weighted edge walk, ``y = W_mu x``.

    Mass on dangling edges is dropped; the solver redistributes it.
    """
    scale = lift.transition_scale(mu)
    sx = x * scale
    # mass arriving at each node, spread uniformly over its outgoing edges ...
    arriving = np.bincount(lift.head, weights=sx, minlength=lift.graph.n)
    # ... then the backtrack edge is reweighted from 1 to mu.  Subtracting
    # first keeps degree-one heads exact when mu is tiny and sx is huge.
    back = sx[lift.reverse]
    return (arriving[lift.tail] - back) + mu * back


def lift_distribution(lift: EdgeLift, v: np.ndarray, mode: str = TAIL_DEGREE) -> np.ndarray:
    """Move a node distribution into edge space.

    ``tail-degree`` splits ``v[x]`` evenly over the edges leaving ``x``;
    ``head-copy`` gives every edge the weight of its head, renormalized.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (lift.graph.n,):
        raise ValueError("distribution length does not match node count")
    if (v < 0).any() or not np.isfinite(v).all():
        raise ValueError("distribution must be finite and non-negative")
    if abs(v.sum() - 1.0) > 1e-9:
        raise ValueError(f"distribution must sum to 1 (sums to {v.sum():.12g})")
    deg = lift.graph.degrees
    if mode == TAIL_DEGREE:
        if ((deg == 0) & (v > 0)).any():
            raise ValueError("tail-degree lift puts mass on an isolated node")
        return v[lift.tail] / deg[lift.tail]
    if mode == HEAD_COPY:
        u = v[lift.head]
        total = u.sum()
        if total <= 0:
            raise ValueError("head-copy lift: all mass sits on isolated nodes")
        return u / total
    raise ValueError(f"unknown lift mode {mode!r}; expected one of {MODES}")


def project_to_nodes(lift: EdgeLift, y: np.ndarray) -> np.ndarray:
    """Apply T: sum edge values onto their tail nodes."""
    return np.bincount(lift.tail, weights=y, minlength=lift.graph.n)
