"""Undirected simple graphs in compressed sparse adjacency form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Raised for malformed graph input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``,
    sorted lexicographically.  ``indptr``/``indices`` give the symmetric
    neighbor lists (CSR, neighbors sorted ascending).
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray
    connected: bool
    labels: tuple | None = None
    partition: np.ndarray | None = field(default=None)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, x: int) -> np.ndarray:
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=float)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def label_of(self, x: int):
        return self.labels[x] if self.labels is not None else x

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def without_isolated(self) -> "Graph":
        """Induced subgraph on nodes of degree >= 1, reindexed densely."""
        keep = np.flatnonzero(self.degrees > 0)
        if len(keep) == self.n:
            return self
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in keep)
        part = None if self.partition is None else self.partition[keep]
        return build_graph(remap[self.edges], len(keep), labels=labels, partition=part)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, connected={self.connected})"


def build_graph(
    edge_pairs: Iterable[Sequence[int]] | np.ndarray,
    n: int,
    labels: Sequence | None = None,
    partition: np.ndarray | None = None,
) -> Graph:
    """Build a deduplicated, symmetrized graph from edge pairs.

    Pairs may arrive in either orientation and may repeat.  Self-loops and
    out-of-range indices raise :class:`GraphError`.
    """
    if n < 1:
        raise GraphError("graph needs at least one node")
    pairs = np.asarray(list(edge_pairs) if not isinstance(edge_pairs, np.ndarray) else edge_pairs,
                       dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise GraphError("edge pairs must have shape (m, 2)")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        bad = np.flatnonzero((pairs < 0).any(axis=1) | (pairs >= n).any(axis=1))[0]
        raise GraphError(f"edge {tuple(pairs[bad])} has an index outside [0, {n})")
    loops = np.flatnonzero(pairs[:, 0] == pairs[:, 1])
    if len(loops):
        raise GraphError(f"self-loop at node {pairs[loops[0], 0]}")

    canon = np.sort(pairs, axis=1)
    edges = np.unique(canon, axis=0) if len(canon) else canon
    edges = np.ascontiguousarray(edges)

    both = np.concatenate([edges, edges[:, ::-1]]) if len(edges) else edges
    order = np.lexsort((both[:, 1], both[:, 0])) if len(both) else np.empty(0, dtype=np.int64)
    both = both[order]
    degrees = np.bincount(both[:, 0], minlength=n).astype(np.int64) if len(both) else np.zeros(n, np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    indices = np.ascontiguousarray(both[:, 1]) if len(both) else np.empty(0, dtype=np.int64)

    if n == 1:
        connected = True
    else:
        adj = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, n))
        ncomp, _ = connected_components(adj, directed=False)
        connected = ncomp == 1

    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise GraphError("label count does not match node count")
    if partition is not None:
        partition = np.asarray(partition, dtype=np.int64)
        partition.setflags(write=False)
    for arr in (edges, indptr, indices, degrees):
        arr.setflags(write=False)
    return Graph(n, edges, indptr, indices, degrees, bool(connected), labels, partition)
