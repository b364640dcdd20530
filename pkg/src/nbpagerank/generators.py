"""Random graph models: SBM, k-regular, bipartite biregular, G(n,p), Pareto Chung-Lu.

Every generator is a pure function of its :class:`GeneratorSpec`; the same
seed gives a bit-identical edge set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graph import Graph, GraphError, build_graph

MODELS = ("sbm", "regular", "biregular", "gnp", "pareto-cl")

# restarts of the stub-pairing procedure before giving up
MAX_PAIRING_RESTARTS = 1000


class GenerationError(GraphError):
    """Raised when a spec is invalid or no graph could be drawn."""


@dataclass(frozen=True)
class GeneratorSpec:
    model: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        validate_spec(self)

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.model, dict(self.params), int(seed))

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "GeneratorSpec":
        """Parse ``model:key=value,...``; list values use ``/`` (``sizes=30/30/30``)."""
        model, _, rest = text.partition(":")
        params: dict[str, Any] = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise GenerationError(f"malformed model parameter {item!r}")
            if "/" in value:
                params[key.strip()] = [_number(v) for v in value.split("/")]
            else:
                params[key.strip()] = _number(value)
        return cls(model.strip(), params, seed)

    def describe(self) -> str:
        items = []
        for key, value in self.params.items():
            if isinstance(value, (list, tuple)):
                value = "/".join(str(v) for v in value)
            items.append(f"{key}={value}")
        return f"{self.model}:{','.join(items)}"


def _number(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return float(text)


def _require(params, *names):
    missing = [k for k in names if k not in params]
    if missing:
        raise GenerationError(f"missing parameter(s): {', '.join(missing)}")


def _prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise GenerationError(f"{name}={p} is not a probability")


def validate_spec(spec: GeneratorSpec) -> None:
    p = spec.params
    if spec.model not in MODELS:
        raise GenerationError(f"unknown model {spec.model!r}; expected one of {MODELS}")
    if spec.model == "sbm":
        _require(p, "sizes", "p_in", "p_out")
        sizes = p["sizes"]
        if isinstance(sizes, (int, float)):
            sizes = [sizes]
        if any(int(s) < 1 for s in sizes):
            raise GenerationError("sbm blocks must be non-empty")
        _prob("p_in", p["p_in"])
        _prob("p_out", p["p_out"])
    elif spec.model == "regular":
        _require(p, "n", "k")
        n, k = int(p["n"]), int(p["k"])
        if n < 1 or not 0 <= k < n:
            raise GenerationError("regular requires 0 <= k < n")
        if (n * k) % 2:
            raise GenerationError("regular requires n*k even")
    elif spec.model == "biregular":
        _require(p, "n1", "n2", "d1", "d2")
        n1, n2, d1, d2 = (int(p[k]) for k in ("n1", "n2", "d1", "d2"))
        if min(n1, n2) < 1 or min(d1, d2) < 0:
            raise GenerationError("biregular needs positive part sizes")
        if n1 * d1 != n2 * d2:
            raise GenerationError("biregular requires n1*d1 == n2*d2")
        if d1 > n2 or d2 > n1:
            raise GenerationError("biregular requires d1 <= n2 and d2 <= n1")
    elif spec.model == "gnp":
        _require(p, "n", "p")
        if int(p["n"]) < 1:
            raise GenerationError("gnp requires n >= 1")
        _prob("p", p["p"])
    elif spec.model == "pareto-cl":
        _require(p, "n", "gamma", "w_min")
        if int(p["n"]) < 1:
            raise GenerationError("pareto-cl requires n >= 1")
        if p["gamma"] <= 1:
            raise GenerationError("pareto-cl tail exponent must exceed 1")
        if p["w_min"] <= 0:
            raise GenerationError("pareto-cl minimum expected degree must be positive")


def generate(spec: GeneratorSpec) -> Graph:
    """Draw a graph from ``spec``.

    SBM graphs carry block membership in ``Graph.partition``; biregular
    graphs carry part membership (0 for the first part, 1 for the second).
    """
    rng = np.random.default_rng(spec.seed)
    p = spec.params
    if spec.model == "sbm":
        sizes = p["sizes"] if isinstance(p["sizes"], (list, tuple)) else [p["sizes"]]
        return sbm([int(s) for s in sizes], p["p_in"], p["p_out"], rng)
    if spec.model == "regular":
        return random_regular(int(p["n"]), int(p["k"]), rng)
    if spec.model == "biregular":
        return random_biregular(int(p["n1"]), int(p["n2"]), int(p["d1"]), int(p["d2"]), rng)
    if spec.model == "gnp":
        return gnp(int(p["n"]), float(p["p"]), rng)
    return pareto_chung_lu(int(p["n"]), float(p["gamma"]), float(p["w_min"]), rng)


def _bernoulli_pairs(n: int, prob_row, rng: np.random.Generator) -> np.ndarray:
    # row i draws the pairs (i, j) for j > i in one vectorized call
    chunks = []
    for i in range(n - 1):
        probs = prob_row(i)
        hits = np.flatnonzero(rng.random(n - i - 1) < probs)
        if len(hits):
            chunks.append(np.column_stack([np.full(len(hits), i), hits + i + 1]))
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(chunks)


def sbm(sizes, p_in: float, p_out: float, rng: np.random.Generator) -> Graph:
    block = np.repeat(np.arange(len(sizes)), sizes)
    n = len(block)
    pairs = _bernoulli_pairs(n, lambda i: np.where(block[i + 1:] == block[i], p_in, p_out), rng)
    return build_graph(pairs, n, partition=block)


def gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    return build_graph(_bernoulli_pairs(n, lambda i: p, rng), n)


def pareto_weights(n: int, gamma: float, w_min: float, rng: np.random.Generator) -> np.ndarray:
    """Expected degrees with tail P(W > w) = (w / w_min)^-(gamma - 1)."""
    return w_min * (1.0 - rng.random(n)) ** (-1.0 / (gamma - 1.0))


def pareto_chung_lu(n: int, gamma: float, w_min: float, rng: np.random.Generator) -> Graph:
    """Chung-Lu graph on Pareto expected degrees; edge prob min(1, w_i w_j / sum w).

    Stands in for the hyper-soft configuration model, whose degree tail it
    shares; it is not that model's exact ensemble.
    """
    w = pareto_weights(n, gamma, w_min, rng)
    total = w.sum()
    pairs = _bernoulli_pairs(n, lambda i: np.minimum(1.0, w[i] * w[i + 1:] / total), rng)
    return build_graph(pairs, n)


def _suitable(leftover: list[int], edges: set, bipartite_split: int | None) -> bool:
    nodes = sorted(set(leftover))
    for a_i, a in enumerate(nodes):
        for b in nodes[a_i + 1:]:
            if bipartite_split is not None and (a < bipartite_split) == (b < bipartite_split):
                continue
            if (a, b) not in edges:
                return True
    return False


def _pair_stubs(stubs_a: np.ndarray, stubs_b: np.ndarray | None, rng, split: int | None):
    """One pairing-model attempt with repair of rejected pairs.

    Rejected stubs (loops, multi-edges) are reshuffled among themselves;
    returns None when the leftover stubs admit no valid pair.
    """
    edges: set[tuple[int, int]] = set()
    a = stubs_a
    b = stubs_b
    while len(a):
        if b is None:
            a = rng.permutation(a)
            left, right = a[0::2], a[1::2]
        else:
            left, right = a, rng.permutation(b)
        bad_a, bad_b = [], []
        for s, t in zip(left.tolist(), right.tolist()):
            u, v = (s, t) if s < t else (t, s)
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                bad_a.append(s)
                bad_b.append(t)
        if b is None:
            a = np.array(bad_a + bad_b, dtype=np.int64)
        else:
            a, b = np.array(bad_a, dtype=np.int64), np.array(bad_b, dtype=np.int64)
        if len(a) and not _suitable(a.tolist() + ([] if b is None else b.tolist()), edges, split):
            return None
    return edges


def random_regular(n: int, k: int, rng: np.random.Generator) -> Graph:
    if (n * k) % 2 or not 0 <= k < n:
        raise GenerationError("infeasible regular degree sequence")
    stubs = np.repeat(np.arange(n), k)
    for _ in range(MAX_PAIRING_RESTARTS):
        edges = _pair_stubs(stubs, None, rng, None)
        if edges is not None:
            return build_graph(sorted(edges), n)
    raise GenerationError(f"no simple {k}-regular graph on {n} nodes after {MAX_PAIRING_RESTARTS} restarts")


def random_biregular(n1: int, n2: int, d1: int, d2: int, rng: np.random.Generator) -> Graph:
    if n1 * d1 != n2 * d2 or d1 > n2 or d2 > n1:
        raise GenerationError("infeasible biregular degree sequence")
    part = np.concatenate([np.zeros(n1, np.int64), np.ones(n2, np.int64)])
    stubs_1 = np.repeat(np.arange(n1), d1)
    stubs_2 = np.repeat(np.arange(n1, n1 + n2), d2)
    for _ in range(MAX_PAIRING_RESTARTS):
        edges = _pair_stubs(stubs_1, stubs_2, rng, n1)
        if edges is not None:
            return build_graph(sorted(edges), n1 + n2, partition=part)
    raise GenerationError("no simple biregular graph found")


def generate_connected(spec: GeneratorSpec, max_tries: int = 1000) -> Graph:
    """Redraw with consecutive seeds until the graph is connected."""
    for offset in range(max_tries):
        g = generate(spec.with_seed(spec.seed + offset))
        if g.connected:
            return g
    raise GenerationError(f"no connected draw from {spec.describe()} in {max_tries} tries")
