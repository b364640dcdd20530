"""Edge-list and GML readers, CSV writers, and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, GraphError, build_graph

SIG_DIGITS = 12


class ParseError(GraphError):
    pass


def fmt(x) -> str:
    """Serialize a number with 12 significant digits."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), f".{SIG_DIGITS}g")
    return str(x)


def _is_index(token: str) -> bool:
    return token.isdigit()


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines into a graph with dense node ids.

    Blank lines and ``#`` comments are skipped.  When every token is a
    non-negative integer, nodes are ordered numerically; otherwise by first
    appearance.  The original tokens are kept in ``Graph.labels``.
    """
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        if parts[0] == parts[1]:
            raise ParseError(f"line {lineno}: self-loop at {parts[0]}")
        pairs.append((parts[0], parts[1]))
    if not pairs:
        raise ParseError("edge list contains no edges")

    tokens = [t for pair in pairs for t in pair]
    if all(_is_index(t) for t in tokens):
        order = sorted(set(tokens), key=int)
        labels = [int(t) for t in order]
    else:
        order = list(dict.fromkeys(tokens))
        labels = order
    index = {t: i for i, t in enumerate(order)}
    edges = [(index[a], index[b]) for a, b in pairs]
    return build_graph(edges, len(order), labels=labels)


def write_edge_list(g: Graph) -> str:
    out = io.StringIO()
    for u, v in g.edges:
        out.write(f"{g.label_of(int(u))} {g.label_of(int(v))}\n")
    return out.getvalue()


_GML_TOKEN = re.compile(r'\s*(?:(\[)|(\])|("(?:[^"\\]|\\.)*")|([^\s\[\]"]+))')


def _gml_tokens(text: str):
    text = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    pos = 0
    while pos < len(text):
        m = _GML_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                return
            raise ParseError(f"GML: cannot tokenize near {rest[:20]!r}")
        pos = m.end()
        if m.group(1):
            yield "["
        elif m.group(2):
            yield "]"
        elif m.group(3):
            yield ("str", m.group(3)[1:-1])
        elif m.group(4):
            yield m.group(4)


def _gml_value(tok):
    if isinstance(tok, tuple):
        return tok[1]
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            return tok


def _gml_list(tokens) -> list[tuple[str, object]]:
    items = []
    for key in tokens:
        if key == "]":
            return items
        if isinstance(key, tuple) or key == "[":
            raise ParseError(f"GML: expected a key, got {key!r}")
        value = next(tokens, None)
        if value is None:
            raise ParseError(f"GML: key {key!r} has no value")
        items.append((key, _gml_list(tokens) if value == "[" else _gml_value(value)))
    return items


def parse_gml(text: str) -> tuple[Graph, list[dict]]:
    """Parse the node/edge subset of GML.

    Returns the graph and one attribute dict per node (in node order).
    Duplicate edges are dropped with a warning.
    """
    top = _gml_list(iter(_gml_tokens(text)))
    graphs = [v for k, v in top if k == "graph"]
    if not graphs:
        raise ParseError("GML: no graph block")
    body = graphs[0]
    nodes, ids = [], {}
    raw_edges = []
    for key, value in body:
        if key == "node":
            attrs = dict(value)
            if "id" not in attrs:
                raise ParseError("GML: node without id")
            ids[attrs["id"]] = len(nodes)
            nodes.append(attrs)
        elif key == "edge":
            attrs = dict(value)
            if "source" not in attrs or "target" not in attrs:
                raise ParseError("GML: edge without source/target")
            raw_edges.append((attrs["source"], attrs["target"]))
    try:
        pairs = [(ids[s], ids[t]) for s, t in raw_edges]
    except KeyError as exc:
        raise ParseError(f"GML: edge references unknown node {exc.args[0]!r}") from None
    unique = {tuple(sorted(p)) for p in pairs}
    if len(unique) < len(pairs):
        warnings.warn(f"GML: dropped {len(pairs) - len(unique)} duplicate edge(s)", stacklevel=2)
    labels = [a.get("label", a["id"]) for a in nodes]
    g = build_graph(pairs, len(nodes), labels=labels)
    return g, nodes


def read_graph(path: str | Path) -> tuple[Graph, list[dict] | None]:
    """Load an edge list, or GML when the suffix is ``.gml``."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".gml":
        return parse_gml(text)
    return parse_edge_list(text), None


def read_node_values(path: str | Path, g: Graph) -> np.ndarray:
    """Two-column ``node value`` file mapped onto ``g``'s node order."""
    index = {str(g.label_of(i)): i for i in range(g.n)}
    out = np.full(g.n, np.nan)
    first = True
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        header, first = first, False
        try:
            if len(parts) != 2:
                raise ValueError
            value = float(parts[1])
        except ValueError:
            if header:
                continue
            raise ParseError(f"{path}:{lineno}: expected 'node value'") from None
        if parts[0] not in index:
            raise ParseError(f"{path}:{lineno}: unknown node {parts[0]!r}")
        out[index[parts[0]]] = value
    return out


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def ranks(values: np.ndarray) -> np.ndarray:
    """1-based rank, highest value first; ties go to the lower index."""
    order = np.lexsort((np.arange(len(values)), -np.asarray(values)))
    out = np.empty(len(values), dtype=np.int64)
    out[order] = np.arange(1, len(values) + 1)
    return out


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Flat ``key=value`` record written next to every CLI output."""

    command: str
    argv: list[str]
    params: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    version: str = ""
    wall_time: float = 0.0

    def dumps(self) -> str:
        lines = [
            f"command={self.command}",
            f"argv={json.dumps(self.argv)}",
            f"version={self.version}",
            f"seeds={','.join(str(s) for s in self.seeds)}",
            f"wall_time={self.wall_time:.6f}",
        ]
        lines += [f"param.{k}={v}" for k, v in sorted(self.params.items())]
        lines += [f"input.{k}=sha256:{v}" for k, v in sorted(self.inputs.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunManifest":
        kv = {}
        for line in text.splitlines():
            if "=" in line:
                k, _, v = line.partition("=")
                kv[k] = v
        params = {k[6:]: v for k, v in kv.items() if k.startswith("param.")}
        inputs = {k[6:]: v.removeprefix("sha256:") for k, v in kv.items() if k.startswith("input.")}
        seeds = [int(s) for s in kv.get("seeds", "").split(",") if s]
        return cls(kv["command"], json.loads(kv["argv"]), params, seeds, inputs,
                   kv.get("version", ""), float(kv.get("wall_time", 0.0)))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest")


class Stopwatch:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
