"""Versioned directed package-dependency graphs.

A graph is an immutable set of package names plus directed usage edges
for one released version of a system.  Graphs are simple (no duplicate
edges) and have no self-loops; loaders repair noisy extractor output
instead of failing on it.

File formats
------------
Canonical edge-list (read and written)::

    #version 10.4.1.0
    # free-form comment
    node org.apache.derby.catalog
    edge org.apache.derby.impl.sql org.apache.derby.catalog

The first line must be ``#version <id>``.  ``node`` lines are optional
unless the loader is asked to require declarations.  Node names are
arbitrary non-whitespace strings; surrounding whitespace is trimmed.

Restricted DOT subset (read only)::

    digraph example {
      "a.b" -> "a.c";
      lonely_node;
    }

Only plain node and edge statements are understood; attributes and
subgraphs are not.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError, ParseError, StructuralError, ValidationError

logger = logging.getLogger(__name__)

NodeId = str
Edge = tuple[NodeId, NodeId]

GRAPH_FORMATS = ("edge-list", "dot-subset")


class DependencyGraph:
    """Immutable directed simple graph of package nodes for one version."""

    __slots__ = ("version_id", "nodes", "edges", "_out", "_in")

    def __init__(self, version_id: str, nodes: Iterable[NodeId] = (), edges: Iterable[Edge] = ()):
        edge_set = frozenset((str(s), str(t)) for s, t in edges)
        for s, t in edge_set:
            if s == t:
                raise ValidationError(f"self-loop {s!r} -> {t!r} is not allowed")
        node_set = frozenset(str(n) for n in nodes)
        node_set |= {s for s, _ in edge_set} | {t for _, t in edge_set}
        self.version_id = version_id
        self.nodes: frozenset[NodeId] = node_set
        self.edges: frozenset[Edge] = edge_set
        out: dict[NodeId, set[NodeId]] = {n: set() for n in node_set}
        inc: dict[NodeId, set[NodeId]] = {n: set() for n in node_set}
        for s, t in edge_set:
            out[s].add(t)
            inc[t].add(s)
        self._out = out
        self._in = inc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return (
            self.version_id == other.version_id
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.version_id, self.nodes, self.edges))

    def __repr__(self) -> str:
        return (
            f"DependencyGraph({self.version_id!r}, "
            f"{len(self.nodes)} nodes, {len(self.edges)} edges)"
        )

    def has_edge(self, source: NodeId, target: NodeId) -> bool:
        return (source, target) in self.edges

    def neighbors(self, n: NodeId, mode: str = "all") -> frozenset[NodeId]:
        """Neighbor set of ``n``: incoming, outgoing, or their union.

        ``mode="all"`` is the undirected projection used by the
        similarity features.  Unknown nodes raise KeyError.
        """
        if n not in self._out:
            raise KeyError(f"unknown node {n!r} in graph {self.version_id!r}")
        if mode == "in":
            return frozenset(self._in[n])
        if mode == "out":
            return frozenset(self._out[n])
        if mode == "all":
            return frozenset(self._in[n] | self._out[n])
        raise ValidationError(f"mode must be 'in', 'out' or 'all', got {mode!r}")

    def in_degree(self, n: NodeId) -> int:
        return len(self._in[n])

    def out_degree(self, n: NodeId) -> int:
        return len(self._out[n])

    def degree_stats(self) -> "DegreeStats":
        """Per-node in/out degrees plus the graph-wide degree medians.

        The even-count median is the arithmetic mean of the two middle
        values.  Raises DataError on an empty graph.
        """
        if not self.nodes:
            raise DataError("degree statistics are undefined for an empty graph")
        in_deg = {n: len(self._in[n]) for n in self.nodes}
        out_deg = {n: len(self._out[n]) for n in self.nodes}
        return DegreeStats(
            in_degree=in_deg,
            out_degree=out_deg,
            median_in=_median(in_deg.values()),
            median_out=_median(out_deg.values()),
        )


def _median(values: Iterable[int]) -> float:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2


@dataclass(frozen=True)
class DegreeStats:
    in_degree: dict[NodeId, int]
    out_degree: dict[NodeId, int]
    median_in: float
    median_out: float

    def total_degree(self, n: NodeId) -> int:
        return self.in_degree[n] + self.out_degree[n]


@dataclass(frozen=True)
class GraphDelta:
    """Exact set difference between two versions of a graph."""

    added_nodes: frozenset[NodeId] = frozenset()
    removed_nodes: frozenset[NodeId] = frozenset()
    added_edges: frozenset[Edge] = frozenset()
    removed_edges: frozenset[Edge] = frozenset()

    @property
    def empty(self) -> bool:
        return not (self.added_nodes or self.removed_nodes or self.added_edges or self.removed_edges)


def diff_graphs(older: DependencyGraph, newer: DependencyGraph) -> GraphDelta:
    """Change accounting between two versions (pure set differences)."""
    return GraphDelta(
        added_nodes=newer.nodes - older.nodes,
        removed_nodes=older.nodes - newer.nodes,
        added_edges=newer.edges - older.edges,
        removed_edges=older.edges - newer.edges,
    )


def apply_delta(older: DependencyGraph, delta: GraphDelta, version_id: str) -> DependencyGraph:
    """Apply a delta to the older graph; inverse of diff_graphs."""
    return DependencyGraph(
        version_id,
        nodes=(older.nodes | delta.added_nodes) - delta.removed_nodes,
        edges=(older.edges | delta.added_edges) - delta.removed_edges,
    )


@dataclass
class LoadedGraph:
    """Parse result: the repaired graph plus one warning per repair."""

    graph: DependencyGraph
    warnings: list[str] = field(default_factory=list)


def load_graph(
    path: str | Path,
    fmt: str = "edge-list",
    *,
    version_id: str | None = None,
    require_declared: bool = False,
) -> DependencyGraph:
    """Load a dependency graph, logging any repairs as warnings.

    ``require_declared`` makes edge-list edges referencing nodes with no
    prior ``node`` line a StructuralError.  ``version_id`` overrides the
    id found in the file (and is the only source of one for DOT input,
    defaulting to the file stem).
    """
    loaded = load_graph_with_warnings(
        path, fmt, version_id=version_id, require_declared=require_declared
    )
    for message in loaded.warnings:
        logger.warning("%s: %s", path, message)
    return loaded.graph


def load_graph_with_warnings(
    path: str | Path,
    fmt: str = "edge-list",
    *,
    version_id: str | None = None,
    require_declared: bool = False,
) -> LoadedGraph:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if fmt == "edge-list":
        loaded = parse_edge_list(text, path=str(path), require_declared=require_declared)
    elif fmt == "dot-subset":
        loaded = parse_dot_subset(
            text, path=str(path), version_id=version_id or path.stem
        )
    else:
        raise ValidationError(f"unknown graph format {fmt!r}; expected one of {GRAPH_FORMATS}")
    if version_id is not None and loaded.graph.version_id != version_id:
        loaded = LoadedGraph(
            DependencyGraph(version_id, loaded.graph.nodes, loaded.graph.edges),
            loaded.warnings,
        )
    return loaded


def parse_edge_list(
    text: str, *, path: str | None = None, require_declared: bool = False
) -> LoadedGraph:
    lines = text.splitlines()
    if not lines or not lines[0].strip().startswith("#version"):
        raise ParseError("first line must be '#version <id>'", path=path, line=1)
    header = lines[0].strip().split(maxsplit=1)
    version_id = header[1].strip() if len(header) > 1 else ""

    nodes: set[NodeId] = set()
    declared: set[NodeId] = set()
    edges: set[Edge] = set()
    warnings: list[str] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) != 2:
                raise ParseError(
                    f"expected 'node <name>', got {line!r}", path=path, line=lineno
                )
            nodes.add(parts[1])
            declared.add(parts[1])
        elif parts[0] == "edge":
            if len(parts) != 3:
                raise ParseError(
                    f"expected 'edge <source> <target>', got {line!r}", path=path, line=lineno
                )
            source, target = parts[1], parts[2]
            if require_declared:
                for endpoint in (source, target):
                    if endpoint not in declared:
                        raise StructuralError(
                            f"edge references undeclared node {endpoint!r}",
                            path=path,
                            line=lineno,
                        )
            if source == target:
                warnings.append(f"line {lineno}: dropped self-loop on {source!r}")
                nodes.add(source)
                continue
            if (source, target) in edges:
                logger.debug("%s:%d: duplicate edge %s -> %s collapsed", path, lineno, source, target)
            edges.add((source, target))
            nodes.update((source, target))
        else:
            raise ParseError(
                f"unknown directive {parts[0]!r} (expected 'node' or 'edge')",
                path=path,
                line=lineno,
            )
    return LoadedGraph(DependencyGraph(version_id, nodes, edges), warnings)


# a hyphen stays part of a bare name unless it starts an '->' arrow
_DOT_TOKEN = re.compile(r'"((?:[^"\\]|\\.)*)"|(->)|((?:[A-Za-z0-9_.$]|-(?!>))+)|([{};])|(\s+)|(.)')


def parse_dot_subset(text: str, *, path: str | None = None, version_id: str = "") -> LoadedGraph:
    """Parse the restricted DOT subset: digraph, plain nodes, '->' edges."""
    tokens: list[tuple[str, str, int]] = []  # (kind, value, line)
    lineno = 1
    for match in _DOT_TOKEN.finditer(text):
        quoted, arrow, bare, punct, space, bad = match.groups()
        if space is not None:
            lineno += space.count("\n")
            continue
        if bad is not None:
            raise ParseError(f"unexpected character {bad!r}", path=path, line=lineno)
        if quoted is not None:
            tokens.append(("name", quoted.replace('\\"', '"').strip(), lineno))
        elif bare is not None:
            tokens.append(("name", bare, lineno))
        elif arrow is not None:
            tokens.append(("arrow", arrow, lineno))
        else:
            tokens.append(("punct", punct, lineno))

    pos = 0

    def expect(kind: str, value: str | None = None) -> tuple[str, str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", path=path, line=lineno)
        tok = tokens[pos]
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(f"unexpected token {tok[1]!r}", path=path, line=tok[2])
        pos += 1
        return tok

    tok = expect("name")
    if tok[1] != "digraph":
        raise ParseError(f"expected 'digraph', got {tok[1]!r}", path=path, line=tok[2])
    if pos < len(tokens) and tokens[pos][0] == "name":
        pos += 1  # optional graph name
    expect("punct", "{")

    nodes: set[NodeId] = set()
    edges: set[Edge] = set()
    warnings: list[str] = []
    while True:
        if pos >= len(tokens):
            raise ParseError("missing closing '}'", path=path, line=lineno)
        if tokens[pos][:2] == ("punct", "}"):
            pos += 1
            break
        first = expect("name")
        chain = [first[1]]
        while pos < len(tokens) and tokens[pos][0] == "arrow":
            pos += 1
            chain.append(expect("name")[1])
        if pos < len(tokens) and tokens[pos][:2] == ("punct", ";"):
            pos += 1
        nodes.update(chain)
        for source, target in zip(chain, chain[1:]):
            if source == target:
                warnings.append(f"line {first[2]}: dropped self-loop on {source!r}")
            else:
                edges.add((source, target))
    return LoadedGraph(DependencyGraph(version_id, nodes, edges), warnings)


def serialize_graph(g: DependencyGraph) -> str:
    """Canonical edge-list text: nodes and edges in lexicographic order."""
    lines = [f"#version {g.version_id}"]
    lines.extend(f"node {n}" for n in sorted(g.nodes))
    lines.extend(f"edge {s} {t}" for s, t in sorted(g.edges))
    return "\n".join(lines) + "\n"


def save_graph(g: DependencyGraph, path: str | Path) -> None:
    Path(path).write_text(serialize_graph(g), encoding="utf-8")
