"""Cyclic-dependency and hub-like smell detection, plus predictive filters.

Detection works on a single graph.  The filters take a set of predicted
(absent) dependencies, add them to the current graph all at once, and
report which smells the augmented graph would exhibit that the current
one does not: every elementary cycle through a predicted edge, and every
node touched by a predicted edge that the hub predicate newly accepts.

A node is a hub when its in- and out-degrees both strictly exceed the
graph medians and the degrees are roughly balanced:

    in > median_in  and  out > median_out  and  |in - out| < fraction * (in + out)

Cycle enumeration is Johnson's algorithm with nodes processed in
lexicographic order, so each elementary cycle is emitted exactly once,
already rotated to start at its smallest node.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ValidationError
from .graph import DependencyGraph, NodeId

Edge = tuple[NodeId, NodeId]

CYCLIC_DEPENDENCY = "cyclic-dependency"
HUB_LIKE = "hub-like"
SMELL_KINDS = (CYCLIC_DEPENDENCY, HUB_LIKE)

DEFAULT_FRACTION = 0.25
DEFAULT_MAX_CYCLES = 10_000


@dataclass(frozen=True)
class CycleReport:
    cycles: tuple[tuple[NodeId, ...], ...]
    count: int
    mean_length: float
    truncated: bool

    def __post_init__(self) -> None:
        if self.count != len(self.cycles):
            raise ValidationError("cycle count does not match the cycle list")
        for cycle in self.cycles:
            if len(cycle) < 2:
                raise ValidationError(f"cycle {cycle!r} is shorter than 2 nodes")
            if len(set(cycle)) != len(cycle):
                raise ValidationError(f"cycle {cycle!r} repeats a node")
            if cycle[0] != min(cycle):
                raise ValidationError(f"cycle {cycle!r} does not start at its smallest node")

    def lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]


@dataclass(frozen=True)
class HubDetail:
    node: NodeId
    in_degree: int
    out_degree: int
    balance: int
    fraction_bound: float


@dataclass(frozen=True)
class HubReport:
    hubs: tuple[HubDetail, ...]
    median_in: float
    median_out: float
    fraction: float

    @property
    def nodes(self) -> frozenset[NodeId]:
        return frozenset(d.node for d in self.hubs)


@dataclass(frozen=True)
class AnticipatedSmells:
    smell_kind: str
    triggering_edges: frozenset[Edge]
    cycles: tuple[tuple[NodeId, ...], ...] = ()
    nodes: tuple[NodeId, ...] = ()
    versions: tuple[str, ...] = ()
    model_id: str = ""
    fraction: float | None = None
    max_cycles: int | None = None
    truncated: bool = False

    def __post_init__(self) -> None:
        if self.smell_kind not in SMELL_KINDS:
            raise ValidationError(f"smell_kind must be one of {SMELL_KINDS}, got {self.smell_kind!r}")
        if self.smell_kind == CYCLIC_DEPENDENCY and self.nodes:
            raise ValidationError("cyclic-dependency smells carry cycles, not nodes")
        if self.smell_kind == HUB_LIKE and self.cycles:
            raise ValidationError("hub-like smells carry nodes, not cycles")


def cycle_edges(cycle: tuple[NodeId, ...]) -> list[Edge]:
    """Consecutive pairs of a cycle, including the closing edge."""
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def _reachable(start: NodeId, adjacency: dict[NodeId, list[NodeId]], allowed: set[NodeId]) -> set[NodeId]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in adjacency.get(u, ()):
            if w in allowed and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _johnson_search(start: NodeId, adjacency: dict[NodeId, list[NodeId]]) -> Iterator[tuple[NodeId, ...]]:
    """Yield every elementary cycle through ``start`` within ``adjacency``.

    ``adjacency`` must be the subgraph of one strongly connected
    component whose smallest node is ``start``; neighbor lists must be
    sorted for deterministic emission order.
    """
    blocked = {start}
    blocked_by: dict[NodeId, set[NodeId]] = defaultdict(set)
    path = [start]
    neighbor_stack = [iter(adjacency[start])]
    found_flags = [False]
    while neighbor_stack:
        advanced = False
        for w in neighbor_stack[-1]:
            if w == start:
                yield tuple(path)
                found_flags[-1] = True
            elif w not in blocked:
                blocked.add(w)
                path.append(w)
                neighbor_stack.append(iter(adjacency[w]))
                found_flags.append(False)
                advanced = True
                break
        if advanced:
            continue
        neighbor_stack.pop()
        v = path.pop()
        if found_flags.pop():
            if found_flags:
                found_flags[-1] = True
            unblock = deque([v])
            while unblock:
                u = unblock.popleft()
                if u in blocked:
                    blocked.discard(u)
                    unblock.extend(blocked_by[u])
                    blocked_by[u].clear()
        else:
            for w in adjacency[v]:
                blocked_by[w].add(v)


def _elementary_cycles(g: DependencyGraph, limit: int) -> tuple[list[tuple[NodeId, ...]], bool]:
    """Up to ``limit`` elementary cycles, plus a flag when more exist."""
    out_adj = {u: sorted(g.neighbors(u, "out")) for u in g.nodes}
    in_adj = {u: sorted(g.neighbors(u, "in")) for u in g.nodes}
    ordered = sorted(g.nodes)
    cycles: list[tuple[NodeId, ...]] = []
    for i, root in enumerate(ordered):
        if not out_adj[root] or not in_adj[root]:
            continue
        allowed = set(ordered[i:])
        component = _reachable(root, out_adj, allowed) & _reachable(root, in_adj, allowed)
        if len(component) < 2:
            continue
        sub_adj = {u: [w for w in out_adj[u] if w in component] for u in component}
        for cycle in _johnson_search(root, sub_adj):
            if len(cycles) == limit:
                return cycles, True
            cycles.append(cycle)
    return cycles, False


def detect_cycles(g: DependencyGraph, max_cycles: int = DEFAULT_MAX_CYCLES) -> CycleReport:
    """Enumerate elementary cycles, capped at ``max_cycles``.

    A DAG yields an empty report with mean_length 0.  When the cap is
    hit the report is truncated and carries exactly ``max_cycles``
    cycles.
    """
    if max_cycles < 1:
        raise ValidationError(f"max_cycles must be >= 1, got {max_cycles}")
    found, truncated = _elementary_cycles(g, max_cycles)
    found.sort()
    count = len(found)
    mean_length = sum(len(c) for c in found) / count if count else 0.0
    return CycleReport(tuple(found), count, mean_length, truncated)


def detect_hubs(g: DependencyGraph, fraction: float = DEFAULT_FRACTION) -> HubReport:
    """Nodes whose in/out degrees pass the median-and-balance predicate."""
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction must be in (0, 1], got {fraction}")
    stats = g.degree_stats()
    hubs = []
    for node in sorted(g.nodes):
        in_d = stats.in_degree[node]
        out_d = stats.out_degree[node]
        bound = fraction * (in_d + out_d)
        if in_d > stats.median_in and out_d > stats.median_out and abs(in_d - out_d) < bound:
            hubs.append(HubDetail(node, in_d, out_d, abs(in_d - out_d), bound))
    return HubReport(tuple(hubs), stats.median_in, stats.median_out, fraction)


def _validate_predicted(g_curr: DependencyGraph, predicted: Iterable[Edge]) -> frozenset[Edge]:
    edges = frozenset(predicted)
    for u, v in sorted(edges):
        if u == v:
            raise ValidationError(f"predicted edge {u!r}->{v!r} is a self-dependency")
        if u not in g_curr.nodes or v not in g_curr.nodes:
            raise ValidationError(
                f"predicted edge {u!r}->{v!r} has an endpoint missing from {g_curr.version_id!r}"
            )
        if g_curr.has_edge(u, v):
            raise ValidationError(f"predicted edge {u!r}->{v!r} already exists in {g_curr.version_id!r}")
    return edges


def augmented_graph(g_curr: DependencyGraph, predicted: Iterable[Edge]) -> DependencyGraph:
    """The current graph with all predicted dependencies added at once."""
    edges = _validate_predicted(g_curr, predicted)
    return DependencyGraph(
        version_id=f"{g_curr.version_id}+predicted",
        nodes=g_curr.nodes,
        edges=g_curr.edges | edges,
    )


def cycle_filter(
    g_curr: DependencyGraph,
    predicted: Iterable[Edge],
    max_cycles: int = DEFAULT_MAX_CYCLES,
    *,
    model_id: str = "",
) -> AnticipatedSmells:
    """Anticipated cyclic dependencies caused by the predicted edges.

    Reports every elementary cycle of the augmented graph that runs
    through at least one predicted edge; such cycles cannot exist in the
    current graph.  Triggering edges are the predicted edges lying on a
    reported cycle.
    """
    edges = _validate_predicted(g_curr, predicted)
    g_plus = augmented_graph(g_curr, edges)
    report = detect_cycles(g_plus, max_cycles)
    reported = tuple(
        cycle for cycle in report.cycles
        if any(e in edges for e in cycle_edges(cycle))
    )
    triggering = frozenset(
        e for cycle in reported for e in cycle_edges(cycle) if e in edges
    )
    return AnticipatedSmells(
        smell_kind=CYCLIC_DEPENDENCY,
        triggering_edges=triggering,
        cycles=reported,
        versions=(g_curr.version_id,),
        model_id=model_id,
        max_cycles=max_cycles,
        truncated=report.truncated,
    )


def hub_filter(
    g_curr: DependencyGraph,
    predicted: Iterable[Edge],
    fraction: float = DEFAULT_FRACTION,
    *,
    model_id: str = "",
) -> AnticipatedSmells:
    """Anticipated hub-like dependencies caused by the predicted edges.

    Only nodes incident to a predicted edge are candidates; actual and
    predicted dependencies are analyzed together, so degrees and medians
    both come from the augmented graph.  A candidate is reported when it
    passes the hub predicate there but not on the current graph.  Nodes
    the augmented graph turns into hubs without touching them stay
    unreported; that blind spot is inherent to the candidate rule.
    """
    edges = _validate_predicted(g_curr, predicted)
    g_plus = augmented_graph(g_curr, edges)
    candidates = {node for edge in edges for node in edge}
    plus_hubs = detect_hubs(g_plus, fraction).nodes
    curr_hubs = detect_hubs(g_curr, fraction).nodes
    reported = tuple(sorted((candidates & plus_hubs) - curr_hubs))
    triggering = frozenset(
        (u, v) for u, v in edges if u in reported or v in reported
    )
    return AnticipatedSmells(
        smell_kind=HUB_LIKE,
        triggering_edges=triggering,
        nodes=reported,
        versions=(g_curr.version_id,),
        model_id=model_id,
        fraction=fraction,
    )
