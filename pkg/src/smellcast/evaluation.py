"""Score edge predictions and anticipated smells against the next version.

Edge scoring compares hard predicted labels with the realized labels
over identical pair sets.  Smell scoring counts per-unit outcomes: the
unit is a triggering edge for cyclic dependencies and a node for
hub-like dependencies.  Units that could not have been predicted, such
as edges or hubs involving packages absent from the current version,
stay out of the bookkeeping on both sides.

All ratio metrics use the 0/0 -> 0 convention; comparisons between runs
depend on it, so it is part of the contract, not an implementation
detail.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .classifier import PredictionSet
from .dataset import Dataset
from .errors import DataError, SchemaError, ValidationError
from .graph import DependencyGraph, NodeId
from .smells import (
    CYCLIC_DEPENDENCY,
    DEFAULT_FRACTION,
    HUB_LIKE,
    AnticipatedSmells,
    detect_hubs,
)

Edge = tuple[NodeId, NodeId]


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class MetricsReport:
    subject: str
    precision: float
    recall: float
    f1: float
    weighted_f: float
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for name in ("precision", "recall", "f1", "weighted_f"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValidationError("confusion counts must be non-negative")

    @classmethod
    def from_counts(cls, subject: str, tp: int, fp: int, fn: int, tn: int) -> "MetricsReport":
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = _ratio_f1(precision, recall)
        neg_precision = _ratio(tn, tn + fn)
        neg_recall = _ratio(tn, tn + fp)
        neg_f1 = _ratio_f1(neg_precision, neg_recall)
        support_pos = tp + fn
        support_neg = tn + fp
        total = support_pos + support_neg
        weighted_f = (support_pos * f1 + support_neg * neg_f1) / total if total else 0.0
        return cls(subject, precision, recall, f1, weighted_f, tp, fp, fn, tn)


def _ratio_f1(precision: float, recall: float) -> float:
    s = precision + recall
    return 2.0 * precision * recall / s if s else 0.0


def edge_metrics(pred: PredictionSet, truth: Dataset) -> MetricsReport:
    """Confusion metrics of hard edge predictions against realized labels.

    ``truth`` must be fully labeled and cover exactly the predicted
    pairs.
    """
    if not truth.labeled:
        raise DataError("edge_metrics needs a fully labeled dataset")
    truth_labels = {(inst.source, inst.target): bool(inst.label) for inst in truth.instances}
    if set(pred.pairs) != set(truth_labels):
        missing = sorted(set(truth_labels) - set(pred.pairs))[:3]
        extra = sorted(set(pred.pairs) - set(truth_labels))[:3]
        raise SchemaError(
            f"prediction and truth pair sets differ (e.g. missing {missing}, extra {extra})"
        )
    tp = fp = fn = tn = 0
    for pair, predicted in zip(pred.pairs, pred.predicted_labels):
        actual = truth_labels[pair]
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return MetricsReport.from_counts("edges", tp, fp, fn, tn)


def _closes_cycle(g: DependencyGraph, edge: Edge) -> bool:
    """True when the edge lies on an elementary cycle of ``g``.

    Equivalent to: the target can reach the source again, since the
    edge itself provides the forward step and a shortest return path is
    node-disjoint.
    """
    source, target = edge
    if not g.has_edge(source, target):
        return False
    seen = {target}
    queue = deque([target])
    while queue:
        u = queue.popleft()
        if u == source:
            return True
        for w in g.neighbors(u, "out"):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return False


def _cycle_smell_metrics(
    anticipated: AnticipatedSmells, g_curr: DependencyGraph, g_next: DependencyGraph
) -> MetricsReport:
    triggering = set(anticipated.triggering_edges)
    added = {
        (u, v)
        for (u, v) in g_next.edges - g_curr.edges
        if u in g_curr.nodes and v in g_curr.nodes
    }
    actual_positive = {e for e in added if _closes_cycle(g_next, e)}
    tp = sum(1 for e in triggering if e in actual_positive)
    fp = len(triggering) - tp
    fn = len(actual_positive - triggering)
    universe = added | triggering
    tn = len(universe) - tp - fp - fn
    return MetricsReport.from_counts(CYCLIC_DEPENDENCY, tp, fp, fn, tn)


def _hub_smell_metrics(
    anticipated: AnticipatedSmells,
    g_curr: DependencyGraph,
    g_next: DependencyGraph,
    fraction: float,
) -> MetricsReport:
    curr_hubs = detect_hubs(g_curr, fraction).nodes
    next_hubs = detect_hubs(g_next, fraction).nodes
    new_hubs = {n for n in next_hubs - curr_hubs if n in g_curr.nodes}
    reported = set(anticipated.nodes)
    tp = len(reported & new_hubs)
    fp = len(reported) - tp
    fn = len(new_hubs - reported)
    universe = (g_curr.nodes & g_next.nodes) | reported
    tn = len(universe) - tp - fp - fn
    return MetricsReport.from_counts(HUB_LIKE, tp, fp, fn, tn)


def smell_metrics(
    anticipated: AnticipatedSmells,
    g_curr: DependencyGraph,
    g_next: DependencyGraph,
    fraction: float | None = None,
) -> MetricsReport:
    """Score an anticipated-smell report against the realized next version.

    Cyclic dependencies are scored per triggering edge: a true positive
    is a triggering edge that exists in the next version and lies on a
    cycle there; missed positives are added edges that close a cycle
    without having been flagged.  Hub-like dependencies are scored per
    node against the set of newly emerged hubs.  Edges and hubs whose
    packages did not exist in the current version are disregarded.
    """
    if anticipated.smell_kind == CYCLIC_DEPENDENCY:
        return _cycle_smell_metrics(anticipated, g_curr, g_next)
    if anticipated.smell_kind == HUB_LIKE:
        if fraction is None:
            fraction = anticipated.fraction if anticipated.fraction is not None else DEFAULT_FRACTION
        return _hub_smell_metrics(anticipated, g_curr, g_next, fraction)
    raise ValidationError(f"cannot score smell kind {anticipated.smell_kind!r}")
