"""Labeled node-pair datasets built from consecutive version graphs.

Training sets span two versions: every ordered pair of nodes common to
v_{n-1} and v_n becomes an instance, featured on the older graph, and
labeled positive when the dependency exists in either version.  Pairs
absent from both versions are guaranteed negatives.  Test sets are the
unconnected ordered pairs of the current version, unlabeled, with no
under-sampling of negatives.

Dataset files are tab-separated feature tables with a provenance
header::

    #train 10.4.1.0 10.4.2.0
    #seed 42
    source  target  common_neighbors  ...  label
    a.b     a.c     2.0               ...  1

``#train <prev> <curr>`` / ``#test <curr>`` / ``#eval <curr> <next>``
identify the construction; other ``#key value`` lines carry free-form
annotations.  The label column is empty for unlabeled instances.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .content import CHANNELS, ContentCorpus, cosine_similarity, package_bag
from .errors import DataError, ParseError, ValidationError
from .graph import DependencyGraph, NodeId

logger = logging.getLogger(__name__)

DATASET_KINDS = ("train", "test", "eval")


@dataclass(frozen=True)
class Instance:
    source: NodeId
    target: NodeId
    features: tuple[float, ...]
    label: bool | None = None


@dataclass(frozen=True)
class Dataset:
    feature_names: tuple[str, ...]
    instances: tuple[Instance, ...]
    kind: str
    versions: tuple[str, ...]
    annotations: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in DATASET_KINDS:
            raise ValidationError(f"dataset kind must be one of {DATASET_KINDS}, got {self.kind!r}")
        seen: set[tuple[NodeId, NodeId]] = set()
        for inst in self.instances:
            if inst.source == inst.target:
                raise ValidationError(f"instance with source == target: {inst.source!r}")
            if len(inst.features) != len(self.feature_names):
                raise ValidationError(
                    f"instance ({inst.source}, {inst.target}) has {len(inst.features)} "
                    f"features, expected {len(self.feature_names)}"
                )
            key = (inst.source, inst.target)
            if key in seen:
                raise ValidationError(f"duplicate pair {key!r} in dataset")
            seen.add(key)

    @property
    def labeled(self) -> bool:
        return all(inst.label is not None for inst in self.instances)

    def pairs(self) -> list[tuple[NodeId, NodeId]]:
        return [(inst.source, inst.target) for inst in self.instances]

    def label_counts(self) -> tuple[int, int]:
        """(positives, negatives) among labeled instances."""
        pos = sum(1 for inst in self.instances if inst.label is True)
        neg = sum(1 for inst in self.instances if inst.label is False)
        return pos, neg

    def project(self, indices: list[int], annotations: Mapping[str, str] | None = None) -> "Dataset":
        """Keep only the feature columns at ``indices`` (in that order)."""
        names = tuple(self.feature_names[j] for j in indices)
        instances = tuple(
            replace(inst, features=tuple(inst.features[j] for j in indices))
            for inst in self.instances
        )
        return Dataset(
            names, instances, self.kind, self.versions,
            dict(annotations) if annotations is not None else dict(self.annotations),
        )


class _PairFeaturer:
    """Caches per-node data so featuring all pairs of a graph is cheap."""

    def __init__(self, g: DependencyGraph, corpus: ContentCorpus | None, hierarchy: bool):
        self.g = g
        self.n = len(g.nodes)
        self.gamma: dict[NodeId, frozenset[NodeId]] = {
            node: g.neighbors(node, "all") for node in g.nodes
        }
        corpus = corpus or ContentCorpus()
        self.bags: dict[tuple[NodeId, str], dict[str, int]] = {}
        for node in g.nodes:
            for channel in CHANNELS:
                self.bags[(node, channel)] = package_bag(
                    corpus, node, channel, hierarchy=hierarchy
                )

    def features(self, u: NodeId, v: NodeId) -> tuple[float, ...]:
        pair = {u, v}
        gamma_u = self.gamma[u] - pair
        gamma_v = self.gamma[v] - pair
        common = gamma_u & gamma_v
        a = len(common)
        deg_u = len(gamma_u)
        deg_v = len(gamma_v)
        universe = self.n - 2
        d = universe - len(gamma_u | gamma_v)

        adamic = 0.0
        resource = 0.0
        for z in sorted(common):
            degree = len(self.gamma[z])
            adamic += 1.0 / math.log(degree)
            resource += 1.0 / degree
        row = [
            float(a),
            adamic,
            resource,
            2.0 * a / (deg_u + deg_v) if deg_u + deg_v else 0.0,
            (a / deg_u + a / deg_v) / 2.0 if deg_u and deg_v else 0.0,
            a / universe if universe else 0.0,
            (a + d) / universe if universe else 0.0,
        ]
        for channel in CHANNELS:
            row.append(cosine_similarity(self.bags[(u, channel)], self.bags[(v, channel)]))
        return tuple(row)


def _feature_names() -> tuple[str, ...]:
    from .features import ALL_FEATURES

    return ALL_FEATURES


def build_training_set(
    g_prev: DependencyGraph,
    g_curr: DependencyGraph,
    corpus_prev: ContentCorpus | None = None,
    *,
    hierarchy: bool = True,
) -> Dataset:
    """All ordered pairs over the common nodes, featured on the older graph.

    A pair is positive when the dependency exists in either version; a
    pair connected in neither version is guaranteed not to appear next
    and is negative.  Instances are in lexicographic pair order.
    """
    if not g_prev.nodes or not g_curr.nodes:
        raise DataError("training needs two non-empty graphs")
    common_nodes = sorted(g_prev.nodes & g_curr.nodes)
    if not common_nodes:
        raise DataError(
            f"versions {g_prev.version_id!r} and {g_curr.version_id!r} share no nodes"
        )
    featurer = _PairFeaturer(g_prev, corpus_prev, hierarchy)
    instances = []
    for u in common_nodes:
        for v in common_nodes:
            if u == v:
                continue
            label = g_prev.has_edge(u, v) or g_curr.has_edge(u, v)
            instances.append(Instance(u, v, featurer.features(u, v), label))
    return Dataset(
        _feature_names(),
        tuple(instances),
        "train",
        (g_prev.version_id, g_curr.version_id),
    )


def build_test_set(
    g_curr: DependencyGraph,
    corpus_curr: ContentCorpus | None = None,
    *,
    hierarchy: bool = True,
) -> Dataset:
    """Exactly the unconnected ordered pairs of the current version."""
    if not g_curr.nodes:
        raise DataError("test-set construction needs a non-empty graph")
    featurer = _PairFeaturer(g_curr, corpus_curr, hierarchy)
    ordered = sorted(g_curr.nodes)
    instances = []
    for u in ordered:
        for v in ordered:
            if u == v or g_curr.has_edge(u, v):
                continue
            instances.append(Instance(u, v, featurer.features(u, v), None))
    return Dataset(_feature_names(), tuple(instances), "test", (g_curr.version_id,))


def label_for_evaluation(test: Dataset, g_next: DependencyGraph) -> Dataset:
    """Label a test set against the realized next version.

    Positive iff the pair is an edge of the next version.  Pairs whose
    endpoints vanished are labeled negative; their count is recorded in
    the ``vanished_endpoints`` annotation.
    """
    if any(inst.label is not None for inst in test.instances):
        raise ValidationError("label_for_evaluation expects an unlabeled test set")
    vanished = 0
    instances = []
    for inst in test.instances:
        if inst.source not in g_next.nodes or inst.target not in g_next.nodes:
            vanished += 1
            instances.append(replace(inst, label=False))
        else:
            instances.append(replace(inst, label=g_next.has_edge(inst.source, inst.target)))
    if vanished:
        logger.warning(
            "%d test pairs lost an endpoint in %s; labeled negative",
            vanished,
            g_next.version_id,
        )
    annotations = dict(test.annotations)
    annotations["vanished_endpoints"] = str(vanished)
    return Dataset(
        test.feature_names,
        tuple(instances),
        "eval",
        test.versions + (g_next.version_id,),
        annotations,
    )


def serialize_dataset(ds: Dataset, *, extra_annotations: Mapping[str, str] | None = None) -> str:
    lines = [f"#{ds.kind} {' '.join(ds.versions)}".rstrip()]
    annotations = dict(ds.annotations)
    if extra_annotations:
        annotations.update(extra_annotations)
    for key in sorted(annotations):
        lines.append(f"#{key} {annotations[key]}")
    lines.append("\t".join(("source", "target") + ds.feature_names + ("label",)))
    for inst in ds.instances:
        label = "" if inst.label is None else ("1" if inst.label else "0")
        row = [inst.source, inst.target]
        row.extend(repr(x) for x in inst.features)
        row.append(label)
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def parse_dataset(text: str, *, path: str | None = None) -> Dataset:
    lines = text.splitlines()
    kind = ""
    versions: tuple[str, ...] = ()
    annotations: dict[str, str] = {}
    header_row: list[str] | None = None
    instances: list[Instance] = []
    n_features = 0
    feature_names: tuple[str, ...] = ()

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if not parts:
                continue
            if parts[0] in DATASET_KINDS and not kind:
                kind = parts[0]
                versions = tuple(parts[1:])
            else:
                annotations[parts[0]] = line[1:].split(maxsplit=1)[1] if len(parts) > 1 else ""
            continue
        if header_row is None:
            header_row = line.split("\t")
            if header_row[:2] != ["source", "target"] or header_row[-1] != "label":
                raise ParseError(
                    "header must be 'source<TAB>target<TAB><features...><TAB>label'",
                    path=path,
                    line=lineno,
                )
            feature_names = tuple(header_row[2:-1])
            n_features = len(feature_names)
            continue
        cells = line.split("\t")
        if len(cells) != n_features + 3:
            raise ParseError(
                f"expected {n_features + 3} columns, got {len(cells)}", path=path, line=lineno
            )
        try:
            feats = tuple(float(c) for c in cells[2:-1])
        except ValueError as exc:
            raise ParseError(f"bad feature value: {exc}", path=path, line=lineno) from None
        raw_label = cells[-1]
        if raw_label == "":
            label = None
        elif raw_label in ("0", "1"):
            label = raw_label == "1"
        else:
            raise ParseError(f"label must be '', '0' or '1', got {raw_label!r}", path=path, line=lineno)
        instances.append(Instance(cells[0], cells[1], feats, label))
    if not kind:
        raise ParseError("missing provenance header (#train/#test/#eval)", path=path, line=1)
    if header_row is None:
        raise ParseError("missing header row", path=path, line=1)
    return Dataset(feature_names, tuple(instances), kind, versions, annotations)


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    return parse_dataset(path.read_text(encoding="utf-8"), path=str(path))


def save_dataset(ds: Dataset, path: str | Path, *, extra_annotations: Mapping[str, str] | None = None) -> None:
    Path(path).write_text(serialize_dataset(ds, extra_annotations=extra_annotations), encoding="utf-8")
