"""Node-pair features and information-gain feature selection.

Seven topological similarity indices are computed on the undirected
projection of the dependency graph, followed by one cosine-similarity
score per content channel.  The canonical feature order is fixed so
that datasets, models, and reports all line up::

    common_neighbors, adamic_adar, resource_allocation, sorensen,
    kulczynski, russell_rao, relative_matching,
    cosine_fields, cosine_methods, cosine_comments,
    cosine_method_usage, cosine_variable_defs

For a pair (u, v) the neighbor sets exclude u and v themselves, so the
candidate edge never counts toward its own score.  With a = |common
neighbors|, d = |nodes adjacent to neither|, and n = |all nodes|:

    common_neighbors    = a
    adamic_adar         = sum over common z of 1 / ln(degree(z))
    resource_allocation = sum over common z of 1 / degree(z)
    sorensen            = 2a / (|N(u)| + |N(v)|)
    kulczynski          = (a/|N(u)| + a/|N(v)|) / 2
    russell_rao         = a / (n - 2)
    relative_matching   = (a + d) / (n - 2)

where degree(z) is z's full undirected degree.  Ratios with a zero
denominator are defined as 0.  Sums run in sorted node order so results
are bit-reproducible.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .content import CHANNELS, ContentCorpus, cosine_similarity, package_bag
from .errors import DataError, ValidationError
from .graph import DependencyGraph, NodeId

if TYPE_CHECKING:  # avoids an import cycle with the dataset builders
    from .dataset import Dataset

TOPO_FEATURES = (
    "common_neighbors",
    "adamic_adar",
    "resource_allocation",
    "sorensen",
    "kulczynski",
    "russell_rao",
    "relative_matching",
)
CONTENT_FEATURES = tuple(f"cosine_{channel}" for channel in CHANNELS)
ALL_FEATURES = TOPO_FEATURES + CONTENT_FEATURES


@dataclass(frozen=True)
class PairContext:
    """Contingency counts for a node pair over the universe V \\ {u, v}."""

    u: NodeId
    v: NodeId
    gamma_u: frozenset[NodeId]
    gamma_v: frozenset[NodeId]
    a: int  # |gamma_u & gamma_v|
    b: int  # |gamma_u - gamma_v|
    c: int  # |gamma_v - gamma_u|
    d: int  # neither
    n: int  # |V|


def pair_context(g: DependencyGraph, u: NodeId, v: NodeId) -> PairContext:
    if u == v:
        raise ValidationError(f"pair features need two distinct nodes, got {u!r} twice")
    pair = {u, v}
    gamma_u = g.neighbors(u, "all") - pair
    gamma_v = g.neighbors(v, "all") - pair
    common = gamma_u & gamma_v
    n = len(g.nodes)
    a = len(common)
    b = len(gamma_u) - a
    c = len(gamma_v) - a
    d = n - 2 - a - b - c
    return PairContext(u, v, gamma_u, gamma_v, a, b, c, d, n)


def topo_features(g: DependencyGraph, u: NodeId, v: NodeId) -> dict[str, float]:
    """The seven topological indices for (u, v), in canonical order."""
    ctx = pair_context(g, u, v)
    a = ctx.a
    deg_u = len(ctx.gamma_u)
    deg_v = len(ctx.gamma_v)
    universe = ctx.n - 2

    adamic = 0.0
    resource = 0.0
    for z in sorted(ctx.gamma_u & ctx.gamma_v):
        degree = len(g.neighbors(z, "all"))
        adamic += 1.0 / math.log(degree)
        resource += 1.0 / degree
    return {
        "common_neighbors": float(a),
        "adamic_adar": adamic,
        "resource_allocation": resource,
        "sorensen": 2.0 * a / (deg_u + deg_v) if deg_u + deg_v else 0.0,
        "kulczynski": (a / deg_u + a / deg_v) / 2.0 if deg_u and deg_v else 0.0,
        "russell_rao": a / universe if universe else 0.0,
        "relative_matching": (a + ctx.d) / universe if universe else 0.0,
    }


def content_features(
    corpus: ContentCorpus, u: NodeId, v: NodeId, *, hierarchy: bool = True
) -> dict[str, float]:
    """One cosine score per channel; missing content scores 0."""
    if u == v:
        raise ValidationError(f"pair features need two distinct nodes, got {u!r} twice")
    scores: dict[str, float] = {}
    for channel in CHANNELS:
        bag_u = package_bag(corpus, u, channel, hierarchy=hierarchy)
        bag_v = package_bag(corpus, v, channel, hierarchy=hierarchy)
        scores[f"cosine_{channel}"] = cosine_similarity(bag_u, bag_v)
    return scores


def _entropy(counts: Counter) -> float:
    """Shannon entropy in bits of a label count distribution."""
    total = sum(counts.values())
    if total == 0:
        return 0.0
    entropy = 0.0
    for count in counts.values():
        if count:
            p = count / total
            entropy -= p * math.log2(p)
    return entropy


def information_gain(ds: Dataset, bins: int = 10) -> list[tuple[str, float]]:
    """Rank features by label-entropy reduction after equal-width binning.

    Each feature is discretized into ``bins`` equal-width bins over its
    observed [min, max] (constant features collapse to one bin).  The
    result is sorted by descending gain, ties broken by the dataset's
    feature order.  Requires a labeled dataset with both classes.
    """
    if bins <= 0:
        raise ValidationError(f"bins must be positive, got {bins}")
    if not ds.instances:
        raise DataError("information gain needs a non-empty dataset")
    labels = [inst.label for inst in ds.instances]
    if any(label is None for label in labels):
        raise DataError("information gain needs a labeled dataset")
    if len(set(labels)) < 2:
        raise DataError("information gain is degenerate on a single-label dataset")

    base_entropy = _entropy(Counter(labels))
    total = len(labels)
    gains: list[tuple[str, float]] = []
    for j, name in enumerate(ds.feature_names):
        values = [inst.features[j] for inst in ds.instances]
        lo, hi = min(values), max(values)
        if hi == lo:
            binned = [0] * total
        else:
            width = (hi - lo) / bins
            binned = [min(int((x - lo) / width), bins - 1) for x in values]
        per_bin: dict[int, Counter] = {}
        for idx, label in zip(binned, labels):
            per_bin.setdefault(idx, Counter())[label] += 1
        conditional = sum(
            (sum(counts.values()) / total) * _entropy(counts) for counts in per_bin.values()
        )
        gains.append((name, max(base_entropy - conditional, 0.0)))

    order = {name: i for i, name in enumerate(ds.feature_names)}
    gains.sort(key=lambda item: (-item[1], order[item[0]]))
    return gains


def select_features(
    ds: Dataset,
    *,
    top_k: int | None = None,
    min_gain: float | None = None,
    bins: int = 10,
) -> Dataset:
    """Project the dataset onto the features retained by the policy.

    Exactly one of ``top_k`` (keep the k highest-gain features) or
    ``min_gain`` (keep features with gain strictly above the threshold)
    must be given.  Retained features keep their canonical order, and
    the selection is recorded in the dataset annotations.
    """
    if (top_k is None) == (min_gain is None):
        raise ValidationError("exactly one of top_k or min_gain must be given")
    ranked = information_gain(ds, bins=bins)
    if top_k is not None:
        if top_k <= 0 or top_k > len(ds.feature_names):
            raise ValidationError(
                f"top_k must be in 1..{len(ds.feature_names)}, got {top_k}"
            )
        keep = {name for name, _ in ranked[:top_k]}
        policy = f"top_k={top_k}"
    else:
        keep = {name for name, gain in ranked if gain > min_gain}
        policy = f"min_gain={min_gain!r}"
    indices = [j for j, name in enumerate(ds.feature_names) if name in keep]
    annotations = dict(ds.annotations)
    annotations["feature_selection"] = f"{policy} bins={bins}"
    annotations["selected_features"] = ",".join(ds.feature_names[j] for j in indices)
    return ds.project(indices, annotations=annotations)
