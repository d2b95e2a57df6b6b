"""Edge and smell scoring against a realized next version."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smellcast import (
    Dataset,
    DependencyGraph,
    Instance,
    MetricsReport,
    PredictionSet,
    cycle_filter,
    edge_metrics,
    hub_filter,
    smell_metrics,
)
from smellcast.errors import DataError, SchemaError, ValidationError

from oracles import brute_cycles, brute_hubs
from strategies import graph_pairs


def truth_dataset(labels):
    instances = tuple(
        Instance(u, v, (0.0,), flag) for (u, v), flag in sorted(labels.items())
    )
    return Dataset(("f0",), instances, "eval", ("v2", "v3"))


def prediction_set(probs, threshold=0.5):
    pairs = tuple(sorted(probs))
    return PredictionSet(pairs, tuple(probs[p] for p in pairs), threshold, ("v2",))


# --- edge metrics ---


def test_edge_metrics_mixed_outcome():
    pred = prediction_set(
        {("a", "b"): 0.9, ("a", "c"): 0.8, ("b", "a"): 0.7, ("b", "c"): 0.6}
    )
    truth = truth_dataset(
        {("a", "b"): True, ("a", "c"): False, ("b", "a"): True, ("b", "c"): False}
    )
    report = edge_metrics(pred, truth)
    assert (report.tp, report.fp, report.fn, report.tn) == (2, 2, 0, 0)
    assert report.precision == 0.5
    assert report.recall == 1.0
    assert report.f1 == pytest.approx(2 / 3)
    assert report.weighted_f == pytest.approx(1 / 3)  # negative-class F1 is 0
    assert report.subject == "edges"


def test_edge_metrics_all_correct():
    pred = prediction_set({("a", "b"): 0.9, ("b", "a"): 0.1})
    truth = truth_dataset({("a", "b"): True, ("b", "a"): False})
    report = edge_metrics(pred, truth)
    assert report.precision == report.recall == report.f1 == report.weighted_f == 1.0


def test_edge_metrics_zero_over_zero_convention():
    pred = prediction_set({("a", "b"): 0.1, ("b", "a"): 0.2})
    truth = truth_dataset({("a", "b"): False, ("b", "a"): False})
    report = edge_metrics(pred, truth)
    assert report.precision == 0.0
    assert report.recall == 0.0
    assert report.f1 == 0.0
    assert report.weighted_f == 1.0  # equals the negative-class F1 here


def test_edge_metrics_requires_labels_and_matching_pairs():
    pred = prediction_set({("a", "b"): 0.9})
    unlabeled = Dataset(
        ("f0",), (Instance("a", "b", (0.0,), None),), "test", ("v2",)
    )
    with pytest.raises(DataError):
        edge_metrics(pred, unlabeled)
    with pytest.raises(SchemaError):
        edge_metrics(pred, truth_dataset({("a", "b"): True, ("x", "y"): False}))


@given(
    st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20)
)
def test_weighted_f_lies_between_class_f_scores(tp, fp, fn, tn):
    report = MetricsReport.from_counts("x", tp, fp, fn, tn)
    flipped = MetricsReport.from_counts("x", tn, fn, fp, tp)  # negative class view
    lo, hi = sorted((report.f1, flipped.f1))
    assert lo - 1e-12 <= report.weighted_f <= hi + 1e-12


def test_metrics_report_validation():
    with pytest.raises(ValidationError):
        MetricsReport("x", 1.5, 0.0, 0.0, 0.0, 1, 0, 0, 0)
    with pytest.raises(ValidationError):
        MetricsReport("x", 0.5, 0.5, 0.5, 0.5, -1, 0, 0, 0)


# --- cyclic-dependency smell metrics ---

CURR = DependencyGraph("v2", edges=[("A", "B"), ("B", "C")])
ANTICIPATED = cycle_filter(CURR, [("C", "A")])


def test_cycle_smell_realized():
    g_next = DependencyGraph("v3", edges=[("A", "B"), ("B", "C"), ("C", "A")])
    report = smell_metrics(ANTICIPATED, CURR, g_next)
    assert (report.tp, report.fp, report.fn, report.tn) == (1, 0, 0, 0)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert report.subject == "cyclic-dependency"


def test_cycle_smell_unrealized_prediction():
    report = smell_metrics(ANTICIPATED, CURR, DependencyGraph("v3", edges=CURR.edges))
    assert (report.tp, report.fp, report.fn, report.tn) == (0, 1, 0, 0)
    assert report.precision == 0.0
    assert report.recall == 0.0


def test_cycle_smell_missed_closure():
    g_next = DependencyGraph("v3", edges=[("A", "B"), ("B", "C"), ("B", "A")])
    report = smell_metrics(ANTICIPATED, CURR, g_next)
    assert (report.tp, report.fp, report.fn, report.tn) == (0, 1, 1, 0)


def test_cycle_smell_edge_realized_without_cycle():
    # the predicted edge appears, but A->B vanished so nothing closes
    g_next = DependencyGraph("v3", edges=[("B", "C"), ("C", "A")])
    report = smell_metrics(ANTICIPATED, CURR, g_next)
    assert (report.tp, report.fp, report.fn, report.tn) == (0, 1, 0, 0)


def test_cycle_smell_ignores_edges_of_new_packages():
    g_next = DependencyGraph(
        "v3",
        edges=[("A", "B"), ("B", "C"), ("C", "A"), ("C", "Z"), ("Z", "A")],
    )
    report = smell_metrics(ANTICIPATED, CURR, g_next)
    assert report.recall == 1.0
    assert report.fn == 0


def closes_by_enumeration(g, edge):
    cycles = brute_cycles(g.nodes, g.edges)
    u, v = edge
    for cycle in cycles:
        for i, node in enumerate(cycle):
            if node == u and cycle[(i + 1) % len(cycle)] == v:
                return True
    return False


@st.composite
def evaluation_scenarios(draw):
    g_curr, g_next = draw(graph_pairs(min_nodes=3, max_nodes=6))
    pool = sorted(
        (u, v)
        for u in g_curr.nodes
        for v in g_curr.nodes
        if u != v and (u, v) not in g_curr.edges
    )
    predicted = draw(st.lists(st.sampled_from(pool), max_size=4, unique=True)) if pool else []
    return g_curr, g_next, predicted


@settings(max_examples=100, deadline=None)
@given(evaluation_scenarios())
def test_cycle_smell_counts_match_brute_force(scenario):
    g_curr, g_next, predicted = scenario
    anticipated = cycle_filter(g_curr, predicted, max_cycles=100_000)
    report = smell_metrics(anticipated, g_curr, g_next)
    triggering = set(anticipated.triggering_edges)
    added = {
        e
        for e in set(g_next.edges) - set(g_curr.edges)
        if e[0] in g_curr.nodes and e[1] in g_curr.nodes
    }
    actual = {e for e in added if closes_by_enumeration(g_next, e)}
    assert report.tp == len(triggering & actual)
    assert report.fn == len(actual - triggering)
    assert report.tp + report.fp == len(triggering)
    assert report.tp + report.fn == len(actual)


# --- hub-like smell metrics ---

HUB_CURR = DependencyGraph(
    "v2",
    nodes=["C", "D", "E"],
    edges=[("A", "X"), ("B", "X")],
)
HUB_PREDICTED = [("C", "X"), ("X", "D"), ("X", "E")]
HUB_NEXT = DependencyGraph("v3", edges=HUB_CURR.edges | frozenset(HUB_PREDICTED))


def test_hub_smell_realized():
    anticipated = hub_filter(HUB_CURR, HUB_PREDICTED, fraction=0.25)
    assert anticipated.nodes == ("X",)
    report = smell_metrics(anticipated, HUB_CURR, HUB_NEXT)
    assert (report.tp, report.fp, report.fn) == (1, 0, 0)
    assert report.tn == 5  # remaining shared nodes
    assert report.subject == "hub-like"


def test_hub_smell_unrealized_prediction():
    anticipated = hub_filter(HUB_CURR, HUB_PREDICTED, fraction=0.25)
    g_next = DependencyGraph("v3", nodes=["C", "D", "E"], edges=HUB_CURR.edges)
    report = smell_metrics(anticipated, HUB_CURR, g_next)
    assert (report.tp, report.fp, report.fn, report.tn) == (0, 1, 0, 5)


def test_hub_smell_fraction_fallback_and_override():
    # X has in=3, out=2 in the next version: a hub at 0.25 (1 < 1.25)
    # but not at 0.1 (1 < 0.5 fails)
    anticipated = hub_filter(HUB_CURR, HUB_PREDICTED[:-1] + [("X", "D")], fraction=0.25)
    g_next = DependencyGraph("v3", edges=HUB_CURR.edges | {("C", "X"), ("X", "D"), ("X", "E")})
    strict = smell_metrics(anticipated, HUB_CURR, g_next, fraction=0.1)
    fallback = smell_metrics(anticipated, HUB_CURR, g_next)
    assert fallback.tp + fallback.fn >= 1  # X counted as a new hub at 0.25
    assert strict.tp == 0 and strict.fn == 0  # no new hubs at 0.1


def test_hub_smell_missed_hubs():
    ring = DependencyGraph(
        "v2",
        edges=[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "a")],
    )
    anticipated = hub_filter(ring, [("a", "c")], fraction=0.25)
    assert anticipated.nodes == ()
    g_next = DependencyGraph(
        "v3",
        edges=ring.edges | {("a", "c"), ("a", "d"), ("c", "a"), ("d", "a")},
    )
    report = smell_metrics(anticipated, ring, g_next)
    assert report.tp == 0
    assert report.fp == 0
    assert report.fn == 3  # a, c and d all emerge as hubs
    assert report.recall == 0.0


def test_hub_smell_ignores_new_package_hubs():
    ring = DependencyGraph(
        "v2",
        edges=[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "a")],
    )
    anticipated = hub_filter(ring, [("a", "c")], fraction=0.25)
    g_next = DependencyGraph(
        "v3",
        edges=ring.edges | {("a", "Q"), ("b", "Q"), ("c", "Q"), ("Q", "d"), ("Q", "e"), ("Q", "f")},
    )
    report = smell_metrics(anticipated, ring, g_next)
    assert report.fn == 0
    assert report.weighted_f == 1.0


@settings(max_examples=100, deadline=None)
@given(evaluation_scenarios(), st.sampled_from((0.1, 0.25, 0.5)))
def test_hub_smell_counts_match_brute_force(scenario, fraction):
    g_curr, g_next, predicted = scenario
    anticipated = hub_filter(g_curr, predicted, fraction)
    report = smell_metrics(anticipated, g_curr, g_next)
    reported = set(anticipated.nodes)
    new_hubs = {
        n
        for n in brute_hubs(g_next.nodes, g_next.edges, fraction)
        - brute_hubs(g_curr.nodes, g_curr.edges, fraction)
        if n in g_curr.nodes
    }
    assert report.tp == len(reported & new_hubs)
    assert report.fp == len(reported - new_hubs)
    assert report.fn == len(new_hubs - reported)
    assert report.tp + report.fp == len(reported)
