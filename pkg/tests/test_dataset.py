"""Training/test set construction, labeling, and the feature table format."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smellcast import (
    ALL_FEATURES,
    ContentCorpus,
    Dataset,
    DependencyGraph,
    Instance,
    build_test_set,
    build_training_set,
    content_features,
    label_for_evaluation,
    load_dataset,
    save_dataset,
    topo_features,
)
from smellcast.dataset import parse_dataset, serialize_dataset
from smellcast.errors import DataError, ParseError, ValidationError

from strategies import directed_graphs, graph_pairs


def test_test_set_is_exactly_the_unconnected_pairs():
    g = DependencyGraph("v2", nodes=["A", "B", "C"], edges=[("A", "B")])
    ds = build_test_set(g)
    assert ds.kind == "test"
    assert ds.versions == ("v2",)
    assert len(ds.instances) == 5  # 6 ordered pairs minus the existing edge
    assert ("A", "B") not in ds.pairs()
    assert all(inst.label is None for inst in ds.instances)


@given(directed_graphs(min_nodes=2, max_nodes=8))
def test_training_set_covers_all_ordered_pairs(g):
    ds = build_training_set(g, DependencyGraph("v2", g.nodes, g.edges))
    m = len(g.nodes)
    assert len(ds.instances) == m * (m - 1)
    assert ds.pairs() == sorted(ds.pairs())


@given(graph_pairs(min_nodes=2, max_nodes=6))
def test_training_labels_are_edge_in_either_version(pair):
    g_prev, g_curr = pair
    ds = build_training_set(g_prev, g_curr)
    for inst in ds.instances:
        expected = g_prev.has_edge(inst.source, inst.target) or g_curr.has_edge(
            inst.source, inst.target
        )
        assert inst.label is expected


def test_training_features_come_from_previous_version():
    g_prev = DependencyGraph("v1", nodes=["A", "B", "C", "D", "E"],
                             edges=[("A", "C"), ("B", "C"), ("C", "D")])
    g_curr = DependencyGraph("v2", g_prev.nodes, g_prev.edges | {("A", "B"), ("D", "E")})
    corpus = ContentCorpus("v1", {("A", "fields"): {"x": 1}, ("B", "fields"): {"x": 1}})
    ds = build_training_set(g_prev, g_curr, corpus)
    assert ds.feature_names == ALL_FEATURES
    row = dict(zip(ds.feature_names, ds.instances[ds.pairs().index(("A", "B"))].features))
    expected = topo_features(g_prev, "A", "B") | content_features(corpus, "A", "B")
    assert row == expected


def test_training_restricted_to_common_nodes():
    g_prev = DependencyGraph("v1", nodes=["A", "B", "gone"], edges=[("A", "B")])
    g_curr = DependencyGraph("v2", nodes=["A", "B", "new"], edges=[("A", "B")])
    ds = build_training_set(g_prev, g_curr)
    nodes = {n for pair in ds.pairs() for n in pair}
    assert nodes == {"A", "B"}


def test_training_needs_common_nodes():
    with pytest.raises(DataError):
        build_training_set(
            DependencyGraph("v1", nodes=["A"]), DependencyGraph("v2", nodes=["B"])
        )
    with pytest.raises(DataError):
        build_training_set(DependencyGraph("v1"), DependencyGraph("v2", nodes=["B"]))


def test_label_for_evaluation_marks_next_version_edges():
    g_curr = DependencyGraph("v2", nodes=["A", "B", "C"], edges=[("A", "B")])
    g_next = DependencyGraph("v3", nodes=["A", "B", "C"], edges=[("A", "B"), ("B", "C")])
    labeled = label_for_evaluation(build_test_set(g_curr), g_next)
    assert labeled.kind == "eval"
    assert labeled.versions == ("v2", "v3")
    by_pair = {(i.source, i.target): i.label for i in labeled.instances}
    assert by_pair[("B", "C")] is True
    assert by_pair[("C", "A")] is False
    assert labeled.annotations["vanished_endpoints"] == "0"


def test_label_for_evaluation_vanished_endpoints_negative():
    g_curr = DependencyGraph("v2", nodes=["A", "B", "C"], edges=[("A", "B")])
    g_next = DependencyGraph("v3", nodes=["A", "B"], edges=[("B", "A")])
    labeled = label_for_evaluation(build_test_set(g_curr), g_next)
    # 4 of the 5 unconnected pairs touch C
    assert labeled.annotations["vanished_endpoints"] == "4"
    by_pair = {(i.source, i.target): i.label for i in labeled.instances}
    assert by_pair[("B", "A")] is True
    assert by_pair[("A", "C")] is False


def test_label_for_evaluation_rejects_labeled_input():
    ds = Dataset(("f",), (Instance("a", "b", (1.0,), True),), "train", ("v1", "v2"))
    with pytest.raises(ValidationError):
        label_for_evaluation(ds, DependencyGraph("v3", nodes=["a", "b"]))


def test_dataset_rejects_duplicates_and_ragged_rows():
    inst = Instance("a", "b", (1.0,), True)
    with pytest.raises(ValidationError):
        Dataset(("f",), (inst, inst), "train", ("v1", "v2"))
    with pytest.raises(ValidationError):
        Dataset(("f", "g"), (inst,), "train", ("v1", "v2"))
    with pytest.raises(ValidationError):
        Dataset(("f",), (Instance("a", "a", (1.0,), True),), "train", ("v1", "v2"))
    with pytest.raises(ValidationError):
        Dataset(("f",), (), "holdout", ("v1",))


def test_project_keeps_selected_columns():
    ds = Dataset(
        ("f", "g", "h"),
        (Instance("a", "b", (1.0, 2.0, 3.0), True),),
        "train",
        ("v1", "v2"),
    )
    projected = ds.project([2, 0])
    assert projected.feature_names == ("h", "f")
    assert projected.instances[0].features == (3.0, 1.0)


def test_serialization_headers_and_round_trip(tmp_path):
    g_prev = DependencyGraph("v1", nodes=["A", "B", "C"], edges=[("A", "B")])
    g_curr = DependencyGraph("v2", nodes=["A", "B", "C"], edges=[("A", "B"), ("B", "C")])
    ds = build_training_set(g_prev, g_curr)
    text = serialize_dataset(ds, extra_annotations={"seed": "42"})
    assert text.startswith("#train v1 v2\n#seed 42\n")
    assert "source\ttarget\t" in text.splitlines()[2]

    target = tmp_path / "train.tsv"
    save_dataset(ds, target, extra_annotations={"seed": "42"})
    again = load_dataset(target)
    assert again.kind == ds.kind
    assert again.versions == ds.versions
    assert again.feature_names == ds.feature_names
    assert again.instances == ds.instances
    assert again.annotations["seed"] == "42"


def test_serialization_unlabeled_round_trip():
    ds = build_test_set(DependencyGraph("v2", nodes=["A", "B", "C"], edges=[("A", "B")]))
    again = parse_dataset(serialize_dataset(ds))
    assert again.instances == ds.instances
    assert again.kind == "test"


def test_parse_dataset_rejects_malformed_tables():
    with pytest.raises(ParseError):
        parse_dataset("source\ttarget\tlabel\n")  # no provenance header
    with pytest.raises(ParseError):
        parse_dataset("#train v1 v2\nwrong\theader\there\n")
    with pytest.raises(ParseError):
        parse_dataset("#train v1 v2\nsource\ttarget\tf\tlabel\na\tb\tnan?\t1\n")
    with pytest.raises(ParseError):
        parse_dataset("#train v1 v2\nsource\ttarget\tf\tlabel\na\tb\t1.0\tmaybe\n")
    with pytest.raises(ParseError):
        parse_dataset("#train v1 v2\nsource\ttarget\tf\tlabel\na\tb\t1.0\n")


def test_exact_float_round_trip():
    # repr() serialization must survive parsing bit for bit
    value = 0.1 + 0.2  # not representable as a short decimal
    ds = Dataset(("f",), (Instance("a", "b", (value,), None),), "test", ("v2",))
    again = parse_dataset(serialize_dataset(ds))
    assert again.instances[0].features[0] == value
