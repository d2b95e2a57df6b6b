"""Generators for synthetic version triples with planted ground truth.

The smell triple plants a learnable content signal: node pairs destined
to connect share a high-count method_usage token, the way a caller's
code starts mentioning its future callee.  Two structural choices keep
the signal clean.  Base communities are chains, so topological indices
are flat and the classifier has to lean on the content channel.  And
every addition between v2 and v3 reverses an existing v2 edge, so the
feature twin of each destined pair is an existing edge and never
competes inside the test set.
"""

import random

from smellcast import ContentCorpus, DependencyGraph, detect_hubs

COMMUNITIES = ("A", "B", "C", "D")
HUB_NODE = "D00"
HOT_COUNT = 40


def _name(community, index):
    return f"{community}{index:02d}"


def _hot_bags(bags, pairs, phase):
    for u, v in pairs:
        token = f"hot_{phase}_{u}_{v}"
        for node in (u, v):
            bags.setdefault((node, "method_usage"), {})[token] = HOT_COUNT


def _corpus(version_id, nodes, hot_pairs_by_phase):
    bags = {}
    for node in nodes:
        bags[(node, "method_usage")] = {f"self_{node}": 1}
    for phase, pairs in hot_pairs_by_phase.items():
        _hot_bags(bags, pairs, phase)
    return ContentCorpus(version_id, bags)


def planted_smell_triple():
    """A 40-node triple where v3 closes planted cycles and raises one hub.

    Returns (g1, g2, g3, corpus1, corpus2, truth) where truth carries the
    planted additions, the unrealized decoy pairs, the hub node, and the
    decision threshold that separates them from the background.  Planted
    pairs score above 0.99 while the best unplanted pair stays below
    0.92, so a 0.95 threshold keeps exactly the planted predictions.
    """
    base_edges = []
    for c in COMMUNITIES:
        base_edges.extend((_name(c, i), _name(c, i + 1)) for i in range(9))
        base_edges.append((_name(c, 0), _name(c, 3)))
    base_edges.append((HUB_NODE, "D02"))  # pre-positions the hub's out-degree

    # mutual additions straddle community boundaries so that community
    # membership alone cannot stand in for the content signal
    mutual = []
    for here, there in zip(COMMUNITIES, COMMUNITIES[1:] + COMMUNITIES[:1]):
        mutual.append((_name(here, 4), _name(there, 7)))
        mutual.append((_name(here, 5), _name(there, 9)))
        mutual.append((_name(here, 6), _name(there, 8)))
    grown_edges = base_edges + [e for u, v in mutual for e in ((u, v), (v, u))]

    closers = [(_name(c, 3), _name(c, 0)) for c in ("A", "B", "C")]
    hub_feeders = [(_name("D", i), HUB_NODE) for i in (1, 2, 3)]
    fillers = [("A02", "A01"), ("B02", "B01")]
    additions = closers + hub_feeders + fillers
    decoys = [("C02", "C01"), ("D02", "D01")]

    g1 = DependencyGraph("v1", edges=base_edges)
    g2 = DependencyGraph("v2", edges=grown_edges)
    g3 = DependencyGraph("v3", edges=grown_edges + additions)

    for u, v in additions + decoys:
        assert g2.has_edge(v, u), f"{(u, v)} is not a reversal of a v2 edge"
        assert not g2.has_edge(u, v), f"{(u, v)} already exists in v2"
    assert detect_hubs(g3).nodes - detect_hubs(g2).nodes == {HUB_NODE}

    nodes = sorted(g1.nodes)
    corpus1 = _corpus("v1", nodes, {"p1": mutual})
    corpus2 = _corpus("v2", nodes, {"p1": mutual, "p2": additions + decoys})
    truth = {
        "additions": additions,
        "decoys": decoys,
        "closers": closers,
        "hub_node": HUB_NODE,
        "threshold": 0.95,
    }
    return g1, g2, g3, corpus1, corpus2, truth


def scale_triple(node_count=100, edge_count=900, seed=1729):
    """A dependency-graph triple at roughly Derby scale."""
    rng = random.Random(seed)
    nodes = [f"pkg{i:03d}" for i in range(node_count)]
    pool = [(u, v) for u in nodes for v in nodes if u != v]
    base_edges = rng.sample(pool, edge_count)
    base = set(base_edges)

    mutual = []
    while len(mutual) < 12:
        u, v = rng.choice(pool)
        if (u, v) not in base and (v, u) not in base:
            mutual.append((u, v))
            base.add((u, v))
            base.add((v, u))
    grown = sorted(base)

    reversible = [(v, u) for u, v in grown if (v, u) not in base]
    additions = rng.sample(reversible, 10)

    g1 = DependencyGraph("v1", nodes=nodes, edges=base_edges)
    g2 = DependencyGraph("v2", nodes=nodes, edges=grown)
    g3 = DependencyGraph("v3", nodes=nodes, edges=grown + additions)
    corpus1 = _corpus("v1", nodes, {"p1": mutual})
    corpus2 = _corpus("v2", nodes, {"p1": mutual, "p2": additions})
    return g1, g2, g3, corpus1, corpus2
