"""Brute-force reference implementations, kept deliberately naive.

These recompute everything from the raw node and edge sets so the
package code under test shares no logic with them.  Slow is fine; they
only run on small inputs.
"""

import math
import statistics
from collections import defaultdict


def undirected_neighbors(edges, node):
    return {b for a, b in edges if a == node} | {a for a, b in edges if b == node}


def brute_topo_features(nodes, edges, u, v):
    nbr = {x: undirected_neighbors(edges, x) for x in nodes}
    gamma_u = nbr[u] - {u, v}
    gamma_v = nbr[v] - {u, v}
    common = gamma_u & gamma_v
    a = len(common)
    n = len(nodes)
    universe = n - 2
    d = universe - len(gamma_u | gamma_v)
    deg_u = len(gamma_u)
    deg_v = len(gamma_v)
    adamic = 0.0
    resource = 0.0
    for z in sorted(common):
        adamic += 1.0 / math.log(len(nbr[z]))
        resource += 1.0 / len(nbr[z])
    return {
        "common_neighbors": float(a),
        "adamic_adar": adamic,
        "resource_allocation": resource,
        "sorensen": 2.0 * a / (deg_u + deg_v) if deg_u + deg_v else 0.0,
        "kulczynski": (a / deg_u + a / deg_v) / 2.0 if deg_u and deg_v else 0.0,
        "russell_rao": a / universe if universe else 0.0,
        "relative_matching": (a + d) / universe if universe else 0.0,
    }


def brute_cycles(nodes, edges):
    """Every elementary cycle, rooted at its smallest node, via path DFS."""
    out = defaultdict(set)
    for a, b in edges:
        out[a].add(b)
    found = []

    def walk(start, node, path, on_path):
        for nxt in sorted(out[node]):
            if nxt == start and len(path) >= 2:
                found.append(tuple(path))
            elif nxt > start and nxt not in on_path:
                path.append(nxt)
                on_path.add(nxt)
                walk(start, nxt, path, on_path)
                on_path.discard(nxt)
                path.pop()

    for start in sorted(nodes):
        walk(start, start, [start], {start})
    return sorted(found)


def brute_hubs(nodes, edges, fraction):
    in_deg = {n: sum(1 for _, b in edges if b == n) for n in nodes}
    out_deg = {n: sum(1 for a, _ in edges if a == n) for n in nodes}
    median_in = statistics.median(in_deg.values())
    median_out = statistics.median(out_deg.values())
    return {
        n
        for n in nodes
        if in_deg[n] > median_in
        and out_deg[n] > median_out
        and abs(in_deg[n] - out_deg[n]) < fraction * (in_deg[n] + out_deg[n])
    }
