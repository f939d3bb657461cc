"""Selecting host nodes and splicing a trigger subgraph into a graph.

Injection picks ``t`` host nodes by a strategy, maps them to the trigger's
nodes by a random bijection, deletes every existing edge inside the selected
set, and adds the trigger's edges under the mapping.  Edges with at most one
endpoint in the set are untouched.  Hosts smaller than the trigger are
replaced by the trigger outright.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .graph import Graph
from .triggers import Trigger

__all__ = [
    "InjectionStrategy",
    "select_nodes",
    "inject",
    "inject_detailed",
    "densest_subset",
]


class InjectionStrategy(str, Enum):
    RANDOM = "random"
    MAX_DEGREE = "max_degree"
    MIN_DEGREE = "min_degree"
    DENSELY_CONNECTED = "densely_connected"


def densest_subset(g: Graph, t: int) -> list[int]:
    """Deterministic greedy heuristic for the densest ``t``-node subset.

    Peels minimum-degree nodes until ``t`` remain, then applies single-node
    swaps while any swap strictly increases the induced edge count.  Ties
    favor lower-indexed nodes (a complete or empty graph yields the
    lexicographically smallest set).  Exact densest-k is NP-hard; this is a
    reproducible stand-in that is locally optimal under single swaps.
    """
    n = g.node_count
    if t < 1 or t > n:
        raise ValueError(f"need 1 <= t <= node_count, got t={t}, n={n}")
    nbrs = [set() for _ in range(n)]
    for i, j in g.edges:
        nbrs[i].add(j)
        nbrs[j].add(i)

    remaining = set(range(n))
    deg = {v: len(nbrs[v]) for v in remaining}
    while len(remaining) > t:
        victim = min(remaining, key=lambda v: (deg[v], -v))
        remaining.discard(victim)
        del deg[victim]
        for u in nbrs[victim]:
            if u in remaining:
                deg[u] -= 1

    selected = remaining
    deg_sel = {v: sum(1 for u in nbrs[v] if u in selected) for v in range(n)}
    while True:
        best, best_delta = None, 0
        for u in sorted(selected):
            for v in range(n):
                if v in selected:
                    continue
                delta = deg_sel[v] - (1 if v in nbrs[u] else 0) - deg_sel[u]
                if delta > best_delta:
                    best, best_delta = (u, v), delta
        if best is None:
            break
        u, v = best
        selected.discard(u)
        selected.add(v)
        for w in range(n):
            deg_sel[w] = sum(1 for x in nbrs[w] if x in selected)
    return sorted(selected)


def select_nodes(
    g: Graph, t: int, strategy: InjectionStrategy, rng: np.random.Generator
) -> list[int]:
    """Pick ``t`` distinct node indices according to the strategy.

    Degree strategies break ties by lower index; the random strategy samples
    uniformly without replacement.
    """
    strategy = InjectionStrategy(strategy)
    n = g.node_count
    if n < t:
        raise ValueError(f"graph has {n} nodes, cannot select {t}")
    if strategy is InjectionStrategy.RANDOM:
        return sorted(int(v) for v in rng.choice(n, size=t, replace=False))
    if strategy is InjectionStrategy.DENSELY_CONNECTED:
        return densest_subset(g, t)
    deg = g.degrees()
    if strategy is InjectionStrategy.MAX_DEGREE:
        order = sorted(range(n), key=lambda v: (-deg[v], v))
    else:
        order = sorted(range(n), key=lambda v: (deg[v], v))
    return order[:t]


def inject_detailed(
    g: Graph,
    trig: Trigger,
    strategy: InjectionStrategy,
    rng: np.random.Generator,
) -> tuple[Graph, tuple[int, ...]]:
    """Like :func:`inject` but also returns the selected host nodes."""
    t = trig.graph.node_count
    if g.node_count < t:
        # Host too small: the whole graph becomes the trigger.
        return Graph(t, trig.graph.edges), tuple(range(t))

    selected = select_nodes(g, t, strategy, rng)
    # The bijection is drawn even for deterministic strategies so that results
    # are reproducible functions of the stream alone.
    perm = rng.permutation(t)
    host_of = np.empty(t, dtype=np.int64)
    for pos, host in enumerate(selected):
        host_of[perm[pos]] = host

    inside = set(selected)
    edges = {e for e in g.edges if not (e[0] in inside and e[1] in inside)}
    for a, b in trig.graph.edges:
        u, v = int(host_of[a]), int(host_of[b])
        edges.add((min(u, v), max(u, v)))
    return Graph(g.node_count, frozenset(edges)), tuple(selected)


def inject(
    g: Graph,
    trig: Trigger,
    strategy: InjectionStrategy,
    rng: np.random.Generator,
) -> Graph:
    """Replace the connections among ``t`` selected host nodes with the trigger."""
    new_graph, _ = inject_detailed(g, trig, strategy, rng)
    return new_graph
