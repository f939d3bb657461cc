"""Baseline empirical defense: detect a dense subgraph of known size and strip it.

The detector is the same deterministic greedy-peel-plus-swap heuristic used by
the densely-connected injection strategy; "detection" succeeds only when the
detected node set equals the injected set exactly.  Jaccard overlap is also
exposed as a softer diagnostic.
"""

from __future__ import annotations

from .graph import Graph
from .injection import densest_subset

__all__ = [
    "detect_dense_subgraph",
    "detection_success",
    "detection_jaccard",
    "strip_detected",
]


def detect_dense_subgraph(g: Graph, t: int) -> set[int]:
    """Nodes of the (heuristically) densest t-node subgraph."""
    if g.node_count < t:
        raise ValueError(f"graph has {g.node_count} nodes, cannot detect {t}")
    return set(densest_subset(g, t))


def detection_success(g_backdoored: Graph, injected_nodes, t: int) -> bool:
    """True iff the detected set equals the injected set exactly."""
    injected = set(int(v) for v in injected_nodes)
    if len(injected) != t:
        raise ValueError(f"injected set has {len(injected)} nodes, expected {t}")
    return detect_dense_subgraph(g_backdoored, t) == injected


def detection_jaccard(g_backdoored: Graph, injected_nodes, t: int) -> float:
    """Jaccard overlap between the detected and injected node sets."""
    injected = set(int(v) for v in injected_nodes)
    detected = detect_dense_subgraph(g_backdoored, t)
    union = detected | injected
    if not union:
        return 1.0
    return len(detected & injected) / len(union)


def strip_detected(g: Graph, t: int) -> Graph:
    """Remove every edge whose endpoints both lie in the detected dense subgraph."""
    detected = detect_dense_subgraph(g, t)
    edges = frozenset(
        e for e in g.edges if not (e[0] in detected and e[1] in detected)
    )
    return Graph(g.node_count, edges)
