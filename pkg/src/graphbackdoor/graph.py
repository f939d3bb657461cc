"""Undirected graphs with degree-derived features and a binary structure-vector encoding.

A graph on ``n`` nodes is identified with a binary vector of length
``s = n*(n-1)/2``: entry ``pair_index(i, j, n)`` is 1 iff the edge ``{i, j}``
is present.  The ordering is row-major over the upper triangle, i.e.
``(0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1)``.  This bijection is the
interface between graphs and the subsampling-based smoothing machinery.

Node indices are dense 0-based integers and equality is index-wise (edge-set
equality); no isomorphism testing is done anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "Graph",
    "StructureVector",
    "pair_index",
    "pair_from_index",
    "to_structure_vector",
    "from_structure_vector",
    "density",
    "recompute_features",
    "num_pairs",
]


def num_pairs(n: int) -> int:
    """Number of unordered node pairs, i.e. the structure-vector length."""
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """Map the pair ``{i, j}`` (``i < j < n``) to its structure-vector index.

    Row-major upper-triangular: ``i*n - i*(i+1)/2 + (j - i - 1)``.
    """
    if not (0 <= i < j < n):
        raise ValueError(f"invalid pair ({i}, {j}) for node count {n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@lru_cache(maxsize=None)
def _pair_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (I, J) with (I[k], J[k]) the k-th pair in canonical order."""
    i_idx, j_idx = np.triu_indices(n, k=1)
    return i_idx.astype(np.int64), j_idx.astype(np.int64)


def pair_from_index(idx: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`pair_index`."""
    s = num_pairs(n)
    if not 0 <= idx < s:
        raise ValueError(f"index {idx} out of range for node count {n}")
    i_idx, j_idx = _pair_table(n)
    return int(i_idx[idx]), int(j_idx[idx])


def _degree_features(node_count: int, edges: frozenset[tuple[int, int]]) -> np.ndarray:
    deg = np.zeros(node_count, dtype=np.float64)
    for i, j in edges:
        deg[i] += 1.0
        deg[j] += 1.0
    if node_count > 1:
        deg /= node_count - 1
    return deg.reshape(node_count, 1)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph.

    Edges are canonicalized to a frozenset of ``(i, j)`` tuples with
    ``i < j``.  ``node_features`` is derived from the edge set unless
    explicitly supplied: a single scalar per node, degree normalized by
    ``n - 1`` so it stays in [0, 1] across graph sizes.  (Raw degrees can be
    used by passing features explicitly.)  Mutation-style operations
    elsewhere return new graphs.
    """

    node_count: int
    edges: frozenset[tuple[int, int]] = frozenset()
    node_features: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.node_count < 0:
            raise ValueError("node_count must be nonnegative")
        canonical = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            a, b = (u, v) if u < v else (v, u)
            if not (0 <= a and b < self.node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {self.node_count} nodes")
            canonical.add((int(a), int(b)))
        object.__setattr__(self, "edges", frozenset(canonical))
        if self.node_features is None:
            object.__setattr__(
                self, "node_features", _degree_features(self.node_count, self.edges)
            )
        else:
            feats = np.asarray(self.node_features, dtype=np.float64)
            if feats.ndim == 1:
                feats = feats.reshape(-1, 1)
            if feats.shape[0] != self.node_count:
                raise ValueError("node_features must have one row per node")
            object.__setattr__(self, "node_features", feats)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix."""
        adj = np.zeros((self.node_count, self.node_count), dtype=np.float64)
        for i, j in self.edges:
            adj[i, j] = 1.0
            adj[j, i] = 1.0
        return adj

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges))


@dataclass(frozen=True)
class StructureVector:
    """Binary encoding of a graph's edge set, one bit per node pair."""

    bits: np.ndarray
    origin_node_count: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size != num_pairs(self.origin_node_count):
            raise ValueError(
                f"expected {num_pairs(self.origin_node_count)} bits for "
                f"{self.origin_node_count} nodes, got shape {bits.shape}"
            )
        if bits.size and bits.max() > 1:
            raise ValueError("structure vector entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return self.bits.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructureVector):
            return NotImplemented
        return self.origin_node_count == other.origin_node_count and np.array_equal(
            self.bits, other.bits
        )

    def __hash__(self) -> int:
        return hash((self.origin_node_count, self.bits.tobytes()))


def to_structure_vector(g: Graph) -> StructureVector:
    """Encode ``g`` as its binary structure vector."""
    n = g.node_count
    bits = np.zeros(num_pairs(n), dtype=np.uint8)
    for i, j in g.edges:
        bits[pair_index(i, j, n)] = 1
    return StructureVector(bits=bits, origin_node_count=n)


def from_structure_vector(v: StructureVector) -> Graph:
    """Decode a structure vector back to a graph; features are recomputed."""
    n = v.origin_node_count
    i_idx, j_idx = _pair_table(n)
    on = np.flatnonzero(v.bits)
    edges = frozenset((int(i_idx[k]), int(j_idx[k])) for k in on)
    return Graph(node_count=n, edges=edges)


def density(g: Graph) -> float:
    """Edge count over node-pair count: ``2e / (n*(n-1))``."""
    if g.node_count < 2:
        raise ValueError("density undefined for graphs with fewer than 2 nodes")
    return 2.0 * g.edge_count / (g.node_count * (g.node_count - 1))


def recompute_features(g: Graph) -> Graph:
    """Return a copy of ``g`` with normalized-degree features rederived."""
    return Graph(node_count=g.node_count, edges=g.edges)
