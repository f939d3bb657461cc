import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphbackdoor import (
    Graph,
    StructureVector,
    density,
    from_structure_vector,
    num_pairs,
    pair_from_index,
    pair_index,
    recompute_features,
    to_structure_vector,
)

from conftest import complete_graph, path_graph, random_graph


@st.composite
def graphs(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_n, max_n))
    s = n * (n - 1) // 2
    bits = draw(st.lists(st.booleans(), min_size=s, max_size=s))
    edges = frozenset(
        pair_from_index(k, n) for k, bit in enumerate(bits) if bit
    )
    return Graph(n, edges)


class TestPairIndex:
    def test_first_pair(self):
        assert pair_index(0, 1, 4) == 0

    def test_last_pair(self):
        assert pair_index(2, 3, 4) == 5

    def test_row_major_enumeration(self):
        # Enumerate all C(4,2) pairs by hand in row-major order.
        order = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        assert order.index((1, 3)) == 4
        assert pair_index(1, 3, 4) == 4

    @pytest.mark.parametrize("i,j,n", [(1, 1, 4), (2, 1, 4), (0, 4, 4), (0, 5, 4)])
    def test_invalid_pairs(self, i, j, n):
        with pytest.raises(ValueError):
            pair_index(i, j, n)

    def test_bijection_exhaustive(self):
        for n in range(2, 51):
            seen = [pair_index(i, j, n) for i in range(n) for j in range(i + 1, n)]
            assert seen == list(range(num_pairs(n)))

    def test_inverse(self):
        for n in range(2, 12):
            for k in range(num_pairs(n)):
                i, j = pair_from_index(k, n)
                assert pair_index(i, j, n) == k


class TestStructureVector:
    def test_empty_graph_is_all_zero(self):
        v = to_structure_vector(Graph(5))
        assert v.length == 10
        assert not v.bits.any()

    def test_complete_graph_is_all_one(self):
        v = to_structure_vector(complete_graph(4))
        assert v.bits.tolist() == [1] * 6

    def test_path_bits(self):
        v = to_structure_vector(path_graph(3))
        assert v.bits.tolist() == [1, 0, 1]

    def test_all_zero_decodes_to_isolated_nodes(self):
        g = from_structure_vector(StructureVector(np.zeros(3, dtype=np.uint8), 3))
        assert g.node_count == 3 and g.edge_count == 0

    def test_decode_path(self):
        g = from_structure_vector(StructureVector(np.array([1, 0, 1], dtype=np.uint8), 3))
        assert g == path_graph(3)

    def test_bit_count_equals_edge_count(self, rng):
        g = random_graph(7, 0.4, rng)
        assert int(to_structure_vector(g).bits.sum()) == g.edge_count

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            StructureVector(np.zeros(4, dtype=np.uint8), 3)

    @given(graphs())
    def test_round_trip(self, g):
        assert from_structure_vector(to_structure_vector(g)) == g


class TestDensity:
    def test_half_dense(self):
        assert density(Graph(4, frozenset({(0, 1), (1, 2), (2, 3)}))) == 0.5

    def test_complete(self):
        assert density(complete_graph(5)) == 1.0

    def test_degenerate(self):
        with pytest.raises(ValueError):
            density(Graph(1))

    @given(graphs(max_n=7))
    def test_adding_an_edge_increases_density(self, g):
        missing = [
            (i, j)
            for i in range(g.node_count)
            for j in range(i + 1, g.node_count)
            if (i, j) not in g.edges
        ]
        if not missing:
            return
        bigger = Graph(g.node_count, g.edges | {missing[0]})
        assert density(bigger) > density(g)


class TestFeatures:
    def test_star_features(self):
        star = Graph(4, frozenset({(0, 1), (0, 2), (0, 3)}))
        feats = star.node_features.ravel()
        assert feats[0] == 1.0
        assert np.allclose(feats[1:], 1 / 3)

    def test_isolated_node_feature_is_zero(self):
        assert Graph(3).node_features.ravel().tolist() == [0.0, 0.0, 0.0]

    def test_feature_refresh_after_edge_deletion(self):
        tri = complete_graph(3)
        assert np.allclose(tri.node_features.ravel(), 1.0)
        broken = Graph(3, frozenset({(0, 2), (1, 2)}))
        feats = recompute_features(broken).node_features.ravel()
        assert feats[0] == 0.5 and feats[1] == 0.5 and feats[2] == 1.0

    def test_explicit_features_are_kept(self):
        g = Graph(2, frozenset({(0, 1)}), node_features=np.array([3.0, 4.0]))
        assert g.node_features.ravel().tolist() == [3.0, 4.0]


class TestGraphValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            Graph(3, frozenset({(1, 1)}))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Graph(3, frozenset({(0, 3)}))

    def test_edges_canonicalized(self):
        g = Graph(3, frozenset({(2, 0)}))
        assert g.edges == frozenset({(0, 2)})

    def test_equality_is_index_wise(self):
        assert Graph(3, frozenset({(0, 1)})) == Graph(3, frozenset({(1, 0)}))
        assert Graph(3, frozenset({(0, 1)})) != Graph(3, frozenset({(1, 2)}))
