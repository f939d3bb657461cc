import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphbackdoor import (
    TriggerMethod,
    TriggerSpec,
    density,
    pa_k,
    sw_k,
    synth_er,
    synth_pa,
    synth_sw,
    synthesize,
)


class TestKFormulas:
    @pytest.mark.parametrize("t,rho,expected", [(6, 0.8, 4), (10, 0.4, 4), (2, 1.0, 1)])
    def test_sw_k(self, t, rho, expected):
        assert sw_k(t, rho) == expected

    @pytest.mark.parametrize("t,rho,expected", [(10, 0.4, 3), (5, 0.4, 1)])
    def test_pa_k(self, t, rho, expected):
        assert pa_k(t, rho) == expected

    def test_pa_density_too_large(self):
        with pytest.raises(ValueError):
            pa_k(4, 0.9)

    @given(st.integers(2, 30), st.floats(0.01, 1.0))
    def test_sw_k_at_least_one(self, t, rho):
        assert 1 <= sw_k(t, rho) <= t - 1


class TestER:
    def test_two_nodes_full_density_is_deterministic(self):
        trig = synth_er(TriggerSpec(size=2, rho=1.0, seed=3))
        assert trig.graph.edges == frozenset({(0, 1)})
        assert trig.realized_density == 1.0

    def test_mean_edge_count(self):
        rng = np.random.default_rng(0)
        spec = TriggerSpec(size=5, rho=0.5, seed=0)
        counts = [synth_er(spec, rng).graph.edge_count for _ in range(600)]
        assert abs(np.mean(counts) - 5.0) < 0.35  # 0.5 * C(5,2)

    def test_retry_guarantees_an_edge(self):
        rng = np.random.default_rng(1)
        spec = TriggerSpec(size=3, rho=0.05, seed=0)
        for _ in range(200):
            assert synth_er(spec, rng).graph.edge_count >= 1

    def test_empirical_density_tracks_rho(self):
        rng = np.random.default_rng(7)
        spec = TriggerSpec(size=10, rho=0.8, seed=0)
        dens = [synth_er(spec, rng).realized_density for _ in range(500)]
        assert abs(np.mean(dens) - 0.8) < 0.05


class TestSW:
    def test_lattice_without_rewiring(self):
        trig = synth_sw(TriggerSpec(size=6, rho=0.8, method="sw", sw_rewire_prob=0.0, seed=0))
        degrees = trig.graph.degrees()
        assert degrees.tolist() == [4] * 6
        assert trig.graph.edge_count == 12
        assert trig.realized_density == pytest.approx(0.8)

    def test_four_cycle(self):
        trig = synth_sw(TriggerSpec(size=4, rho=0.5, method="sw", sw_rewire_prob=0.0, seed=0))
        assert sw_k(4, 0.5) == 2
        assert trig.graph.edges == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})

    @given(st.integers(4, 14), st.sampled_from([0.3, 0.5, 0.8]), st.integers(0, 3))
    @settings(max_examples=40, deadline=None)
    def test_rewiring_preserves_edge_count(self, t, rho, seed):
        k = sw_k(t, rho)
        if k % 2 == 1 or k >= t:
            return  # odd-k lattices can collapse duplicate offsets
        lattice = synth_sw(
            TriggerSpec(size=t, rho=rho, method="sw", sw_rewire_prob=0.0, seed=seed)
        )
        rewired = synth_sw(
            TriggerSpec(size=t, rho=rho, method="sw", sw_rewire_prob=0.8, seed=seed)
        )
        assert lattice.graph.edge_count == (k // 2) * t
        assert rewired.graph.edge_count == lattice.graph.edge_count


class TestPA:
    def test_smallest_instance_is_a_tree(self):
        trig = synth_pa(TriggerSpec(size=3, rho=0.4, method="pa", seed=0))
        assert pa_k(3, 0.4) == 1
        assert trig.graph.edge_count == 2

    def test_edge_count_and_density(self):
        trig = synth_pa(TriggerSpec(size=10, rho=0.4, method="pa", seed=5))
        assert trig.graph.edge_count == 21  # k=3, edges = k*(t-k)
        assert trig.realized_density == pytest.approx(21 / 45)

    @given(st.integers(3, 20), st.sampled_from([0.1, 0.2, 0.3, 0.4]), st.integers(0, 5))
    @settings(max_examples=40, deadline=None)
    def test_edge_count_identity(self, t, rho, seed):
        try:
            spec = TriggerSpec(size=t, rho=rho, method="pa", seed=seed)
        except ValueError:
            return
        k = pa_k(t, rho)
        assert synth_pa(spec).graph.edge_count == k * (t - k)


class TestCommonProperties:
    @pytest.mark.parametrize("method", list(TriggerMethod))
    def test_fixed_seed_is_bit_identical(self, method):
        spec = TriggerSpec(size=8, rho=0.4, method=method, seed=99)
        a, b = synthesize(spec), synthesize(spec)
        assert a.graph == b.graph
        assert a.realized_density == b.realized_density

    @pytest.mark.parametrize("method", list(TriggerMethod))
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_size_and_edge_invariants(self, method, seed):
        spec = TriggerSpec(size=7, rho=0.35, method=method, seed=seed)
        trig = synthesize(spec)
        assert trig.graph.node_count == 7
        assert trig.graph.edge_count >= 1
        assert trig.realized_density == pytest.approx(density(trig.graph))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            TriggerSpec(size=1, rho=0.5)
        with pytest.raises(ValueError):
            TriggerSpec(size=5, rho=0.0)
        with pytest.raises(ValueError):
            TriggerSpec(size=4, rho=0.9, method="pa")
