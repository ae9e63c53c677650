"""
StateNet-PH Test Suite
Unit tests for symbolization and transition networks
"""
import math

import numpy as np
import pytest

from statenet.services.embedding import delay_embed
from statenet.services.networks import (
    DegenerateSequenceError,
    NetworkError,
    SymbolSequence,
    TransitionNetwork,
    adjacency_record,
    assign_cgss_state,
    assign_permutation_state,
    build_network,
    cgss_state_from_digits,
    sorting_permutation,
    symbolize,
    write_edge_list,
)
from statenet.services.signals import TimeSeries


def _sequence(states, method="ordinal"):
    states = np.array(states)
    return SymbolSequence(states, int(states.max()), method, {"n": 3})


class TestPermutationStates:
    """Tests for ordinal state assignment"""

    def test_sorting_permutation(self):
        assert sorting_permutation([-0.08, 0.48, -0.34]) == (2, 0, 1)

    def test_lexicographic_index(self):
        # (0,1,2) (0,2,1) (1,0,2) (1,2,0) (2,0,1) (2,1,0)
        assert assign_permutation_state([-0.08, 0.48, -0.34]) == 5

    def test_identity_and_reversal(self):
        for n in (2, 3, 5, 7):
            assert assign_permutation_state(np.arange(n)) == 1
            assert assign_permutation_state(np.arange(n)[::-1]) == math.factorial(n)

    def test_ties_keep_earlier_index(self):
        assert sorting_permutation([1.0, 1.0, 0.0]) == (2, 0, 1)

    def test_needs_two_components(self):
        with pytest.raises(NetworkError):
            assign_permutation_state([1.0])


class TestCoarseStates:
    """Tests for coarse-grained state assignment"""

    def test_digits(self):
        assert cgss_state_from_digits([3, 5, 2], 8) == 172

    def test_binning(self):
        # digits 0, 3 (right edge), 2
        assert assign_cgss_state([0.0, 1.0, 0.5], 4, 0.0, 1.0) == 1 + 0 + 3 * 4 + 2 * 16

    def test_bounds(self):
        assert assign_cgss_state([0.0, 0.0], 3, 0.0, 1.0) == 1
        assert assign_cgss_state([1.0, 1.0], 3, 0.0, 1.0) == 9

    def test_outside_domain(self):
        with pytest.raises(NetworkError):
            assign_cgss_state([1.5], 4, 0.0, 1.0)

    def test_too_few_bins(self):
        with pytest.raises(NetworkError):
            assign_cgss_state([0.5], 1, 0.0, 1.0)


class TestSymbolize:
    """Tests for symbolize"""

    def test_ordinal_alphabet(self, sine):
        seq = symbolize(delay_embed(sine, 5, 4), "ordinal")
        assert seq.alphabet_size == 24
        assert len(seq) == len(sine) - 15
        assert seq.states.min() >= 1 and seq.states.max() <= 24

    def test_ordinal_matches_scalar_assignment(self, sine):
        emb = delay_embed(sine, 7, 3)
        seq = symbolize(emb, "ordinal")
        expected = [assign_permutation_state(v) for v in emb.vectors]
        np.testing.assert_array_equal(seq.states, expected)

    def test_coarse_matches_scalar_assignment(self, sine):
        emb = delay_embed(sine, 26, 2)
        seq = symbolize(emb, "coarse", b=10)
        expected = [assign_cgss_state(v, 10, emb.source_min, emb.source_max) for v in emb.vectors]
        np.testing.assert_array_equal(seq.states, expected)
        assert seq.alphabet_size == 100

    def test_coarse_affine_invariance(self, rng):
        # eighths keep 2 x + 3 exact in floating point
        x = rng.integers(-40, 41, size=300) / 8.0
        base = symbolize(delay_embed(TimeSeries(x, 1.0), 3, 3), "coarse", b=6)
        moved = symbolize(delay_embed(TimeSeries(2.0 * x + 3.0, 1.0), 3, 3), "coarse", b=6)
        np.testing.assert_array_equal(moved.states, base.states)

    def test_coarse_needs_bins(self, sine):
        with pytest.raises(NetworkError):
            symbolize(delay_embed(sine, 1, 2), "coarse")

    def test_constant_signal_collapses(self):
        seq = symbolize(delay_embed(TimeSeries(np.ones(20), 1.0), 1, 3), "coarse", b=4)
        assert set(seq.states.tolist()) == {1}

    def test_unknown_method(self, sine):
        with pytest.raises(NetworkError):
            symbolize(delay_embed(sine, 1, 2), "wavelet")


class TestBuildNetwork:
    """Tests for build_network"""

    def test_self_transitions_dropped(self):
        net = build_network(_sequence([1, 2, 2, 3, 1]))
        np.testing.assert_array_equal(net.states, [1, 2, 3])
        np.testing.assert_array_equal(net.adjacency, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])

    def test_symmetrized_counts(self):
        net = build_network(_sequence([1, 2, 1, 2]))
        np.testing.assert_array_equal(net.adjacency, [[0, 3], [3, 0]])
        np.testing.assert_array_equal(net.directed_counts, [[0, 2], [1, 0]])

    def test_unused_states_compacted(self):
        net = build_network(_sequence([5, 9, 5, 40]))
        np.testing.assert_array_equal(net.states, [5, 9, 40])
        assert net.node_count == 3
        assert net.edge_count == 2

    def test_only_self_transitions(self):
        with pytest.raises(DegenerateSequenceError):
            build_network(_sequence([4, 4, 4]))

    def test_single_state(self):
        with pytest.raises(DegenerateSequenceError):
            build_network(_sequence([4]))

    def test_sine_is_connected(self, sine):
        net = build_network(symbolize(delay_embed(sine, 26, 2), "coarse", b=10))
        assert np.array_equal(net.adjacency, net.adjacency.T)
        assert np.all(np.diag(net.adjacency) == 0)
        assert net.degree.min() > 0

    def test_sine_is_single_cycle(self, sine):
        net = build_network(symbolize(delay_embed(sine, 26, 2), "coarse", b=10))
        assert np.all(np.count_nonzero(net.adjacency, axis=1) == 2)
        assert net.edge_count == net.node_count

    def test_weight_total_counts_transitions(self, rng):
        states = rng.integers(1, 7, size=400)
        net = build_network(_sequence(states))
        moves = int(np.count_nonzero(states[1:] != states[:-1]))
        assert net.adjacency.sum() == 2 * moves


class TestFromAdjacency:
    """Tests for explicit adjacency input"""

    def test_disconnected(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 1
        a[2, 3] = a[3, 2] = 1
        with pytest.raises(NetworkError):
            TransitionNetwork.from_adjacency(a)

    def test_asymmetric(self):
        with pytest.raises(NetworkError):
            TransitionNetwork.from_adjacency([[0, 1], [2, 0]])

    def test_diagonal_cleared(self):
        net = TransitionNetwork.from_adjacency([[3, 1], [1, 0]])
        assert net.adjacency[0, 0] == 0


class TestExport:
    """Tests for network export"""

    def test_edge_list_uses_symbols(self, tmp_path):
        net = build_network(_sequence([5, 9, 5, 40]))
        path = tmp_path / "edges.csv"
        write_edge_list(net, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines == ["u,v,weight", "5,9,2", "5,40,1"]

    def test_adjacency_record(self):
        record = adjacency_record(build_network(_sequence([1, 2, 3])))
        assert record["states"] == [1, 2, 3]
        assert record["edge_count"] == 2
        assert "directed_counts" in record
