"""
StateNet-PH Test Suite
Unit tests for Rips persistence, checked against a brute-force reducer
"""
import json
import time

import numpy as np
import pytest
from scipy.sparse.csgraph import shortest_path

from statenet.commands.repro import FIG4_PATH
from statenet.services.graphdist import DissimilarityMatrix, DistanceKind
from statenet.services.homology import (
    HomologyError,
    PersistenceDiagram,
    UnionFind,
    build_filtration,
    compute_diagrams,
    persistence_dim0,
    persistence_dim1,
)
from tests.oracles import random_dissimilarity, random_metric, rips_pairs

ENGINES = ["native", "ripser"]


def _positive(pairs):
    pairs = np.asarray(pairs).reshape(-1, 2)
    return pairs[pairs[:, 1] > pairs[:, 0]]


def _cycle_hops(n):
    i = np.arange(n)
    gap = np.abs(i[:, None] - i[None, :])
    return np.minimum(gap, n - gap).astype(float)


def _ring_with_chords(n, chords, rng):
    graph = np.zeros((n, n))
    i = np.arange(n)
    graph[i, (i + 1) % n] = 1.0
    for _ in range(chords):
        a, b = rng.choice(n, size=2, replace=False)
        graph[a, b] = 1.0
    return shortest_path(graph, directed=False, unweighted=True)


class TestUnionFind:
    """Tests for the disjoint-set helper"""

    def test_union(self):
        uf = UnionFind(4)
        assert uf.union(0, 1)
        assert uf.union(2, 3)
        assert not uf.union(1, 0)
        assert uf.union(1, 3)
        assert len({uf.find(i) for i in range(4)}) == 1


class TestFiltration:
    """Tests for build_filtration"""

    def test_edge_order(self):
        d = np.array([[0, 2, 1], [2, 0, 1], [1, 1, 0]], dtype=float)
        f = build_filtration(d)
        np.testing.assert_array_equal(f.values, [1, 1, 2])
        np.testing.assert_array_equal(f.edges, [[0, 2], [1, 2], [0, 1]])

    def test_asymmetric(self):
        with pytest.raises(HomologyError):
            build_filtration(np.array([[0, 1], [2, 0]], dtype=float))

    def test_negative(self):
        with pytest.raises(HomologyError):
            build_filtration(np.array([[0, -1], [-1, 0]], dtype=float))

    def test_not_square(self):
        with pytest.raises(HomologyError):
            build_filtration(np.zeros((2, 3)))


class TestAgainstOracle:
    """Both engines agree with full boundary-matrix reduction"""

    def test_native_random_trials(self):
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            n = int(rng.integers(1, 11))
            d = random_metric(rng, n) if trial % 2 else random_dissimilarity(rng, n)
            expected = rips_pairs(d)
            f = build_filtration(d)
            np.testing.assert_allclose(_positive(persistence_dim0(f)), expected[0], atol=1e-12,
                                       err_msg=f"trial {trial}")
            np.testing.assert_allclose(persistence_dim1(f), expected[1], atol=1e-12,
                                       err_msg=f"trial {trial}")

    @pytest.mark.parametrize("seed", range(6))
    def test_ripser_random_metrics(self, seed):
        d = random_metric(np.random.default_rng(seed), 9)
        expected = rips_pairs(d)
        dgm = compute_diagrams(d, "ripser")
        np.testing.assert_allclose(_positive(dgm.dim0), expected[0], atol=1e-12)
        np.testing.assert_allclose(dgm.dim1, expected[1], atol=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_engines_agree_on_ties(self, seed):
        d = random_dissimilarity(np.random.default_rng(200 + seed), 10)
        native = compute_diagrams(d, "native")
        external = compute_diagrams(d, "ripser")
        np.testing.assert_allclose(native.dim1, external.dim1, atol=1e-12)


class TestKnownDiagrams:
    """Diagrams with hand-derived answers"""

    @pytest.mark.parametrize("engine", ENGINES)
    def test_nine_cycle(self, engine):
        dgm = compute_diagrams(_cycle_hops(9), engine)
        np.testing.assert_array_equal(dgm.dim1, [[1.0, 3.0]])
        assert len(dgm.dim0) == 8
        assert np.all(dgm.dim0 == [0.0, 1.0])

    @pytest.mark.parametrize("engine", ENGINES)
    def test_four_node_toy(self, engine):
        with open(FIG4_PATH, "r", encoding="utf-8") as f:
            fixture = json.load(f)
        dgm = compute_diagrams(np.array(fixture["distance"]), engine)
        np.testing.assert_allclose(sorted(dgm.dim0[:, 1]), fixture["expected"]["dim0_deaths"])
        np.testing.assert_allclose(dgm.dim1, fixture["expected"]["dim1"])

    @pytest.mark.parametrize("engine", ENGINES)
    @pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
    def test_scale_equivariance(self, engine, alpha):
        d = random_metric(np.random.default_rng(7), 9)
        base = compute_diagrams(d, engine)
        scaled = compute_diagrams(alpha * d, engine)
        np.testing.assert_allclose(scaled.dim0, alpha * base.dim0, atol=1e-9)
        np.testing.assert_allclose(scaled.dim1, alpha * base.dim1, atol=1e-9)

    def test_two_points(self):
        dgm = compute_diagrams(np.array([[0.0, 3.0], [3.0, 0.0]]), "native")
        np.testing.assert_array_equal(dgm.dim0, [[0.0, 3.0]])
        assert dgm.dim1.shape == (0, 2)

    def test_unknown_engine(self):
        with pytest.raises(HomologyError):
            compute_diagrams(_cycle_hops(5), "gudhi")


class TestDiagramRecord:
    """Tests for diagram serialization"""

    def test_record_keeps_provenance(self):
        d = DissimilarityMatrix(_cycle_hops(6), DistanceKind.UNWEIGHTED)
        dgm = compute_diagrams(d, "native")
        back = PersistenceDiagram.from_record(json.loads(json.dumps(dgm.to_record())))
        np.testing.assert_array_equal(back.dim1, dgm.dim1)
        assert back.provenance["kind"] == "unweighted"
        assert back.provenance["engine"] == "native"


class TestNativeScale:
    """The native engine handles network-sized matrices"""

    def test_two_hundred_nodes(self):
        d = _ring_with_chords(200, 15, np.random.default_rng(3))
        started = time.perf_counter()
        native = compute_diagrams(d, "native")
        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"native engine took {elapsed:.1f} s"
        np.testing.assert_array_equal(native.dim1, compute_diagrams(d, "ripser").dim1)
        assert len(native.dim1) >= 1
