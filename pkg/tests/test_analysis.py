"""
StateNet-PH Test Suite
Unit tests for MDS, SVM separation, sweeps and the battery
"""
import math

import numpy as np
import pytest

from statenet.schemas.results import SweepResult
from statenet.services.analysis import (
    AnalysisError,
    BatteryEntry,
    RbfSvm,
    accuracy_over_seeds,
    battery,
    bin_sweep,
    breakdown_snr,
    find_entropy_drop,
    mds_2d,
    noise_sweep,
    signal_diagram,
    svm_rbf_separation,
)
from statenet.services.graphdist import DistanceKind
from statenet.services.signals import TimeSeries


def _pairwise(points):
    p = np.asarray(points, dtype=float)
    return np.sqrt(((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2))


def _sweep(entropy):
    x = [float(b) for b in range(2, 2 + len(entropy))]
    return SweepResult(
        parameter="bins",
        x_values=x,
        entropy_series={"s": entropy},
        max_lifetime_series={"s": [0.0] * len(entropy)},
        compute_time_series={"s": [0.0] * len(entropy)},
    )


class TestSignalDiagram:
    """Tests for the signal-to-diagram pipeline"""

    def test_sine_single_loop(self, sine):
        dgm = signal_diagram(sine, "coarse", tau=26, n=2, b=10, distance=DistanceKind.UNWEIGHTED)
        assert len(dgm.dim1) == 1
        birth, death = dgm.dim1[0]
        assert birth == 1.0
        assert 10.0 <= death <= 14.0
        assert dgm.provenance["method"] == "coarse"
        assert dgm.provenance["b"] == 10


class TestMds:
    """Tests for classical MDS"""

    def test_unit_square(self):
        square = [(0, 0), (1, 0), (1, 1), (0, 1)]
        coords = mds_2d(_pairwise(square))
        np.testing.assert_allclose(_pairwise(coords), _pairwise(square), atol=1e-9)

    def test_equilateral_triangle(self):
        d = np.ones((3, 3)) - np.eye(3)
        coords = mds_2d(d)
        np.testing.assert_allclose(_pairwise(coords), d, atol=1e-9)
        np.testing.assert_allclose(coords.mean(axis=0), 0.0, atol=1e-12)

    def test_sign_convention(self):
        coords = mds_2d(_pairwise([(0, 0), (3, 0), (0, 1)]))
        for axis in range(2):
            first = coords[np.flatnonzero(np.abs(coords[:, axis]) > 1e-9)[0], axis]
            assert first > 0

    def test_input_order_invariance(self, rng):
        points = rng.normal(size=(9, 2)) * (5.0, 1.0)
        d = _pairwise(points)
        perm = rng.permutation(9)
        coords = mds_2d(d)
        moved = mds_2d(d[np.ix_(perm, perm)])
        # same configuration up to the sign of each axis
        np.testing.assert_allclose(np.abs(moved), np.abs(coords[perm]), atol=1e-9)
        np.testing.assert_allclose(_pairwise(moved), _pairwise(coords)[np.ix_(perm, perm)], atol=1e-9)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(mds_2d(np.zeros((3, 3))), np.zeros((3, 2)))

    def test_asymmetric(self):
        with pytest.raises(AnalysisError):
            mds_2d(np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_nonzero_diagonal(self):
        with pytest.raises(AnalysisError):
            mds_2d(np.array([[1.0, 1.0], [1.0, 0.0]]))


class TestSvm:
    """Tests for RBF-SVM separation accuracy"""

    def test_separable_blobs(self, rng):
        periodic = rng.normal((0.0, 0.0), 0.3, size=(10, 2))
        chaotic = rng.normal((5.0, 5.0), 0.3, size=(10, 2))
        points = np.vstack([periodic, chaotic])
        labels = ["periodic"] * 10 + ["chaotic"] * 10
        assert svm_rbf_separation(points, labels, seed=1) == 1.0

    def test_coincident_points(self):
        points = np.zeros((2, 2))
        assert svm_rbf_separation(points, ["periodic", "chaotic"], seed=3) == 0.5

    def test_single_class(self):
        with pytest.raises(AnalysisError):
            svm_rbf_separation(np.eye(2), ["periodic", "periodic"], seed=1)

    def test_length_mismatch(self):
        with pytest.raises(AnalysisError):
            svm_rbf_separation(np.eye(3), ["periodic", "chaotic"], seed=1)

    def test_seeded(self, rng):
        points = rng.normal(size=(12, 2))
        labels = [1, -1] * 6
        a = RbfSvm().fit(points, labels, seed=5).decision_function(points)
        b = RbfSvm().fit(points, labels, seed=5).decision_function(points)
        np.testing.assert_array_equal(a, b)

    def test_unfitted(self):
        with pytest.raises(AnalysisError):
            RbfSvm().decision_function(np.zeros((1, 2)))

    def test_accuracy_over_seeds(self):
        summary = accuracy_over_seeds(np.zeros((2, 2)), ["periodic", "chaotic"], [1, 2, 3])
        assert summary.mean == 0.5
        assert summary.std == 0.0
        assert summary.seeds == [1, 2, 3]


class TestBinSweep:
    """Tests for the bin-size sweep"""

    def test_entropy_drop(self):
        assert find_entropy_drop(_sweep([0.9, 0.8, 0.05, 0.5, 0.02, 0.01]), threshold=0.1) == 6

    def test_no_drop(self):
        assert find_entropy_drop(_sweep([0.9, 0.8, 0.5]), threshold=0.1) is None

    def test_missing_value_ends_tail(self):
        assert find_entropy_drop(_sweep([0.05, None, 0.05]), threshold=0.1) == 4

    def test_sine(self, sine):
        sweep = bin_sweep(sine, 26, 2, range(8, 11))
        assert sweep.x_values == [8.0, 9.0, 10.0]
        assert sweep.parameter == "bins"
        assert len(sweep.entropy_series["sine"]) == 3
        assert sweep.errors["sine"] == [None, None, None]

    def test_failures_are_recorded(self):
        flat = TimeSeries(np.ones(50), 1.0, "flat")
        sweep = bin_sweep(flat, 1, 2, range(2, 5))
        assert sweep.entropy_series["flat"] == [None, None, None]
        assert all("DegenerateSequenceError" in e for e in sweep.errors["flat"])

    def test_range_limits(self, sine):
        with pytest.raises(AnalysisError):
            bin_sweep(sine, 26, 2, range(1, 5))
        with pytest.raises(AnalysisError):
            bin_sweep(sine, 26, 2, range(18, 22))


class TestNoiseSweep:
    """Tests for breakdown detection and the noise sweep"""

    def test_breakdown(self):
        snr = [math.inf, 40.0, 30.0, 20.0]
        periodic = [0.1, 0.1, 0.3, 0.8]
        chaotic = [0.9, 0.9, 0.8, 0.85]
        std = [0.05, 0.05, 0.1, 0.1]
        assert breakdown_snr(snr, periodic, std, chaotic, std) == 30.0

    def test_breakdown_is_lowest_of_leading_run(self):
        snr = [10.0, 20.0, 30.0, 40.0]
        periodic = [0.1, 0.9, 0.1, 0.1]
        chaotic = [0.9, 0.9, 0.9, 0.9]
        std = [0.0] * 4
        assert breakdown_snr(snr, periodic, std, chaotic, std) == 30.0

    def test_no_separation(self):
        assert breakdown_snr([30.0], [0.5], [0.2], [0.6], [0.2]) is None

    def test_missing_values(self):
        assert breakdown_snr([30.0, 20.0], [0.1, None], [0.0, None], [0.9, 0.9], [0.0, 0.0]) == 30.0

    def test_sweep_shapes(self, sine):
        chaotic = TimeSeries(np.random.default_rng(0).standard_normal(226), 50.0, "noise")
        sweep = noise_sweep(sine, chaotic, [math.inf, 30.0], "coarse", 26, 2, b=10, seeds=[1, 2])
        assert sweep.x_values == [math.inf, 30.0]
        assert set(sweep.entropy_series) == {"periodic", "chaotic"}
        assert len(sweep.entropy_std["periodic"]) == 2
        # the noise-free point is identical across seeds
        assert sweep.entropy_std["periodic"][0] == 0.0

    def test_non_monotone_grid(self, sine):
        with pytest.raises(AnalysisError):
            noise_sweep(sine, sine, [30.0, 40.0, 20.0], "coarse", 26, 2, b=10, seeds=[1])


class TestBattery:
    """Tests for the multi-system battery"""

    def test_identical_series_are_inseparable(self, sine):
        entries = [
            BatteryEntry(sine, "periodic", 26, 2),
            BatteryEntry(sine.with_samples(sine.samples, label="sine-copy"), "chaotic", 26, 2),
        ]
        result = battery(entries, "coarse", "unweighted", b=10, seeds=[1, 2])
        assert result.bottleneck == [[0.0, 0.0], [0.0, 0.0]]
        assert result.accuracy.mean == 0.5
        assert result.embedding.names == ["sine", "sine-copy"]

    def test_failing_series_skipped(self, sine):
        flat = TimeSeries(np.ones(300), 50.0, "flat")
        entries = [
            BatteryEntry(sine, "periodic", 26, 2),
            BatteryEntry(sine.with_samples(sine.samples[::-1].copy(), label="reversed"), "chaotic", 26, 2),
            BatteryEntry(flat, "chaotic", 26, 2),
        ]
        result = battery(entries, "coarse", DistanceKind.UNWEIGHTED, b=10, seeds=[1])
        assert set(result.skipped) == {"flat"}
        assert len(result.embedding.points) == 2

    def test_too_few_series(self, sine):
        with pytest.raises(AnalysisError):
            battery([BatteryEntry(sine, "periodic", 26, 2)], "coarse", "unweighted", b=10, seeds=[1])

    def test_single_regime(self, sine):
        entries = [BatteryEntry(sine, "periodic", 26, 2)] * 2
        with pytest.raises(AnalysisError):
            battery(entries, "coarse", "unweighted", b=10, seeds=[1])
