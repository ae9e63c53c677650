"""
StateNet-PH Analysis Module
Experiment drivers: signal-to-diagram pipeline, classical MDS, RBF-SVM
separation accuracy, bin-size and noise sweeps, and the multi-system battery
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from statenet.config import get_settings
from statenet.errors import StateNetError
from statenet.schemas.results import (
    AccuracySummary,
    BatteryResult,
    LabeledEmbedding2D,
    NoiseSweepResult,
    SweepResult,
)
from statenet.schemas.system import Regime
from statenet.services.diagstats import Normalization, bottleneck_matrix, summarize
from statenet.services.embedding import delay_embed, select_delay_mpe
from statenet.services.graphdist import DistanceKind, compute_distance
from statenet.services.homology import PersistenceDiagram, compute_diagrams
from statenet.services.networks import Method, build_network, symbolize
from statenet.services.signals import TimeSeries, add_noise_snr, list_presets, preset, simulate_preset

logger = logging.getLogger(__name__)

REGIME_SIGN = {"periodic": 1, "chaotic": -1}
CHAOTIC_SEED_OFFSET = 10000


class AnalysisError(StateNetError):
    """Experiment could not be run on the given input"""
    pass


# =====================
# Pipeline
# =====================

def signal_diagram(
    ts: TimeSeries,
    method: Method,
    tau: int,
    n: int,
    b: Optional[int] = None,
    distance: Union[DistanceKind, str] = DistanceKind.UNWEIGHTED,
    t: Optional[int] = None,
    engine: Optional[str] = None,
    jobs: int = 1
) -> PersistenceDiagram:
    """Embed, symbolize, build the network, measure it and compute its diagrams"""
    if t is None:
        t = get_settings().distances.diffusion_t
    emb = delay_embed(ts, tau, n)
    net = build_network(symbolize(emb, method, b))
    d = compute_distance(net, distance, t, jobs)
    dgm = compute_diagrams(d, engine)
    dgm.provenance.update({"method": method, "tau": tau, "n": n, "b": b, "label": ts.label})
    return dgm


# =====================
# Classical MDS
# =====================

def mds_2d(distance_matrix: np.ndarray) -> np.ndarray:
    """
    Torgerson MDS into the plane

    B = -1/2 J D^2 J is diagonalized; the two largest eigenpairs give the
    coordinates vec * sqrt(max(val, 0)). Each axis is flipped so that its
    first nonzero coordinate is positive.

    Returns:
        Array of shape (n, 2)
    """
    d = np.asarray(distance_matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise AnalysisError("MDS needs a square distance matrix")
    scale = max(1.0, float(np.abs(d).max()) if d.size else 1.0)
    if not np.allclose(d, d.T, rtol=0.0, atol=1e-12 * scale):
        raise AnalysisError("MDS needs a symmetric distance matrix")
    if not np.allclose(np.diag(d), 0.0, atol=1e-12 * scale):
        raise AnalysisError("MDS needs a zero diagonal")

    n = d.shape[0]
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (d ** 2) @ j
    evals, evecs = np.linalg.eigh(0.5 * (b + b.T))
    order = np.argsort(evals)[::-1][:2]
    coords = np.zeros((n, 2))
    for axis, k in enumerate(order):
        coords[:, axis] = evecs[:, k] * math.sqrt(max(float(evals[k]), 0.0))

    tol = 1e-12 * scale
    for axis in range(2):
        nonzero = np.flatnonzero(np.abs(coords[:, axis]) > tol)
        if nonzero.size == 0:
            coords[:, axis] = 0.0
        elif coords[nonzero[0], axis] < 0:
            coords[:, axis] *= -1.0
    return coords


# =====================
# RBF support vector machine
# =====================

class RbfSvm:
    """
    Soft-margin SVM with a Gaussian kernel trained by simplified SMO

    The second multiplier of every working pair is drawn from a seeded
    generator, so ``seed`` fixes the optimization path.
    """

    def __init__(
        self,
        c: float = 1.0,
        gamma: Optional[float] = None,
        tol: float = 1e-3,
        max_passes: int = 200,
        stable_passes: int = 10
    ):
        self.c = c
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes
        self.stable_passes = stable_passes
        self.x_: Optional[np.ndarray] = None
        self.y_: Optional[np.ndarray] = None
        self.alphas_: Optional[np.ndarray] = None
        self.bias_: float = 0.0
        self.gamma_: float = 1.0

    def _kernel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        sq = np.sum(a ** 2, axis=1)[:, None] + np.sum(b ** 2, axis=1)[None, :] - 2.0 * a @ b.T
        return np.exp(-self.gamma_ * np.maximum(sq, 0.0))

    def fit(self, x: np.ndarray, y: np.ndarray, seed: int = 0) -> "RbfSvm":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.unique(y).size < 2:
            raise AnalysisError("SVM needs both classes")
        if self.gamma is not None:
            self.gamma_ = self.gamma
        else:
            var = float(x.var())
            self.gamma_ = 1.0 / (2.0 * var) if var > 0 else 1.0

        rng = np.random.default_rng(seed)
        n = x.shape[0]
        k = self._kernel(x, x)
        alphas = np.zeros(n)
        bias = 0.0
        unchanged = 0
        passes = 0
        while unchanged < self.stable_passes and passes < self.max_passes:
            changed = 0
            for i in rng.permutation(n):
                e_i = float(k[i] @ (alphas * y)) + bias - y[i]
                if not ((y[i] * e_i < -self.tol and alphas[i] < self.c) or (y[i] * e_i > self.tol and alphas[i] > 0)):
                    continue
                j = int(rng.integers(n - 1))
                if j >= i:
                    j += 1
                e_j = float(k[j] @ (alphas * y)) + bias - y[j]
                a_i, a_j = alphas[i], alphas[j]
                if y[i] != y[j]:
                    lo, hi = max(0.0, a_j - a_i), min(self.c, self.c + a_j - a_i)
                else:
                    lo, hi = max(0.0, a_i + a_j - self.c), min(self.c, a_i + a_j)
                if lo == hi:
                    continue
                eta = 2.0 * k[i, j] - k[i, i] - k[j, j]
                if eta >= 0:
                    continue
                new_j = float(np.clip(a_j - y[j] * (e_i - e_j) / eta, lo, hi))
                if abs(new_j - a_j) < 1e-5:
                    continue
                new_i = a_i + y[i] * y[j] * (a_j - new_j)
                b1 = bias - e_i - y[i] * (new_i - a_i) * k[i, i] - y[j] * (new_j - a_j) * k[i, j]
                b2 = bias - e_j - y[i] * (new_i - a_i) * k[i, j] - y[j] * (new_j - a_j) * k[j, j]
                if 0 < new_i < self.c:
                    bias = b1
                elif 0 < new_j < self.c:
                    bias = b2
                else:
                    bias = 0.5 * (b1 + b2)
                alphas[i], alphas[j] = new_i, new_j
                changed += 1
            passes += 1
            unchanged = unchanged + 1 if changed == 0 else 0

        self.x_, self.y_, self.alphas_, self.bias_ = x, y, alphas, bias
        return self

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        if self.alphas_ is None:
            raise AnalysisError("SVM is not fitted")
        return self._kernel(np.asarray(x, dtype=float), self.x_) @ (self.alphas_ * self.y_) + self.bias_

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.where(self.decision_function(x) >= 0, 1.0, -1.0)

    def score(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(self.predict(x) == np.asarray(y, dtype=float)))


def _label_signs(labels: Sequence[Union[Regime, int]]) -> np.ndarray:
    return np.array([REGIME_SIGN[v] if isinstance(v, str) else int(v) for v in labels], dtype=float)


def svm_rbf_separation(points2d: np.ndarray, labels: Sequence[Union[Regime, int]], seed: int) -> float:
    """
    Training accuracy of an RBF SVM on the MDS plane

    Periodic is the positive class; C and the SMO limits come from settings,
    gamma is 1 / (2 Var) of the coordinates.
    """
    cfg = get_settings().analysis
    x = np.asarray(points2d, dtype=float)
    y = _label_signs(labels)
    if x.shape[0] != y.size:
        raise AnalysisError("points and labels differ in length")
    if np.unique(y).size < 2:
        raise AnalysisError("degenerate input: a single class")
    svm = RbfSvm(c=cfg.svm_c, tol=cfg.svm_tol, max_passes=cfg.svm_max_passes).fit(x, y, seed)
    return svm.score(x, y)


def accuracy_over_seeds(points2d: np.ndarray, labels: Sequence[Union[Regime, int]], seeds: Sequence[int]) -> AccuracySummary:
    values = [svm_rbf_separation(points2d, labels, s) for s in seeds]
    return AccuracySummary(
        mean=float(np.mean(values)),
        std=float(np.std(values)),
        seeds=list(seeds),
        values=values,
    )


# =====================
# Bin-size sweep
# =====================

def _timed_summary(
    ts: TimeSeries,
    method: Method,
    tau: int,
    n: int,
    b: Optional[int],
    distance: DistanceKind,
    t: Optional[int],
    normalization: Normalization
) -> Tuple[Optional[float], Optional[float], float, Optional[str]]:
    start = time.perf_counter()
    try:
        summary = summarize(signal_diagram(ts, method, tau, n, b, distance, t), normalization)
    except StateNetError as e:
        logger.warning(f"{ts.label} (b={b}): {e}")
        return None, None, time.perf_counter() - start, f"{type(e).__name__}: {e}"
    return summary.entropy, summary.max_lifetime, time.perf_counter() - start, None


def _grid(func, args_list: List[tuple], jobs: int) -> list:
    if jobs > 1 and len(args_list) > 1:
        return Parallel(n_jobs=jobs)(delayed(func)(*args) for args in args_list)
    return [func(*args) for args in args_list]


def bin_sweep(
    ts: TimeSeries,
    tau: int,
    n: int,
    b_range: Sequence[int],
    distance_kind: Union[DistanceKind, str] = DistanceKind.UNWEIGHTED,
    t: Optional[int] = None,
    normalization: Normalization = "total",
    jobs: int = 1
) -> SweepResult:
    """
    Coarse-grained network statistics for every bin count in ``b_range``

    Failures at a grid point are recorded in ``errors`` and leave None in
    the statistic series.
    """
    bins = sorted(set(int(b) for b in b_range))
    if not bins or bins[0] < 2 or bins[-1] > 20:
        raise AnalysisError(f"bin range must lie within [2, 20], got {list(b_range)}")
    distance_kind = DistanceKind.parse(distance_kind) if isinstance(distance_kind, str) else distance_kind

    rows = _grid(
        _timed_summary,
        [(ts, "coarse", tau, n, b, distance_kind, t, normalization) for b in bins],
        jobs,
    )
    label = ts.label or "signal"
    logger.info(f"Bin sweep of {label}: b={bins[0]}..{bins[-1]}")
    return SweepResult(
        parameter="bins",
        x_values=[float(b) for b in bins],
        entropy_series={label: [r[0] for r in rows]},
        max_lifetime_series={label: [r[1] for r in rows]},
        compute_time_series={label: [r[2] for r in rows]},
        errors={label: [r[3] for r in rows]},
        provenance={"tau": tau, "n": n, "distance": distance_kind.value, "normalization": normalization},
    )


def find_entropy_drop(sweep: SweepResult, label: Optional[str] = None, threshold: Optional[float] = None) -> Optional[int]:
    """
    Smallest b* with entropy below ``threshold`` at b* and every larger b

    Returns:
        b*, or None when the tail never stays low
    """
    threshold = get_settings().analysis.entropy_drop_threshold if threshold is None else threshold
    label = label or next(iter(sweep.entropy_series))
    entropy = sweep.entropy_series[label]
    drop: Optional[int] = None
    for x, e in zip(reversed(sweep.x_values), reversed(entropy)):
        if e is None or e >= threshold:
            break
        drop = int(x)
    return drop


# =====================
# Noise sweep
# =====================

def _separated(mp: Optional[float], sp: Optional[float], mc: Optional[float], sc: Optional[float]) -> bool:
    if None in (mp, sp, mc, sc):
        return False
    return abs(mp - mc) > sp + sc


def breakdown_snr(
    snr_db: Sequence[float],
    periodic_mean: Sequence[Optional[float]],
    periodic_std: Sequence[Optional[float]],
    chaotic_mean: Sequence[Optional[float]],
    chaotic_std: Sequence[Optional[float]]
) -> Optional[float]:
    """
    Lowest SNR of the separated run that starts at the cleanest SNR

    Two regimes are separated at an SNR when their mean +/- one standard
    deviation intervals do not overlap. Returns None if even the cleanest
    point overlaps.
    """
    order = sorted(range(len(snr_db)), key=lambda i: snr_db[i], reverse=True)
    breakdown: Optional[float] = None
    for i in order:
        if not _separated(periodic_mean[i], periodic_std[i], chaotic_mean[i], chaotic_std[i]):
            break
        breakdown = float(snr_db[i])
    return breakdown


def _noisy_entropy(
    ts: TimeSeries,
    snr: float,
    seed: int,
    method: Method,
    tau: int,
    n: int,
    b: Optional[int],
    distance: DistanceKind,
    t: Optional[int],
    normalization: Normalization
) -> Tuple[Optional[float], Optional[float], float, Optional[str]]:
    noisy = add_noise_snr(ts, snr, seed)
    return _timed_summary(noisy, method, tau, n, b, distance, t, normalization)


def _mean_std(values: List[Optional[float]]) -> Tuple[Optional[float], Optional[float]]:
    present = [v for v in values if v is not None]
    if not present:
        return None, None
    return float(np.mean(present)), float(np.std(present))


def noise_sweep(
    periodic: TimeSeries,
    chaotic: TimeSeries,
    snr_range_db: Sequence[float],
    network_kind: Method,
    tau: int,
    n: int,
    b: Optional[int] = None,
    distance_kind: Union[DistanceKind, str] = DistanceKind.UNWEIGHTED,
    seeds: Optional[Sequence[int]] = None,
    t: Optional[int] = None,
    normalization: Normalization = "total",
    jobs: int = 1
) -> NoiseSweepResult:
    """
    Entropy of periodic and chaotic signals under additive noise

    Periodic runs use the seed as given; chaotic runs use seed + 10000 so
    the two regimes never share a noise draw. ``math.inf`` in the SNR list
    is the noise-free point.
    """
    snr = [float(s) for s in snr_range_db]
    if not snr:
        raise AnalysisError("empty SNR range")
    steps = [y - x for x, y in zip(snr, snr[1:])]
    if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
        raise AnalysisError("SNR values must be strictly monotone")
    seeds = list(seeds) if seeds is not None else list(range(1, get_settings().analysis.noise_seeds + 1))
    distance_kind = DistanceKind.parse(distance_kind) if isinstance(distance_kind, str) else distance_kind
    regimes: Dict[str, Tuple[TimeSeries, int]] = {
        "periodic": (periodic, 0),
        "chaotic": (chaotic, CHAOTIC_SEED_OFFSET),
    }

    jobs_list = [
        (ts, s, seed + offset, network_kind, tau, n, b, distance_kind, t, normalization)
        for ts, offset in regimes.values()
        for s in snr
        for seed in seeds
    ]
    rows = _grid(_noisy_entropy, jobs_list, jobs)

    entropy: Dict[str, List[Optional[float]]] = {}
    entropy_std: Dict[str, List[Optional[float]]] = {}
    lifetime: Dict[str, List[Optional[float]]] = {}
    seconds: Dict[str, List[float]] = {}
    errors: Dict[str, List[Optional[str]]] = {}
    per_regime = len(snr) * len(seeds)
    for r, regime in enumerate(regimes):
        block = rows[r * per_regime:(r + 1) * per_regime]
        entropy[regime], entropy_std[regime], lifetime[regime], seconds[regime], errors[regime] = [], [], [], [], []
        for k in range(len(snr)):
            cell = block[k * len(seeds):(k + 1) * len(seeds)]
            mean, std = _mean_std([c[0] for c in cell])
            entropy[regime].append(mean)
            entropy_std[regime].append(std)
            lifetime[regime].append(_mean_std([c[1] for c in cell])[0])
            seconds[regime].append(float(sum(c[2] for c in cell)))
            failures = [c[3] for c in cell if c[3]]
            errors[regime].append(failures[0] if failures else None)

    breakdown = breakdown_snr(snr, entropy["periodic"], entropy_std["periodic"], entropy["chaotic"], entropy_std["chaotic"])
    logger.info(f"Noise sweep ({network_kind}): breakdown SNR {breakdown} dB")
    return NoiseSweepResult(
        x_values=snr,
        entropy_series=entropy,
        entropy_std=entropy_std,
        max_lifetime_series=lifetime,
        compute_time_series=seconds,
        errors=errors,
        seeds=seeds,
        breakdown_snr_db=breakdown,
        provenance={
            "method": network_kind,
            "tau": tau,
            "n": n,
            "b": b,
            "distance": distance_kind.value,
            "normalization": normalization,
        },
    )


# =====================
# Battery
# =====================

@dataclass(frozen=True)
class BatteryEntry:
    """A labelled signal with optional embedding parameters"""
    series: TimeSeries
    regime: Regime
    tau: Optional[int] = None
    dimension: Optional[int] = None

    @property
    def name(self) -> str:
        return self.series.label or "series"


def builtin_battery() -> List[BatteryEntry]:
    """One entry per shipped preset, using the preset's delay"""
    entries = []
    for name in list_presets():
        p = preset(name)
        entries.append(BatteryEntry(simulate_preset(name), p.system.regime, p.tau))
    return entries


def _battery_diagram(
    entry: BatteryEntry,
    method: Method,
    distance: DistanceKind,
    b: Optional[int],
    t: Optional[int]
) -> Tuple[Optional[PersistenceDiagram], Optional[str]]:
    cfg = get_settings().networks
    try:
        tau = entry.tau or select_delay_mpe(entry.series)
        n = entry.dimension or (cfg.ordinal_dim if method == "ordinal" else cfg.coarse_dim)
        return signal_diagram(entry.series, method, tau, n, b, distance, t), None
    except StateNetError as e:
        return None, f"{type(e).__name__}: {e}"


def battery(
    dataset: Sequence[BatteryEntry],
    network_kind: Method,
    distance_kind: Union[DistanceKind, str],
    b: Optional[int] = None,
    t: Optional[int] = None,
    seeds: Optional[Sequence[int]] = None,
    jobs: int = 1
) -> BatteryResult:
    """
    Diagrams of every series, their bottleneck matrix, its MDS projection
    and SVM separation accuracy over seeds 1..accuracy_seeds

    Series whose pipeline fails are skipped and reported in ``skipped``.
    """
    if network_kind == "coarse" and b is None:
        b = get_settings().networks.bins
    distance_kind = DistanceKind.parse(distance_kind) if isinstance(distance_kind, str) else distance_kind
    seeds = list(seeds) if seeds is not None else list(range(1, get_settings().analysis.accuracy_seeds + 1))

    rows = _grid(_battery_diagram, [(e, network_kind, distance_kind, b, t) for e in dataset], jobs)

    kept: List[Tuple[BatteryEntry, PersistenceDiagram]] = []
    skipped: Dict[str, str] = {}
    for entry, (dgm, error) in zip(dataset, rows):
        if dgm is None:
            logger.warning(f"Skipping {entry.name}: {error}")
            skipped[entry.name] = error
        else:
            kept.append((entry, dgm))
    if len(kept) < 2:
        raise AnalysisError(f"battery needs at least two usable series, got {len(kept)}")

    matrix = bottleneck_matrix([d.dim1 for _, d in kept], jobs)
    coords = mds_2d(matrix)
    labels = [e.regime for e, _ in kept]
    embedding = LabeledEmbedding2D(
        points=[(float(x), float(y)) for x, y in coords],
        labels=labels,
        names=[e.name for e, _ in kept],
        provenance={"network": network_kind, "distance": distance_kind.value, "b": b},
    )
    if len(set(labels)) < 2:
        raise AnalysisError("battery needs both periodic and chaotic series")
    accuracy = accuracy_over_seeds(coords, labels, seeds)
    logger.info(
        f"Battery {network_kind}/{distance_kind.value}: accuracy {accuracy.mean:.3f} +/- {accuracy.std:.3f}"
    )
    return BatteryResult(
        network_kind=network_kind,
        distance_kind=distance_kind.value,
        bottleneck=matrix.tolist(),
        embedding=embedding,
        accuracy=accuracy,
        skipped=skipped,
    )
