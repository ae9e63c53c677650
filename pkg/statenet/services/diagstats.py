"""
StateNet-PH Diagram Statistics Module
Lifetimes, normalized persistent entropy and bottleneck distances
"""
import logging
import math
from typing import List, Literal, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from statenet.errors import StateNetError
from statenet.schemas.results import DiagramSummary
from statenet.services.homology import PersistenceDiagram

logger = logging.getLogger(__name__)

Normalization = Literal["total", "count"]
DiagramLike = Union[np.ndarray, Sequence[Sequence[float]]]


class DiagramError(StateNetError):
    """Invalid diagram statistic request"""
    pass


class EntropyUndefinedError(DiagramError):
    """The normalizing logarithm vanishes"""
    pass


def _as_points(diagram: DiagramLike) -> np.ndarray:
    pts = np.array(diagram, dtype=float).reshape(-1, 2)
    if pts.size and not np.all(np.isfinite(pts)):
        raise DiagramError("diagram points must be finite")
    return pts


def lifetimes(diagram: DiagramLike) -> np.ndarray:
    pts = _as_points(diagram)
    return pts[:, 1] - pts[:, 0]


def max_lifetime(diagram: DiagramLike) -> float:
    """Largest death - birth, 0 for an empty diagram"""
    life = lifetimes(diagram)
    return float(life.max()) if life.size else 0.0


def persistent_entropy(diagram: DiagramLike, normalization: Normalization = "total") -> float:
    """
    Normalized persistent entropy E'(D)

    With p_x = pers(x) / L(D) and L(D) = sum of lifetimes::

        E'(D) = -sum_x p_x log2(p_x) / log2(L(D))

    ``normalization="count"`` divides by log2(number of pairs) instead.

    Raises:
        EntropyUndefinedError: When the denominator is zero (L(D) = 1 for
            ``total``), or L(D) = 0 for a non-empty diagram
    """
    life = lifetimes(diagram)
    if life.size == 0:
        logger.warning("Entropy of an empty diagram is defined as 0")
        return 0.0
    total = float(life.sum())
    if total <= 0.0:
        raise EntropyUndefinedError("entropy undefined for zero total persistence")
    p = life[life > 0] / total
    numerator = float(-np.sum(p * np.log2(p)))

    if normalization == "count":
        if life.size == 1:
            return 0.0
        return numerator / math.log2(life.size)
    if normalization != "total":
        raise DiagramError(f"unknown entropy normalization {normalization!r}")
    if total == 1.0:
        raise EntropyUndefinedError("entropy undefined at L(D) = 1 (log2 denominator is zero)")
    return numerator / math.log2(total)


def summarize(diagram: Union[PersistenceDiagram, DiagramLike], normalization: Normalization = "total") -> DiagramSummary:
    """DiagramSummary of the 1-dimensional diagram"""
    points = diagram.dim1 if isinstance(diagram, PersistenceDiagram) else _as_points(diagram)
    life = lifetimes(points)
    warnings: List[str] = []
    entropy: Optional[float]
    if life.size == 0:
        warnings.append("empty diagram: entropy defined as 0")
        entropy = 0.0
    else:
        try:
            entropy = persistent_entropy(points, normalization)
        except EntropyUndefinedError as e:
            warnings.append(str(e))
            entropy = None
    return DiagramSummary(
        max_lifetime=max_lifetime(points),
        entropy=entropy,
        pair_count=int(life.size),
        total_persistence=float(life.sum()),
        normalization=normalization,
        warnings=warnings,
    )


# =====================
# Bottleneck distance
# =====================

def _perfect_matching_exists(d: np.ndarray, f: np.ndarray, eps: float) -> bool:
    """
    Matching of D against F where points may also go to the diagonal

    Left vertices: D points then one diagonal slot per F point.
    Right vertices: F points then one diagonal slot per D point.
    """
    nd, nf = len(d), len(f)
    size = nd + nf
    rows: List[int] = []
    cols: List[int] = []

    if nd and nf:
        cost = np.maximum(np.abs(d[:, None, 0] - f[None, :, 0]), np.abs(d[:, None, 1] - f[None, :, 1]))
        r, c = np.nonzero(cost <= eps)
        rows.extend(r.tolist())
        cols.extend(c.tolist())
    half_d = 0.5 * (d[:, 1] - d[:, 0])
    for i in np.flatnonzero(half_d <= eps):
        rows.append(int(i))
        cols.append(nf + int(i))
    half_f = 0.5 * (f[:, 1] - f[:, 0])
    for j in np.flatnonzero(half_f <= eps):
        rows.append(nd + int(j))
        cols.append(int(j))
    for j in range(nf):
        for i in range(nd):
            rows.append(nd + j)
            cols.append(nf + i)

    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(d: DiagramLike, f: DiagramLike) -> float:
    """
    Bottleneck distance between two finite diagrams

    The answer is one of the candidate costs (coordinate gaps between
    points, or half-lifetimes for diagonal matches); a binary search over
    the sorted candidates finds the smallest one admitting a perfect
    matching (Hopcroft-Karp).
    """
    d = _as_points(d)
    f = _as_points(f)
    if not len(d) and not len(f):
        return 0.0

    candidates = [np.array([0.0]), 0.5 * (d[:, 1] - d[:, 0]), 0.5 * (f[:, 1] - f[:, 0])]
    if len(d) and len(f):
        candidates.append(np.abs(d[:, None, 0] - f[None, :, 0]).ravel())
        candidates.append(np.abs(d[:, None, 1] - f[None, :, 1]).ravel())
    values = np.unique(np.concatenate(candidates))

    lo, hi = 0, values.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(d, f, values[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo])


def bottleneck_matrix(diagrams: Sequence[DiagramLike], jobs: int = 1) -> np.ndarray:
    """Pairwise bottleneck distances; symmetric with zero diagonal"""
    n = len(diagrams)
    points = [_as_points(x) for x in diagrams]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if jobs > 1 and len(pairs) > 1:
        values = Parallel(n_jobs=jobs)(delayed(bottleneck)(points[i], points[j]) for i, j in pairs)
    else:
        values = [bottleneck(points[i], points[j]) for i, j in pairs]
    out = np.zeros((n, n))
    for (i, j), v in zip(pairs, values):
        out[i, j] = out[j, i] = v
    return out
