"""
StateNet-PH Homology Module
0- and 1-dimensional Vietoris-Rips persistence of a dissimilarity matrix

Dimension 0 always comes from the union-find sweep below. Dimension 1 is
computed either by ripser (default engine) or by the native Z/2
coboundary reduction with clearing and apparent pairs, which the tests
compare against a brute-force boundary reduction.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from statenet.config import get_settings
from statenet.errors import StateNetError
from statenet.services.graphdist import DissimilarityMatrix

logger = logging.getLogger(__name__)

_SYMMETRY_TOL = 1e-12


class HomologyError(StateNetError):
    """Invalid filtration input"""
    pass


# =====================
# Types
# =====================

@dataclass(frozen=True)
class Filtration:
    """
    Rips filtration up to triangles

    Edges are sorted by (value, u, v). A triangle enters with its latest
    edge and is keyed ``top_edge * vertex_count + opposite_vertex``, so
    keys follow the filtration order and are produced per edge on demand.
    """
    vertex_count: int
    edges: np.ndarray       # (m, 2) with u < v
    values: np.ndarray      # (m,)
    matrix: np.ndarray

    def edge_index(self) -> np.ndarray:
        """(n, n) position of each edge in filtration order, -1 on the diagonal"""
        index = np.full((self.vertex_count, self.vertex_count), -1, dtype=np.int64)
        positions = np.arange(len(self.edges), dtype=np.int64)
        index[self.edges[:, 0], self.edges[:, 1]] = positions
        index[self.edges[:, 1], self.edges[:, 0]] = positions
        return index

    def coboundary(self, k: int, edge_index: np.ndarray) -> np.ndarray:
        """Keys of the triangles containing edge k"""
        n = self.vertex_count
        a, b = int(self.edges[k, 0]), int(self.edges[k, 1])
        w = np.arange(n, dtype=np.int64)
        w = w[(w != a) & (w != b)]
        ia, ib = edge_index[a, w], edge_index[b, w]
        top = np.maximum(k, np.maximum(ia, ib))
        opposite = np.where(top == k, w, np.where(top == ia, b, a))
        return top * n + opposite


@dataclass(frozen=True)
class PersistenceDiagram:
    """Finite (birth, death) pairs in dimensions 0 and 1"""
    dim0: np.ndarray
    dim1: np.ndarray
    provenance: Dict = field(default_factory=dict)

    def __getitem__(self, dim: int) -> np.ndarray:
        if dim == 0:
            return self.dim0
        if dim == 1:
            return self.dim1
        raise KeyError(dim)

    def to_record(self) -> Dict:
        return {
            "0": self.dim0.tolist(),
            "1": self.dim1.tolist(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_record(cls, record: Dict) -> "PersistenceDiagram":
        return cls(_pairs(record.get("0", [])), _pairs(record.get("1", [])), record.get("provenance", {}))


def _pairs(points) -> np.ndarray:
    arr = np.array(points, dtype=float).reshape(-1, 2)
    order = np.lexsort((arr[:, 1], arr[:, 0])) if arr.size else np.arange(0)
    return arr[order]


# =====================
# Filtration
# =====================

def build_filtration(d: Union[DissimilarityMatrix, np.ndarray]) -> Filtration:
    """
    Edges of the Rips filtration of a dissimilarity matrix

    Raises:
        HomologyError: For non-square, asymmetric or negative input
    """
    m = np.array(d.values if isinstance(d, DissimilarityMatrix) else d, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise HomologyError("distance matrix must be square")
    if np.any(m < 0):
        raise HomologyError("distance matrix has negative entries")
    scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
    if not np.allclose(m, m.T, rtol=0.0, atol=_SYMMETRY_TOL * scale):
        raise HomologyError("distance matrix is not symmetric")
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)

    n = m.shape[0]
    u, v = np.triu_indices(n, k=1)
    values = m[u, v]
    order = np.lexsort((v, u, values))
    edges = np.column_stack([u[order], v[order]])
    return Filtration(n, edges, values[order], m)


# =====================
# Dimension 0
# =====================

class UnionFind:
    """Disjoint sets with path compression and union by size"""

    def __init__(self, size: int):
        self.parents = list(range(size))
        self.sizes = [1] * size

    def find(self, elem: int) -> int:
        root = elem
        while root != self.parents[root]:
            root = self.parents[root]
        while elem != root:
            self.parents[elem], elem = root, self.parents[elem]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False if they were already joined"""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.sizes[ra] < self.sizes[rb]:
            ra, rb = rb, ra
        self.parents[rb] = ra
        self.sizes[ra] += self.sizes[rb]
        return True


def persistence_dim0(f: Filtration) -> np.ndarray:
    """
    Finite 0-dimensional pairs

    Every vertex is born at 0; each merge at value r kills one component,
    giving vertex_count - 1 pairs (0, r) on a connected complex.
    """
    uf = UnionFind(f.vertex_count)
    deaths = [float(r) for (a, b), r in zip(f.edges, f.values) if uf.union(int(a), int(b))]
    return _pairs([(0.0, r) for r in deaths])


# =====================
# Dimension 1
# =====================

def persistence_dim1(f: Filtration) -> np.ndarray:
    """
    Finite 1-dimensional pairs by Z/2 reduction of the edge coboundaries

    Edge columns are reduced from the last edge to the first, the pivot
    being the earliest triangle of the column; the pairs are the same as
    for the boundary reduction. Edges that merge components (dimension-0
    deaths) are cleared. A column whose earliest triangle enters with the
    edge itself is an apparent pair and is never reduced or stored.
    """
    n = f.vertex_count
    if n < 3:
        return _pairs([])

    uf = UnionFind(n)
    creators = [i for i, (a, b) in enumerate(f.edges) if not uf.union(int(a), int(b))]
    if not creators:
        return _pairs([])

    edge_index = f.edge_index()
    # pivot triangle -> reduced column, or the edge whose coboundary it is
    owner: Dict[int, Union[int, set]] = {}
    pairs: List[Tuple[float, float]] = []
    for k in reversed(creators):
        keys = f.coboundary(k, edge_index)
        pivot = int(keys.min())
        if pivot // n == k and pivot not in owner:
            owner[pivot] = k
            continue

        column = set(keys.tolist())
        while column:
            pivot = min(column)
            other = owner.get(pivot)
            if other is None:
                break
            if isinstance(other, int):
                other = owner[pivot] = set(f.coboundary(other, edge_index).tolist())
            column ^= other
        if not column:
            continue
        pivot = min(column)
        owner[pivot] = column
        birth, death = float(f.values[k]), float(f.values[pivot // n])
        if death > birth:
            pairs.append((birth, death))
    logger.debug(f"Native dim1: {len(creators)} creator edges, {len(owner)} pivots")
    return _pairs(pairs)


def _ripser_dim1(matrix: np.ndarray) -> np.ndarray:
    from ripser import ripser

    result = ripser(matrix, distance_matrix=True, maxdim=1)
    dgm = result["dgms"][1]
    dgm = dgm[np.isfinite(dgm[:, 1])] if dgm.size else dgm.reshape(0, 2)
    if not dgm.size:
        return _pairs([])
    # ripser works in single precision; snap back to the exact matrix entries
    exact = np.unique(matrix[np.triu_indices(matrix.shape[0], k=1)])
    flat = dgm.reshape(-1)
    right = np.clip(np.searchsorted(exact, flat), 0, exact.size - 1)
    left = np.clip(right - 1, 0, exact.size - 1)
    nearest = np.where(np.abs(exact[left] - flat) <= np.abs(exact[right] - flat), left, right)
    snapped = exact[nearest].reshape(-1, 2)
    return _pairs(snapped[snapped[:, 1] > snapped[:, 0]])


# =====================
# Pipeline
# =====================

def compute_diagrams(d: DissimilarityMatrix, engine: Optional[str] = None) -> PersistenceDiagram:
    """
    Persistence diagrams D_0 and D_1 of a dissimilarity matrix

    Args:
        d: Dissimilarity matrix
        engine: ``ripser`` or ``native``; defaults to settings.homology.engine
    """
    engine = engine or get_settings().homology.engine
    f = build_filtration(d)
    dim0 = persistence_dim0(f)
    if f.vertex_count < 3:
        dim1 = _pairs([])
    elif engine == "ripser":
        dim1 = _ripser_dim1(f.matrix)
    elif engine == "native":
        dim1 = persistence_dim1(f)
    else:
        raise HomologyError(f"unknown persistence engine {engine!r}")

    provenance = {"engine": engine, "vertex_count": f.vertex_count}
    if isinstance(d, DissimilarityMatrix):
        provenance.update(d.provenance())
    logger.debug(f"Diagrams: {len(dim0)} dim0 and {len(dim1)} dim1 pairs ({engine})")
    return PersistenceDiagram(dim0, dim1, provenance)
