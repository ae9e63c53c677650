"""
StateNet-PH Graph Distance Module
Node (dis)similarity matrices of a transition network: hop distance,
the two reciprocal-weight path measures and the lazy diffusion distance
"""
import heapq
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import pdist, squareform

from statenet.errors import StateNetError
from statenet.services.networks import TransitionNetwork

logger = logging.getLogger(__name__)

# reciprocal costs are compared after rounding so that 0.2 + 0.2 ties with 0.4
_COST_DECIMALS = 9


class DistanceError(StateNetError):
    """Invalid distance request"""
    pass


class DistanceKind(str, Enum):
    UNWEIGHTED = "unweighted"
    WEIGHTED_SHORTEST = "weighted_shortest"
    SHORTEST_WEIGHTED = "shortest_weighted"
    DIFFUSION = "diffusion"

    @classmethod
    def parse(cls, value: str) -> "DistanceKind":
        """Accept CLI spellings such as ``weighted-shortest``"""
        try:
            return cls(value.replace("-", "_"))
        except ValueError:
            raise DistanceError(f"unknown distance kind {value!r}") from None


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric, zero-diagonal, non-negative matrix over the used states"""
    values: np.ndarray
    kind: DistanceKind
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DistanceError("dissimilarity matrix must be square")
        if not np.all(np.isfinite(v)):
            raise DistanceError("dissimilarity matrix has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def provenance(self) -> Dict:
        return {"kind": self.kind.value, "params": dict(self.params), "size": self.size}


# =====================
# Hop distance
# =====================

def unweighted_shortest_path(net: TransitionNetwork) -> DissimilarityMatrix:
    """All-pairs BFS hop counts"""
    graph = csr_matrix((net.adjacency > 0).astype(float))
    hops = shortest_path(graph, method="D", directed=False, unweighted=True)
    if not np.all(np.isfinite(hops)):
        raise DistanceError("network is disconnected")
    return DissimilarityMatrix(hops, DistanceKind.UNWEIGHTED)


# =====================
# Reciprocal-weight optimal paths
# =====================

@dataclass(frozen=True)
class OptimalPaths:
    """
    Paths minimizing C'(P) = sum of 1/w(e)

    Ties in C' prefer fewer hops, then the lexicographically smallest node
    sequence. Pair (a, b) uses the path searched from min(a, b), so every
    matrix is symmetric.
    """
    cost: np.ndarray
    weight_sum: np.ndarray
    hops: np.ndarray
    predecessors: np.ndarray

    def path(self, a: int, b: int) -> List[int]:
        """Node rows along the chosen path from a to b"""
        if a == b:
            return [a]
        source, target = min(a, b), max(a, b)
        nodes = [target]
        while nodes[-1] != source:
            nodes.append(int(self.predecessors[source, nodes[-1]]))
        nodes.reverse()
        return nodes if a == source else nodes[::-1]


def _neighbour_lists(adjacency: np.ndarray) -> List[List[Tuple[int, float]]]:
    return [[(int(v), float(adjacency[u, v])) for v in np.flatnonzero(adjacency[u])]
            for u in range(adjacency.shape[0])]


def _route(pred: List[int], node: int) -> List[int]:
    nodes = [node]
    while pred[nodes[-1]] != -1:
        nodes.append(pred[nodes[-1]])
    nodes.reverse()
    return nodes


def _single_source(neighbours: List[List[Tuple[int, float]]], source: int):
    n = len(neighbours)
    cost = [math.inf] * n
    key = [math.inf] * n
    hops = [n + 1] * n
    wsum = [0.0] * n
    pred = [-1] * n
    done = [False] * n
    cost[source] = 0.0
    key[source] = 0.0
    hops[source] = 0
    heap = [(0.0, 0, source)]
    while heap:
        k, h, u = heapq.heappop(heap)
        if done[u] or (k, h) != (key[u], hops[u]):
            continue
        done[u] = True
        for v, w in neighbours[u]:
            if done[v]:
                continue
            new_cost = cost[u] + 1.0 / w
            new_key = round(new_cost, _COST_DECIMALS)
            candidate = (new_key, h + 1)
            current = (key[v], hops[v])
            if candidate < current or (
                candidate == current and _route(pred, u) < _route(pred, pred[v])
            ):
                cost[v] = new_cost
                key[v] = new_key
                hops[v] = h + 1
                wsum[v] = wsum[u] + w
                pred[v] = u
                heapq.heappush(heap, (new_key, h + 1, v))
    return cost, wsum, hops, pred


def _sources_block(neighbours, sources: Sequence[int]):
    return [(s,) + _single_source(neighbours, s) for s in sources]


def reciprocal_optimal_paths(net: TransitionNetwork, jobs: int = 1) -> OptimalPaths:
    """
    All-pairs optimal paths under edge cost 1/w(e)

    Args:
        net: Connected transition network (weights >= 1)
        jobs: Worker processes; sources are split into contiguous blocks
    """
    a = net.adjacency
    if np.any(a[a > 0] < 1):
        raise DistanceError("reciprocal path costs need edge weights >= 1")
    n = net.node_count
    neighbours = _neighbour_lists(a)
    sources = list(range(n))

    if jobs > 1 and n > 64:
        blocks = [sources[i::jobs] for i in range(jobs)]
        results = Parallel(n_jobs=jobs)(delayed(_sources_block)(neighbours, b) for b in blocks)
        rows = sorted((r for block in results for r in block), key=lambda r: r[0])
    else:
        rows = _sources_block(neighbours, sources)

    cost = np.zeros((n, n))
    wsum = np.zeros((n, n))
    hops = np.zeros((n, n))
    pred = np.full((n, n), -1, dtype=np.int64)
    for s, c, w, h, p in rows:
        cost[s], wsum[s], hops[s], pred[s] = c, w, h, p

    if not np.all(np.isfinite(cost)):
        raise DistanceError("network is disconnected")

    upper = np.triu_indices(n, k=1)
    for m in (cost, wsum, hops):
        m.T[upper] = m[upper]
    return OptimalPaths(cost, wsum, hops, pred)


def weighted_shortest_path(net: TransitionNetwork, paths: Optional[OptimalPaths] = None) -> DissimilarityMatrix:
    """Sum of weights along the C'-optimal path"""
    paths = paths or reciprocal_optimal_paths(net)
    return DissimilarityMatrix(paths.weight_sum, DistanceKind.WEIGHTED_SHORTEST)


def shortest_weighted_path(net: TransitionNetwork, paths: Optional[OptimalPaths] = None) -> DissimilarityMatrix:
    """Number of edges along the C'-optimal path"""
    paths = paths or reciprocal_optimal_paths(net)
    return DissimilarityMatrix(paths.hops, DistanceKind.SHORTEST_WEIGHTED)


# =====================
# Diffusion distance
# =====================

def transition_matrix(net: TransitionNetwork) -> np.ndarray:
    """Row-stochastic random-walk matrix P(i, j) = A(i, j) / deg(i)"""
    a = net.adjacency.astype(float)
    deg = a.sum(axis=1)
    if np.any(deg == 0):
        raise DistanceError("transition matrix undefined for isolated nodes")
    return a / deg[:, None]


def default_diffusion_steps(node_count: int) -> int:
    """ceil(log2(N)) + 1"""
    return math.ceil(math.log2(max(node_count, 1))) + 1


def diffusion_distance(net: TransitionNetwork, t: Optional[int] = None) -> DissimilarityMatrix:
    """
    Degree-normalized l2 distance between t-step lazy walk distributions

    d_t(a, b)^2 = sum_c (P~^t(a, c) - P~^t(b, c))^2 / deg(c), with
    P~ = (P + I) / 2 and deg the weighted degree.
    """
    if t is None:
        t = default_diffusion_steps(net.node_count)
    if t < 1:
        raise DistanceError(f"diffusion steps must be >= 1, got {t}")
    p = transition_matrix(net)
    lazy = 0.5 * (p + np.eye(net.node_count))
    walk = np.linalg.matrix_power(lazy, t)
    deg = net.adjacency.sum(axis=1).astype(float)
    scaled = walk / np.sqrt(deg)[None, :]
    values = squareform(pdist(scaled, metric="euclidean")) if net.node_count > 1 else np.zeros((1, 1))
    return DissimilarityMatrix(values, DistanceKind.DIFFUSION, {"t": t})


# =====================
# Dispatcher
# =====================

def compute_distance(
    net: TransitionNetwork,
    kind: DistanceKind,
    t: Optional[int] = None,
    jobs: int = 1
) -> DissimilarityMatrix:
    """Build the requested matrix for a network"""
    kind = DistanceKind.parse(kind) if isinstance(kind, str) and not isinstance(kind, DistanceKind) else kind
    if kind is DistanceKind.UNWEIGHTED:
        return unweighted_shortest_path(net)
    if kind is DistanceKind.WEIGHTED_SHORTEST:
        return weighted_shortest_path(net, reciprocal_optimal_paths(net, jobs))
    if kind is DistanceKind.SHORTEST_WEIGHTED:
        return shortest_weighted_path(net, reciprocal_optimal_paths(net, jobs))
    if kind is DistanceKind.DIFFUSION:
        return diffusion_distance(net, t)
    raise DistanceError(f"unknown distance kind {kind!r}")
