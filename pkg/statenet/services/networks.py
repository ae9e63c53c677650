"""
StateNet-PH Networks Module
Symbolization of embeddings (ordinal partitions and coarse-grained state
space cells) and construction of undirected transition networks
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Literal, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from statenet.errors import StateNetError
from statenet.services.embedding import Embedding

logger = logging.getLogger(__name__)

Method = Literal["ordinal", "coarse"]


class NetworkError(StateNetError):
    """Invalid symbolization or network construction"""
    pass


class DegenerateSequenceError(NetworkError):
    """Sequence has no transition between distinct states"""
    pass


# =====================
# State assignment
# =====================

def sorting_permutation(v: Sequence[float]) -> Tuple[int, ...]:
    """Indices that sort ``v`` ascending; ties keep the earlier index first"""
    return tuple(int(i) for i in np.argsort(np.asarray(v, dtype=float), kind="stable"))


def _lexicographic_rank(perms: np.ndarray) -> np.ndarray:
    """Zero-based rank of each row among all permutations in lexicographic order (Lehmer code)"""
    m, n = perms.shape
    rank = np.zeros(m, dtype=np.int64)
    for i in range(n - 1):
        smaller_after = np.sum(perms[:, i + 1:] < perms[:, i:i + 1], axis=1)
        rank += smaller_after * math.factorial(n - 1 - i)
    return rank


def assign_permutation_state(v: Sequence[float]) -> int:
    """
    Ordinal state of a vector

    Returns:
        1-based index of the sorting permutation of ``v`` among the n!
        permutations in lexicographic order (identity -> 1, reversal -> n!)
    """
    v = np.asarray(v, dtype=float)
    if v.size < 2:
        raise NetworkError("ordinal states need n >= 2")
    perm = np.argsort(v, kind="stable")[None, :]
    return int(_lexicographic_rank(perm)[0]) + 1


def cgss_state_from_digits(rho: Sequence[int], b: int) -> int:
    """s = 1 + sum_j rho[j] * b**j"""
    return 1 + sum(int(r) * b ** j for j, r in enumerate(rho))


def _digitize(values: np.ndarray, b: int, lo: float, hi: float) -> np.ndarray:
    if b < 2:
        raise NetworkError(f"need at least 2 bins, got {b}")
    if not lo < hi:
        raise NetworkError(f"binning domain must satisfy lo < hi, got [{lo}, {hi}]")
    tol = 1e-12 * (hi - lo)
    if np.any(values < lo - tol) or np.any(values > hi + tol):
        raise NetworkError(f"component outside the binning domain [{lo}, {hi}]")
    rho = np.floor(b * (values - lo) / (hi - lo)).astype(np.int64)
    return np.clip(rho, 0, b - 1)


def assign_cgss_state(v: Sequence[float], b: int, lo: float, hi: float) -> int:
    """
    Coarse-grained state of a vector

    Each component falls in one of ``b`` equal bins over [lo, hi] (the right
    edge belongs to the top bin); digits are combined base ``b`` plus one.
    """
    rho = _digitize(np.asarray(v, dtype=float), b, lo, hi)
    return cgss_state_from_digits(rho, b)


# =====================
# Symbol sequences
# =====================

@dataclass(frozen=True)
class SymbolSequence:
    """Chronological states over the alphabet [1, alphabet_size]"""
    states: np.ndarray
    alphabet_size: int
    method: Method
    params: Dict[str, int]

    def __len__(self) -> int:
        return self.states.size


def symbolize(emb: Embedding, method: Method, b: Optional[int] = None) -> SymbolSequence:
    """
    Map every embedding vector to a symbol

    Args:
        emb: Delay embedding
        method: ``ordinal`` (permutations) or ``coarse`` (hypercube cells)
        b: Bins per dimension, required for ``coarse``; the binning domain is
           [source_min, source_max] of the embedded signal

    Returns:
        SymbolSequence of the same length as the embedding
    """
    n = emb.dimension
    if method == "ordinal":
        perms = np.argsort(emb.vectors, axis=1, kind="stable")
        states = _lexicographic_rank(perms) + 1
        return SymbolSequence(states, math.factorial(n), "ordinal", {"n": n})

    if method == "coarse":
        if b is None:
            raise NetworkError("coarse symbolization needs the number of bins b")
        if b < 2:
            raise NetworkError(f"need at least 2 bins, got {b}")
        if emb.source_max == emb.source_min:
            # constant signal: every vector sits in the bottom corner cell
            states = np.ones(len(emb), dtype=np.int64)
        else:
            rho = _digitize(emb.vectors, b, emb.source_min, emb.source_max)
            powers = b ** np.arange(n, dtype=np.int64)
            states = rho @ powers + 1
        return SymbolSequence(states, b ** n, "coarse", {"n": n, "b": b})

    raise NetworkError(f"unknown symbolization method {method!r}")


# =====================
# Transition networks
# =====================

@dataclass(frozen=True)
class TransitionNetwork:
    """
    Undirected weighted transition graph over the used states

    ``adjacency[i, j]`` counts transitions i->j plus j->i; row ``i``
    corresponds to symbol ``states[i]``. ``directed_counts`` keeps the
    one-way counts for reporting only.
    """
    adjacency: np.ndarray
    states: np.ndarray
    method: Optional[Method] = None
    params: Dict[str, int] = field(default_factory=dict)
    directed_counts: Optional[np.ndarray] = None

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))

    @property
    def degree(self) -> np.ndarray:
        """Weighted degree (row sums)"""
        return self.adjacency.sum(axis=1)

    def edges(self):
        """(row, col, weight) for every edge with row < col"""
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(r), int(c), int(self.adjacency[r, c])) for r, c in zip(rows, cols)]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for i, s in enumerate(self.states):
            g.add_node(i, state=int(s))
        g.add_weighted_edges_from(self.edges())
        return g

    @classmethod
    def from_adjacency(cls, adjacency: Union[np.ndarray, Sequence[Sequence[float]]]) -> "TransitionNetwork":
        """Wrap an explicit symmetric adjacency matrix (states numbered 1..N)"""
        a = np.array(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NetworkError("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise NetworkError("adjacency must be symmetric")
        if np.any(a < 0):
            raise NetworkError("adjacency weights must be non-negative")
        a = a.copy()
        np.fill_diagonal(a, 0)
        net = cls(a, np.arange(1, a.shape[0] + 1))
        _check_connected(net)
        return net


def _check_connected(net: TransitionNetwork):
    if net.node_count > 1 and not nx.is_connected(net.to_networkx()):
        raise NetworkError("transition network is disconnected")


def build_network(seq: SymbolSequence) -> TransitionNetwork:
    """
    Count consecutive transitions and symmetrize

    Self-transitions are dropped, the directed count matrix A becomes
    A + A.T, and unused symbols are compacted away.

    Raises:
        DegenerateSequenceError: If no transition between distinct states exists
    """
    s = np.asarray(seq.states)
    if s.size < 2:
        raise DegenerateSequenceError("degenerate sequence: fewer than two states")
    src, dst = s[:-1], s[1:]
    moving = src != dst
    if not np.any(moving):
        raise DegenerateSequenceError("degenerate sequence: only self-transitions")

    used, index = np.unique(s, return_inverse=True)
    index = index.reshape(-1)
    directed = np.zeros((used.size, used.size), dtype=np.int64)
    np.add.at(directed, (index[:-1][moving], index[1:][moving]), 1)
    adjacency = directed + directed.T

    net = TransitionNetwork(adjacency, used, seq.method, dict(seq.params), directed)
    _check_connected(net)
    logger.debug(f"Built {seq.method} network: {net.node_count} nodes, {net.edge_count} edges")
    return net


# =====================
# Export
# =====================

def write_edge_list(net: TransitionNetwork, path: Union[str, Path]):
    """Edge list CSV with original symbols: u, v, weight"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["u", "v", "weight"])
        for r, c, w in net.edges():
            writer.writerow([int(net.states[r]), int(net.states[c]), w])


def adjacency_record(net: TransitionNetwork) -> Dict:
    """JSON-ready adjacency with the row -> symbol map"""
    record = {
        "method": net.method,
        "params": net.params,
        "node_count": net.node_count,
        "edge_count": net.edge_count,
        "states": net.states.tolist(),
        "adjacency": net.adjacency.tolist(),
    }
    if net.directed_counts is not None:
        record["directed_counts"] = net.directed_counts.tolist()
    return record
