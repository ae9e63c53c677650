"""
Brute-force references for persistence and the bottleneck distance

Full Z/2 boundary matrix over vertices, edges and triangles in
(value, dimension, vertices) order, reduced column by column without any
shortcut. Used to check the production engines.
"""
import itertools

import numpy as np


def rips_pairs(d):
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    simplices = [(0.0, 0, (v,)) for v in range(n)]
    simplices += [(d[u, v], 1, (u, v)) for u, v in itertools.combinations(range(n), 2)]
    simplices += [
        (max(d[u, v], d[u, w], d[v, w]), 2, (u, v, w))
        for u, v, w in itertools.combinations(range(n), 3)
    ]
    simplices.sort()
    index = {s[2]: i for i, s in enumerate(simplices)}

    columns = []
    for value, dim, verts in simplices:
        if dim == 0:
            columns.append(set())
        else:
            columns.append({index[face] for face in itertools.combinations(verts, dim)})

    low_owner = {}
    pairs = {0: [], 1: []}
    for j, column in enumerate(columns):
        while column:
            low = max(column)
            if low not in low_owner:
                break
            column ^= columns[low_owner[low]]
        if column:
            low = max(column)
            low_owner[low] = j
            birth, death = simplices[low][0], simplices[j][0]
            dim = simplices[low][1]
            if death > birth:
                pairs[dim].append((birth, death))
    return {dim: np.array(sorted(p), dtype=float).reshape(-1, 2) for dim, p in pairs.items()}


def random_metric(rng, n):
    """Euclidean distances of random planar points, rounded to force ties"""
    pts = rng.uniform(0, 10, size=(n, 2))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    return np.round(d, 1)


def random_dissimilarity(rng, n):
    """Symmetric non-negative matrix without the triangle inequality"""
    m = rng.integers(1, 8, size=(n, n)).astype(float)
    m = np.triu(m, 1)
    return m + m.T


def brute_bottleneck(a, b):
    """Bottleneck distance by trying every matching of the diagonal-augmented diagrams"""
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    p, q = len(a), len(b)
    size = p + q
    if size == 0:
        return 0.0
    cost = np.zeros((size, size))
    half_a = (a[:, 1] - a[:, 0]) / 2.0
    half_b = (b[:, 1] - b[:, 0]) / 2.0
    cost[:p, :q] = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    cost[:p, q:] = half_a[:, None]
    cost[p:, :q] = half_b[None, :]
    rows = np.arange(size)
    return min(float(cost[rows, list(perm)].max()) for perm in itertools.permutations(range(size)))
