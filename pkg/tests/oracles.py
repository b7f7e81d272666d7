"""Independent reference computations used as test oracles.

Nothing here imports the optimised code paths: ICL is evaluated straight
from a dense adjacency matrix with explicit pair loops.
"""
from __future__ import annotations

import math

import numpy as np

from greedy_icl.graph import DirectedGraph


def dense_adjacency(g: DirectedGraph) -> np.ndarray:
    a = np.zeros((g.n_nodes, g.n_nodes), dtype=np.int64)
    for i in range(g.n_nodes):
        for j in g.successors(i):
            a[i, j] = 1
    return a


def _lbeta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def direct_icl(adj: np.ndarray, labels, n0=1.0, eta0=1.0, zeta0=1.0) -> float:
    """log p(X, Z | K) with Dirichlet/Beta marginals, counted pair by pair."""
    labels = list(labels)
    ids = sorted(set(labels))
    index = {c: k for k, c in enumerate(ids)}
    K = len(ids)
    N = len(labels)
    eta = [[eta0] * K for _ in range(K)]
    zeta = [[zeta0] * K for _ in range(K)]
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            k, l = index[labels[i]], index[labels[j]]
            if adj[i][j]:
                eta[k][l] += 1
            else:
                zeta[k][l] += 1
    n = [n0] * K
    for c in labels:
        n[index[c]] += 1
    total = 0.0
    for k in range(K):
        for l in range(K):
            total += _lbeta(eta[k][l], zeta[k][l]) - _lbeta(eta0, zeta0)
    log_c = sum(math.lgamma(x) for x in n) - math.lgamma(sum(n))
    log_c0 = K * math.lgamma(n0) - math.lgamma(K * n0)
    return total + log_c - log_c0


def set_partitions(n: int):
    """All set partitions of ``range(n)`` as restricted growth strings."""
    if n == 0:
        yield []
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for c in range(top + 2):
            prefix.append(c)
            yield from rec(prefix, max(top, c))
            prefix.pop()

    yield from rec([0], 0)


def brute_force_max(adj: np.ndarray, n0=1.0, eta0=1.0, zeta0=1.0):
    best, arg = -math.inf, None
    for z in set_partitions(len(adj)):
        v = direct_icl(adj, z, n0, eta0, zeta0)
        if v > best:
            best, arg = v, z
    return best, arg


def random_graph(rng: np.random.Generator, n: int, p: float) -> DirectedGraph:
    a = rng.random((n, n)) < p
    np.fill_diagonal(a, False)
    s, d = np.nonzero(a)
    return DirectedGraph.from_edges(n, s, d)


def planted_toy(rng: np.random.Generator, n: int = 6, p_in: float = 0.9,
                p_out: float = 0.05) -> tuple[DirectedGraph, np.ndarray]:
    labels = np.arange(n) % 2
    p = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    a = rng.random((n, n)) < p
    np.fill_diagonal(a, False)
    s, d = np.nonzero(a)
    return DirectedGraph.from_edges(n, s, d), labels
