"""Block sufficient statistics and the exact / asymptotic ICL scores."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .graph import DirectedGraph


@dataclass(frozen=True)
class Priors:
    """Shared Dirichlet (``n0``) and Beta (``eta0``, ``zeta0``) hyperparameters.

    The defaults give uniform priors; ``Priors.jeffreys()`` gives 1/2 everywhere.
    """

    n0: float = 1.0
    eta0: float = 1.0
    zeta0: float = 1.0

    def __post_init__(self):
        for name in ("n0", "eta0", "zeta0"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")

    @classmethod
    def jeffreys(cls) -> "Priors":
        return cls(0.5, 0.5, 0.5)


@dataclass(frozen=True, eq=False)
class Partition:
    """Hard assignment of nodes to clusters ``0..K-1``."""

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if self.K < 0:
            raise ValueError("K must be non-negative")
        if labels.size and (labels.min() < 0 or labels.max() >= self.K):
            raise ValueError(f"cluster index out of range for K={self.K}")

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Compact arbitrary integer labels to ``0..K-1`` (sorted label order)."""
        labels = np.asarray(labels)
        if labels.size == 0:
            return cls(np.zeros(0, dtype=np.int64), 0)
        uniq, inv = np.unique(labels, return_inverse=True)
        return cls(inv.astype(np.int64).ravel(), int(uniq.size))

    @property
    def n_nodes(self) -> int:
        return int(self.labels.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K)

    def is_dense(self) -> bool:
        return bool((self.sizes() > 0).all())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.K == other.K and np.array_equal(self.labels, other.labels)

    def __len__(self) -> int:
        return self.n_nodes


@dataclass(frozen=True, eq=False)
class BlockStats:
    """Cluster sizes ``m_k`` and directed block edge counts ``e_kl``."""

    sizes: np.ndarray
    edges: np.ndarray
    n_nodes: int

    @property
    def K(self) -> int:
        return int(self.sizes.size)

    def pairs(self) -> np.ndarray:
        return pair_counts(self.sizes)

    def non_edges(self) -> np.ndarray:
        return self.pairs() - self.edges


def pair_counts(sizes: np.ndarray) -> np.ndarray:
    """Ordered node pairs between blocks, excluding self pairs on the diagonal."""
    m = np.asarray(sizes, dtype=np.int64)
    return np.outer(m, m) - np.diag(m)


def compute_stats(g: DirectedGraph, z: Partition) -> BlockStats:
    if z.n_nodes != g.n_nodes:
        raise ValueError(f"partition covers {z.n_nodes} nodes, graph has {g.n_nodes}")
    labels = z.labels
    if labels.size and labels.max() >= z.K:
        raise ValueError("assignment index >= K")
    K = z.K
    src, dst = g.edges()
    flat = labels[src] * K + labels[dst]
    edges = np.bincount(flat, minlength=K * K).reshape(K, K).astype(np.int64)
    return BlockStats(z.sizes().astype(np.int64), edges, g.n_nodes)


def log_beta(a, b):
    return gammaln(a) + gammaln(b) - gammaln(a + b)


def log_dirichlet_norm(x) -> float:
    """``log C(x) = sum lnG(x_k) - lnG(sum x_k)``."""
    x = np.asarray(x, dtype=float)
    return float(gammaln(x).sum() - gammaln(x.sum()))


def icl_exact(s: BlockStats, p: Priors) -> float:
    """Integrated complete-data log likelihood ``log p(X, Z | K)``.

    Closed form under conjugate Dirichlet/Beta priors:
    ``sum_kl log B(eta_kl, zeta_kl)/B(eta0, zeta0) + log C(n)/C(n0)``.
    """
    K = s.K
    if K == 0 or s.n_nodes == 0:
        raise ValueError("ICL is undefined for an empty graph or K=0")
    eta = p.eta0 + s.edges
    zeta = p.zeta0 + s.non_edges()
    blocks = float((log_beta(eta, zeta) - log_beta(p.eta0, p.zeta0)).sum())
    memberships = log_dirichlet_norm(p.n0 + s.sizes) - log_dirichlet_norm(np.full(K, p.n0))
    return blocks + memberships


def _xlogy(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    nz = x > 0
    out[nz] = x[nz] * np.log(y[nz])
    return out


def complete_loglik_mle(s: BlockStats) -> float:
    """``max_{alpha, Pi} log p(X, Z | alpha, Pi)`` with plug-in MLEs (0 log 0 = 0)."""
    m = s.sizes.astype(float)
    pairs = s.pairs().astype(float)
    e = s.edges.astype(float)
    pi = np.divide(e, pairs, out=np.zeros_like(e), where=pairs > 0)
    ll = _xlogy(m, m / s.n_nodes).sum()
    ll += _xlogy(e, pi).sum() + _xlogy(pairs - e, 1.0 - pi).sum()
    return float(ll)


def icl_asymptotic(g: DirectedGraph, z: Partition) -> float:
    """Laplace/Stirling ICL approximation for a directed graph without self-loops."""
    s = compute_stats(g, z)
    N, K = s.n_nodes, s.K
    if K == 0 or N == 0:
        raise ValueError("ICL is undefined for an empty graph or K=0")
    penalty = 0.5 * K * K * math.log(N * (N - 1)) if N > 1 else 0.0
    penalty += 0.5 * (K - 1) * math.log(N)
    return complete_loglik_mle(s) - penalty
