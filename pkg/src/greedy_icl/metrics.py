"""Entropy and (normalized) mutual information between two partitions, in nats."""
from __future__ import annotations

import math

import numpy as np

from .stats import Partition


def _labels(z) -> np.ndarray:
    labels = z.labels if isinstance(z, Partition) else np.asarray(z)
    if labels.size == 0:
        raise ValueError("partition has no nodes")
    return labels


def _plogp(p: np.ndarray) -> float:
    p = p[p > 0]
    return -math.fsum((p * np.log(p)).tolist())


def entropy(z) -> float:
    labels = _labels(z)
    _, counts = np.unique(labels, return_counts=True)
    return _plogp(counts / labels.size)


def _counts(est, truth) -> np.ndarray:
    a, b = _labels(est), _labels(truth)
    if a.size != b.size:
        raise ValueError(f"partitions cover {a.size} and {b.size} nodes")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia.ravel(), ib.ravel()), 1)
    return table


def confusion(est, truth) -> np.ndarray:
    """Joint frequency table ``p_kl`` (rows: ``est``, columns: ``truth``)."""
    table = _counts(est, truth)
    return table / table.sum()


def _mi_and_entropies(est, truth) -> tuple[float, float, float]:
    table = _counts(est, truth)
    n = table.sum()
    # integer marginals keep the result bit-identical under argument swap
    pe = table.sum(axis=1) / n
    ps = table.sum(axis=0) / n
    k, l = np.nonzero(table)
    p = table[k, l] / n
    # fsum is exactly rounded, hence independent of summation order
    mi = math.fsum((p * np.log(p / (pe[k] * ps[l]))).tolist())
    return max(mi, 0.0), _plogp(pe), _plogp(ps)


def mutual_information(est, truth) -> float:
    return _mi_and_entropies(est, truth)[0]


def nmi(est, truth) -> float:
    """Mutual information divided by the larger of the two entropies.

    Two single-cluster partitions have zero entropy each; that case is
    reported as 0.
    """
    mi, he, hs = _mi_and_entropies(est, truth)
    denom = max(he, hs)
    if denom == 0.0:
        return 0.0
    return min(mi / denom, 1.0)
