"""Stochastic block model sampler and the four benchmark settings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DirectedGraph
from .stats import Partition

# Largest number of candidate pairs drawn in one batch when sampling a block.
_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class SbmParams:
    alpha: np.ndarray
    pi: np.ndarray
    n_nodes: int
    seed: int = 0

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "pi", pi)
        if alpha.ndim != 1 or alpha.size == 0:
            raise ValueError("alpha must be a non-empty vector")
        if (alpha < 0).any() or not np.isclose(alpha.sum(), 1.0):
            raise ValueError("alpha must be non-negative and sum to 1")
        if pi.shape != (alpha.size, alpha.size):
            raise ValueError(f"pi must be {alpha.size}x{alpha.size}, got {pi.shape}")
        if not np.isfinite(pi).all() or (pi < 0).any() or (pi > 1).any():
            raise ValueError("pi entries must be probabilities")
        if self.n_nodes < 0:
            raise ValueError("n_nodes must be non-negative")

    @property
    def K(self) -> int:
        return int(self.alpha.size)


def sample_sbm(p: SbmParams) -> tuple[DirectedGraph, Partition]:
    """Draw memberships i.i.d. from ``alpha``, then every ordered pair i != j
    independently with probability ``pi[z_i, z_j]``."""
    rng = np.random.default_rng(p.seed)
    labels = rng.choice(p.K, size=p.n_nodes, p=p.alpha)
    members = [np.flatnonzero(labels == k) for k in range(p.K)]
    src_parts, dst_parts = [], []
    for k in range(p.K):
        rows = members[k]
        for l in range(p.K):
            cols = members[l]
            prob = p.pi[k, l]
            if rows.size == 0 or cols.size == 0 or prob == 0.0:
                continue
            step = max(1, _CHUNK // cols.size)
            for start in range(0, rows.size, step):
                block_rows = rows[start:start + step]
                hit = rng.random((block_rows.size, cols.size)) < prob
                r, c = np.nonzero(hit)
                s, d = block_rows[r], cols[c]
                keep = s != d
                src_parts.append(s[keep])
                dst_parts.append(d[keep])
    src = np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.zeros(0, dtype=np.int64)
    return DirectedGraph.from_edges(p.n_nodes, src, dst), Partition.from_labels(labels)


_DEFAULTS = {1: (100, 5), 2: (100, 5), 3: (500, 10), 4: (10_000, 50)}


@dataclass(frozen=True)
class SettingConfig:
    setting_id: int = 1
    beta: float = 0.45
    epsilon: float = 0.01
    n_nodes: int | None = None
    k: int | None = None
    seed: int = 0

    def resolved(self) -> tuple[int, int]:
        if self.setting_id not in _DEFAULTS:
            raise ValueError(f"unknown setting {self.setting_id}; expected one of 1-4")
        n, k = _DEFAULTS[self.setting_id]
        return (self.n_nodes if self.n_nodes is not None else n,
                self.k if self.k is not None else k)


def community_pi(k: int, beta: float, epsilon: float) -> np.ndarray:
    pi = np.full((k, k), epsilon, dtype=float)
    np.fill_diagonal(pi, beta)
    return pi


def hub_pi(k: int, beta: float, epsilon: float) -> np.ndarray:
    """Communities plus a first cluster of hubs linked at ``beta`` both ways."""
    pi = community_pi(k, beta, epsilon)
    pi[0, :] = beta
    pi[:, 0] = beta
    return pi


def random_uniform_upper(rng: np.random.Generator, size, upper: float = 0.45) -> np.ndarray:
    """``U(upper)`` read as the uniform law on ``[0, upper)``."""
    return rng.uniform(0.0, upper, size=size)


def sparse_random_pi(k: int, epsilon: float, rng: np.random.Generator,
                     p_active: float = 0.1, upper: float = 0.45) -> np.ndarray:
    """Diagonal ``U``; each off-diagonal entry is ``U`` w.p. ``p_active``, else ``epsilon``."""
    u = random_uniform_upper(rng, (k, k), upper)
    active = rng.random((k, k)) < p_active
    pi = np.where(active, u, epsilon)
    np.fill_diagonal(pi, np.diag(u))
    return pi


def make_setting(cfg: SettingConfig) -> SbmParams:
    n, k = cfg.resolved()
    alpha = np.full(k, 1.0 / k)
    if cfg.setting_id in (1, 3):
        pi = community_pi(k, cfg.beta, cfg.epsilon)
    elif cfg.setting_id == 2:
        pi = hub_pi(k, cfg.beta, cfg.epsilon)
    else:
        # Pi gets its own stream so it does not shift with the sampler's draws.
        pi_rng = np.random.default_rng([cfg.seed, 4])
        pi = sparse_random_pi(k, cfg.epsilon, pi_rng)
    return SbmParams(alpha, pi, n, cfg.seed)


def beta_grid() -> np.ndarray:
    """0.45, 0.43, ..., 0.03, 0.01."""
    return np.round(np.arange(0.45, 0.0, -0.02), 2)
