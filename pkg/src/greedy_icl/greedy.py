"""Greedy ICL optimisation by single-node label swaps."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .graph import DirectedGraph
from .stats import BlockStats, Partition, Priors, icl_exact, log_beta

#: Minimum ICL gain for a move to be accepted.
EPS_ACCEPT = 1e-10
#: Safety stop for pathological floating-point cycling.
MAX_SWEEPS = 1000


@dataclass(frozen=True)
class SwapDelta:
    target_cluster: int
    delta: float
    empties_source: bool


@dataclass(frozen=True)
class TraceEntry:
    pass_index: int
    moves: int
    icl: float
    K: int
    kind: str = "sweep"


@dataclass
class FitResult:
    partition: Partition
    icl: float
    trace: list[TraceEntry] = field(default_factory=list)
    sweeps: int = 0
    moves: int = 0
    merges: int = 0
    seed: int | None = None
    restarts: list = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.partition.K


class FitState:
    """Mutable optimisation state: labels, block counts and the tracked ICL.

    Counts live in capacity-sized buffers so clusters can be deleted in
    place; ``K`` is the number of live clusters.
    """

    def __init__(self, graph: DirectedGraph, partition: Partition, priors: Priors = Priors(),
                 seed: int | np.random.Generator | None = 0):
        if partition.n_nodes != graph.n_nodes:
            raise ValueError(f"partition covers {partition.n_nodes} nodes, graph has {graph.n_nodes}")
        if graph.n_nodes == 0:
            raise ValueError("cannot fit an empty graph")
        if not partition.is_dense():
            partition = Partition.from_labels(partition.labels)
        self.graph = graph
        self.priors = priors
        self.rng = np.random.default_rng(seed)
        self.labels = partition.labels.copy()
        self.K = partition.K
        cap = max(self.K, 1)
        self.sizes = np.zeros(cap, dtype=np.int64)
        self.sizes[:self.K] = partition.sizes()
        src, dst = graph.edges()
        flat = self.labels[src] * cap + self.labels[dst]
        self.edges = np.bincount(flat, minlength=cap * cap).reshape(cap, cap).astype(np.int64)
        self.terms = np.zeros((cap, cap))
        self._logb0 = float(log_beta(priors.eta0, priors.zeta0))
        kern.fill_block_terms(self.edges, self.terms, self.sizes, self.K, *self._beta_args())
        self.icl = icl_exact(self.stats, priors)
        self.trace: list[TraceEntry] = []
        self._o = np.zeros(cap, dtype=np.int64)
        self._c = np.zeros(cap, dtype=np.int64)

    def _beta_args(self):
        return self.priors.eta0, self.priors.zeta0, self._logb0

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes

    @property
    def partition(self) -> Partition:
        return Partition(self.labels.copy(), self.K)

    @property
    def stats(self) -> BlockStats:
        K = self.K
        return BlockStats(self.sizes[:K].copy(), self.edges[:K, :K].copy(), self.n_nodes)

    def resync(self) -> float:
        """Recompute the ICL from the block counts; returns the drift removed."""
        exact = icl_exact(self.stats, self.priors)
        drift = exact - self.icl
        self.icl = exact
        return drift

    def _counts(self, i: int):
        g = self.graph
        kern.node_counts(g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
                         self.labels, self.K, i, self._o, self._c)
        return self._o, self._c

    def _all_deltas(self, i: int) -> np.ndarray:
        o, c = self._counts(i)
        out = np.empty(self.K)
        p = self.priors
        kern.swap_deltas(self.edges, self.terms, self.sizes, self.K, int(self.labels[i]), o, c,
                         self.n_nodes, p.n0, *self._beta_args(), out)
        return out


def _check_swap(state: FitState, i: int, h: int) -> int:
    if not 0 <= i < state.n_nodes:
        raise IndexError(f"node {i} out of range")
    if not 0 <= h < state.K:
        raise IndexError(f"cluster {h} out of range for K={state.K}")
    g = int(state.labels[i])
    if h == g:
        raise ValueError(f"node {i} is already in cluster {h}")
    return g


def swap_deltas(state: FitState, i: int) -> np.ndarray:
    """ICL change for moving node ``i`` to each cluster (``-inf`` at its own)."""
    if not 0 <= i < state.n_nodes:
        raise IndexError(f"node {i} out of range")
    return state._all_deltas(i)


def delta_swap(state: FitState, i: int, h: int) -> SwapDelta:
    g = _check_swap(state, i, h)
    deltas = state._all_deltas(i)
    return SwapDelta(h, float(deltas[h]), bool(state.sizes[g] == 1))


def apply_swap(state: FitState, i: int, h: int, delta: float | None = None) -> FitState:
    """Move node ``i`` to cluster ``h`` in place.

    If cluster ``g`` empties it is removed and the last cluster takes its
    index. ``delta`` is added to the tracked ICL; it is computed when omitted.
    """
    g = _check_swap(state, i, h)
    if delta is None:
        delta = delta_swap(state, i, h).delta
    o, c = state._counts(i)
    state.K = kern.move_node(state.labels, state.edges, state.terms, state.sizes, state.K,
                             i, g, h, o, c, *state._beta_args())
    state.icl += delta
    return state


def greedy_sweep(state: FitState, eps: float = EPS_ACCEPT) -> tuple[FitState, int]:
    """Visit every node once in a fresh random order, applying best improving swaps."""
    if state.K == 1:
        return state, 0
    order = state.rng.permutation(state.n_nodes).astype(np.int64)
    g = state.graph
    p = state.priors
    K, moves, gain = kern.sweep(order, g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
                                state.labels, state.edges, state.terms, state.sizes, state.K,
                                state.n_nodes, p.n0, *state._beta_args(), eps)
    state.K = int(K)
    state.icl += gain
    return state, int(moves)


def run_sweeps(state: FitState, eps: float = EPS_ACCEPT, max_sweeps: int = MAX_SWEEPS) -> int:
    """Sweep until a pass accepts no move; returns the number of moves."""
    total = 0
    for _ in range(max_sweeps):
        before = state.icl
        state, moves = greedy_sweep(state, eps)
        state.resync()
        state.trace.append(TraceEntry(len(state.trace), moves, state.icl, state.K))
        total += moves
        if moves == 0:
            return total
        if state.icl < before - 1e-6 * max(1.0, abs(before)):
            raise RuntimeError("ICL decreased during a sweep")
    warnings.warn(f"greedy sweeps stopped after {max_sweeps} passes without converging")
    return total


def greedy_fit(g: DirectedGraph, z0: Partition, p: Priors = Priors(), seed: int = 0,
               eps: float = EPS_ACCEPT) -> FitResult:
    """Swap-only greedy ICL ascent from ``z0`` to a local maximum."""
    if z0.K < 1:
        raise ValueError("initial partition needs at least one cluster")
    state = FitState(g, z0, p, seed)
    moves = run_sweeps(state, eps)
    return FitResult(state.partition, state.icl, list(state.trace), len(state.trace), moves, 0, seed)

