"""Final hierarchical pass: fuse pairs of clusters while the ICL improves."""
from __future__ import annotations

from dataclasses import dataclass

from . import _kernels as kern
from .greedy import EPS_ACCEPT, FitState, TraceEntry


@dataclass(frozen=True)
class MergeDelta:
    source: int
    target: int
    delta: float


def _check_pair(state: FitState, g: int, h: int):
    if g == h:
        raise ValueError("cannot merge a cluster with itself")
    for c in (g, h):
        if not 0 <= c < state.K:
            raise IndexError(f"cluster {c} out of range for K={state.K}")


def delta_merge(state: FitState, g: int, h: int) -> float:
    """ICL change for fusing clusters ``g`` and ``h`` (symmetric in the pair)."""
    _check_pair(state, g, h)
    p = state.priors
    return float(kern.merge_delta(state.edges, state.terms, state.sizes, state.K, g, h,
                                  state.n_nodes, p.n0, *state._beta_args()))


def best_merge(state: FitState) -> MergeDelta | None:
    if state.K < 2:
        return None
    p = state.priors
    g, h, d = kern.best_merge(state.edges, state.terms, state.sizes, state.K,
                              state.n_nodes, p.n0, *state._beta_args())
    return MergeDelta(int(h), int(g), float(d))


def apply_merge(state: FitState, g: int, h: int, delta: float | None = None) -> FitState:
    """Fuse ``g`` into ``h`` in place; the fused cluster keeps the smaller index."""
    _check_pair(state, g, h)
    if delta is None:
        delta = delta_merge(state, g, h)
    keep, drop = min(g, h), max(g, h)
    state.K = kern.fuse_clusters(state.labels, state.edges, state.terms, state.sizes, state.K,
                                 keep, drop, *state._beta_args())
    state.icl += delta
    return state


def merge_pass(state: FitState, eps: float = EPS_ACCEPT) -> tuple[FitState, int]:
    """Steepest-ascent merging until no pair improves the ICL by more than ``eps``."""
    merges = 0
    while True:
        best = best_merge(state)
        if best is None or best.delta <= eps:
            break
        apply_merge(state, best.source, best.target, best.delta)
        merges += 1
    if merges:
        state.resync()
        state.trace.append(TraceEntry(len(state.trace), merges, state.icl, state.K, "merge"))
    return state, merges
