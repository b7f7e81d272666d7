"""Sparse directed binary graphs, edge-list I/O and per-node cluster counters."""
from __future__ import annotations

import io
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class EdgeListError(ValueError):
    """Raised for malformed edge-list or partition files."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Directed graph without self-loops, stored as two CSR structures.

    ``out_indices[out_indptr[i]:out_indptr[i + 1]]`` are the sorted successors
    of node ``i``; the ``in_*`` pair holds sorted predecessors.
    """

    n_nodes: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray

    @classmethod
    def from_edges(cls, n_nodes: int, src: Iterable[int], dst: Iterable[int]) -> "DirectedGraph":
        """Build from parallel source/target arrays.

        Duplicates are collapsed and self-loops dropped silently; use
        :func:`parse_edge_list` when those need to be counted.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if n_nodes < 0:
            raise ValueError("n_nodes must be non-negative")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n_nodes):
            raise ValueError("edge endpoint out of range")
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if src.size:
            key = np.unique(src * n_nodes + dst)
            src, dst = key // n_nodes, key % n_nodes
        out_indptr, out_indices = _csr(n_nodes, src, dst)
        in_indptr, in_indices = _csr(n_nodes, dst, src)
        return cls(n_nodes, out_indptr, out_indices, in_indptr, in_indices)

    @property
    def n_edges(self) -> int:
        return int(self.out_indices.size)

    def successors(self, i: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[i]:self.out_indptr[i + 1]]

    def predecessors(self, i: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[i]:self.in_indptr[i + 1]]

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge arrays sorted by (src, dst)."""
        src = np.repeat(np.arange(self.n_nodes, dtype=np.int64), self.out_degree())
        return src, self.out_indices.copy()

    def has_edge(self, i: int, j: int) -> bool:
        succ = self.successors(i)
        k = np.searchsorted(succ, j)
        return bool(k < succ.size and succ[k] == j)

    def to_scipy(self):
        """Adjacency as a ``scipy.sparse.csr_matrix`` of float64 ones."""
        from scipy import sparse

        data = np.ones(self.n_edges)
        return sparse.csr_matrix((data, self.out_indices, self.out_indptr),
                                 shape=(self.n_nodes, self.n_nodes))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (self.n_nodes == other.n_nodes
                and np.array_equal(self.out_indptr, other.out_indptr)
                and np.array_equal(self.out_indices, other.out_indices))

    def __repr__(self) -> str:
        return f"DirectedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def _csr(n: int, rows: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(cols[order], dtype=np.int64)


@dataclass
class ParseReport:
    """Counts of lines that did not become distinct edges."""

    duplicates: int = 0
    self_loops: int = 0
    comments: int = 0
    header_nodes: int | None = None
    lines: int = 0
    warnings: list[str] = field(default_factory=list)


_SPLIT = re.compile(r"[\s,]+")
_HEADER = re.compile(r"#\s*nodes\s*=\s*(\d+)\s*$")


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _pairs(text: str, what: str):
    """Yield (lineno, a, b) from a two-column integer file."""
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            yield lineno, line, None
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        if len(tokens) != 2:
            raise EdgeListError(lineno, f"expected 2 tokens per {what}, got {len(tokens)}")
        try:
            a, b = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListError(lineno, f"non-integer token in {line!r}") from None
        if a < 0 or b < 0:
            raise EdgeListError(lineno, "negative node id")
        yield lineno, a, b


def parse_edge_list(source) -> tuple[DirectedGraph, ParseReport]:
    """Parse a whitespace/comma separated ``src dst`` edge list.

    ``source`` may be ``str``, ``bytes`` or a readable file object. Lines
    starting with ``#`` are comments; a leading ``# nodes=N`` comment fixes
    the node count. Duplicated edges are collapsed and self-loops dropped,
    both counted in the returned report.
    """
    text = _as_text(source)
    report = ParseReport()
    src: list[int] = []
    dst: list[int] = []
    seen_data = False
    for lineno, a, b in _pairs(text, "edge"):
        report.lines = lineno
        if b is None:
            if a:
                report.comments += 1
                m = _HEADER.match(a)
                if m and not seen_data:
                    report.header_nodes = int(m.group(1))
            continue
        seen_data = True
        src.append(a)
        dst.append(b)

    s = np.asarray(src, dtype=np.int64)
    d = np.asarray(dst, dtype=np.int64)
    max_id = int(max(s.max(), d.max())) if s.size else -1
    n = max_id + 1
    if report.header_nodes is not None:
        if report.header_nodes <= max_id:
            raise EdgeListError(report.lines, f"node id {max_id} exceeds header nodes={report.header_nodes}")
        n = report.header_nodes

    loops = s == d
    report.self_loops = int(loops.sum())
    s, d = s[~loops], d[~loops]
    report.duplicates = int(s.size - np.unique(s * max(n, 1) + d).size)
    if report.self_loops:
        report.warnings.append(f"dropped {report.self_loops} self-loop(s)")
    if report.duplicates:
        report.warnings.append(f"collapsed {report.duplicates} duplicate edge(s)")
    for msg in report.warnings:
        warnings.warn(msg, stacklevel=2)
    return DirectedGraph.from_edges(n, s, d), report


def write_edge_list(g: DirectedGraph, header: bool = False) -> str:
    """Serialize as ``src dst`` lines sorted by (src, dst).

    With ``header=True`` a ``# nodes=N`` line is prepended so isolated
    trailing nodes survive a round trip.
    """
    src, dst = g.edges()
    buf = io.StringIO()
    if header:
        buf.write(f"# nodes={g.n_nodes}\n")
    for a, b in zip(src.tolist(), dst.tolist()):
        buf.write(f"{a} {b}\n")
    return buf.getvalue()


def read_partition(source, n_nodes: int | None = None) -> np.ndarray:
    """Read ``node cluster`` lines into a label array.

    Every node 0..N-1 must appear exactly once. Labels are returned as
    written; compaction is the caller's business.
    """
    text = _as_text(source)
    nodes: list[int] = []
    labels: list[int] = []
    for lineno, a, b in _pairs(text, "partition line"):
        if b is None:
            continue
        nodes.append(a)
        labels.append(b)
    nodes_arr = np.asarray(nodes, dtype=np.int64)
    n = n_nodes if n_nodes is not None else (int(nodes_arr.max()) + 1 if nodes_arr.size else 0)
    out = np.full(n, -1, dtype=np.int64)
    if nodes_arr.size and nodes_arr.max() >= n:
        raise ValueError(f"partition mentions node {int(nodes_arr.max())} but graph has {n} nodes")
    if np.unique(nodes_arr).size != nodes_arr.size:
        raise ValueError("partition lists a node more than once")
    out[nodes_arr] = labels
    if (out < 0).any():
        raise ValueError(f"partition misses {int((out < 0).sum())} node(s)")
    return out


def write_partition(labels) -> str:
    labels = np.asarray(labels)
    return "".join(f"{i} {int(c)}\n" for i, c in enumerate(labels.tolist()))


def node_cluster_edge_counts(g: DirectedGraph, labels: np.ndarray, n_clusters: int,
                             i: int) -> tuple[np.ndarray, np.ndarray]:
    """Successors and predecessors of ``i`` tallied by cluster.

    Returns ``(out_counts, in_counts)``, each of length ``n_clusters``.
    ``labels`` may also be a :class:`~greedy_icl.stats.Partition`.
    """
    if hasattr(labels, "labels"):
        labels = labels.labels
    if not 0 <= i < g.n_nodes:
        raise IndexError(f"node {i} out of range for graph with {g.n_nodes} nodes")
    out_counts = np.bincount(labels[g.successors(i)], minlength=n_clusters)
    in_counts = np.bincount(labels[g.predecessors(i)], minlength=n_clusters)
    return out_counts, in_counts
