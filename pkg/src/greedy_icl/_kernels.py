"""Compiled inner loops for the swap and merge moves.

All kernels work on capacity-sized buffers: ``E`` (edge counts) and ``F``
(cached per-block log Beta ratios) are ``cap x cap``, ``m`` (sizes) is
``cap``; only the leading ``K`` entries are live. ``F[k, l]`` always holds
``block_term(E[k, l], pairs(k, l))`` for live blocks.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True, inline="always")
def block_term(e, p, eta0, zeta0, logb0):
    """``log B(eta0 + e, zeta0 + p - e) - log B(eta0, zeta0)``."""
    return (math.lgamma(eta0 + e) + math.lgamma(zeta0 + (p - e))
            - math.lgamma(eta0 + zeta0 + p) - logb0)


@njit(cache=True, inline="always")
def pairs(m, k, l):
    if k == l:
        return m[k] * (m[k] - 1)
    return m[k] * m[l]


@njit(cache=True)
def fill_block_terms(E, F, m, K, eta0, zeta0, logb0):
    for k in range(K):
        for l in range(K):
            F[k, l] = block_term(E[k, l], pairs(m, k, l), eta0, zeta0, logb0)


@njit(cache=True)
def refresh_cluster_terms(E, F, m, K, a, eta0, zeta0, logb0):
    for l in range(K):
        F[a, l] = block_term(E[a, l], pairs(m, a, l), eta0, zeta0, logb0)
        F[l, a] = block_term(E[l, a], pairs(m, l, a), eta0, zeta0, logb0)


@njit(cache=True)
def node_counts(out_indptr, out_indices, in_indptr, in_indices, labels, K, i, o, c):
    for k in range(K):
        o[k] = 0
        c[k] = 0
    for p in range(out_indptr[i], out_indptr[i + 1]):
        o[labels[out_indices[p]]] += 1
    for p in range(in_indptr[i], in_indptr[i + 1]):
        c[labels[in_indices[p]]] += 1


@njit(cache=True)
def swap_deltas(E, F, m, K, g, o, c, N, n0, eta0, zeta0, logb0, out):
    """ICL change for moving one node of cluster ``g`` (with neighbour
    tallies ``o``/``c``) to every other cluster; ``out[g]`` is -inf."""
    mg = m[g]
    empties = mg == 1
    # Row g and column g blocks outside {g, h} do not depend on h.
    rg = np.zeros(K)
    cg = np.zeros(K)
    srg = 0.0
    scg = 0.0
    for l in range(K):
        if l == g:
            continue
        if empties:
            rg[l] = -F[g, l]
            cg[l] = -F[l, g]
        else:
            rg[l] = block_term(E[g, l] - o[l], m[g] * m[l] - m[l], eta0, zeta0, logb0) - F[g, l]
            cg[l] = block_term(E[l, g] - c[l], m[l] * m[g] - m[l], eta0, zeta0, logb0) - F[l, g]
        srg += rg[l]
        scg += cg[l]
    if empties:
        dgg = -F[g, g]
        dirichlet = (math.lgamma((K - 1) * n0) + math.lgamma(K * n0 + N)
                     - math.lgamma(K * n0) - math.lgamma((K - 1) * n0 + N) - math.log(n0))
    else:
        dgg = block_term(E[g, g] - o[g] - c[g], (mg - 1) * (mg - 2), eta0, zeta0, logb0) - F[g, g]
        dirichlet = -math.log(n0 + mg - 1)

    for h in range(K):
        if h == g:
            out[h] = NEG_INF
            continue
        mh = m[h]
        d = srg - rg[h] + scg - cg[h] + dgg
        for l in range(K):
            if l == g or l == h:
                continue
            ml = m[l]
            d += block_term(E[h, l] + o[l], (mh + 1) * ml, eta0, zeta0, logb0) - F[h, l]
            d += block_term(E[l, h] + c[l], ml * (mh + 1), eta0, zeta0, logb0) - F[l, h]
        d += block_term(E[h, h] + o[h] + c[h], (mh + 1) * mh, eta0, zeta0, logb0) - F[h, h]
        if empties:
            d -= F[g, h] + F[h, g]
        else:
            d += block_term(E[g, h] + c[g] - o[h], (mg - 1) * (mh + 1), eta0, zeta0, logb0) - F[g, h]
            d += block_term(E[h, g] + o[g] - c[h], (mh + 1) * (mg - 1), eta0, zeta0, logb0) - F[h, g]
        d += math.log(n0 + mh) + dirichlet
        out[h] = d


@njit(cache=True)
def remove_cluster(labels, E, F, m, K, r):
    """Drop empty cluster ``r`` by moving the last live cluster into its slot."""
    last = K - 1
    if r != last:
        for l in range(K):
            E[r, l] = E[last, l]
            F[r, l] = F[last, l]
        for k in range(K):
            E[k, r] = E[k, last]
            F[k, r] = F[k, last]
        m[r] = m[last]
        for i in range(labels.size):
            if labels[i] == last:
                labels[i] = r
    for k in range(K):
        E[last, k] = 0
        E[k, last] = 0
        F[last, k] = 0.0
        F[k, last] = 0.0
    m[last] = 0
    return K - 1


@njit(cache=True)
def move_node(labels, E, F, m, K, i, g, h, o, c, eta0, zeta0, logb0):
    """Reassign node ``i`` from ``g`` to ``h``; returns the new live K."""
    for l in range(K):
        E[g, l] -= o[l]
        E[h, l] += o[l]
    for k in range(K):
        E[k, g] -= c[k]
        E[k, h] += c[k]
    m[g] -= 1
    m[h] += 1
    labels[i] = h
    if m[g] == 0:
        K = remove_cluster(labels, E, F, m, K, g)
        if h == K:
            h = g
    else:
        refresh_cluster_terms(E, F, m, K, g, eta0, zeta0, logb0)
    refresh_cluster_terms(E, F, m, K, h, eta0, zeta0, logb0)
    return K


@njit(cache=True)
def refresh_shifts(E, F, m, K, a, R, C, eta0, zeta0, logb0):
    """Recompute the shift entries touching cluster ``a``.

    ``R[k, l]`` is the change of block ``(k, l)`` when ``k`` gains one member
    with no links into ``l``; ``C[k, l]`` the same when ``l`` gains it with no
    links from ``k``. Diagonals are kept at zero.
    """
    for l in range(K):
        if l == a:
            R[a, a] = 0.0
            C[a, a] = 0.0
            continue
        R[a, l] = block_term(E[a, l], (m[a] + 1) * m[l], eta0, zeta0, logb0) - F[a, l]
        R[l, a] = block_term(E[l, a], (m[l] + 1) * m[a], eta0, zeta0, logb0) - F[l, a]
        C[l, a] = block_term(E[l, a], m[l] * (m[a] + 1), eta0, zeta0, logb0) - F[l, a]
        C[a, l] = block_term(E[a, l], m[a] * (m[l] + 1), eta0, zeta0, logb0) - F[a, l]


@njit(cache=True)
def fill_shifts(E, F, m, K, R, C, row_r, col_c, eta0, zeta0, logb0):
    for a in range(K):
        refresh_shifts(E, F, m, K, a, R, C, eta0, zeta0, logb0)
    sum_shifts(R, C, K, row_r, col_c)


@njit(cache=True)
def sum_shifts(R, C, K, row_r, col_c):
    for k in range(K):
        sr = 0.0
        sc = 0.0
        for l in range(K):
            sr += R[k, l]
            sc += C[l, k]
        row_r[k] = sr
        col_c[k] = sc


@njit(cache=True)
def swap_deltas_sparse(E, F, m, K, g, o, c, nz_o, n_o, nz_c, n_c, R, C, row_r, col_c,
                       N, n0, eta0, zeta0, logb0, out):
    """Same values as :func:`swap_deltas`, but blocks between ``h`` and a
    cluster the node has no links with come from the cached shifts, so only
    the node's neighbour clusters cost log-gamma evaluations."""
    mg = m[g]
    empties = mg == 1
    rg = np.zeros(K)
    cg = np.zeros(K)
    srg = 0.0
    scg = 0.0
    for l in range(K):
        if l == g:
            continue
        if empties:
            rg[l] = -F[g, l]
            cg[l] = -F[l, g]
        else:
            rg[l] = block_term(E[g, l] - o[l], m[g] * m[l] - m[l], eta0, zeta0, logb0) - F[g, l]
            cg[l] = block_term(E[l, g] - c[l], m[l] * m[g] - m[l], eta0, zeta0, logb0) - F[l, g]
        srg += rg[l]
        scg += cg[l]
    if empties:
        dgg = -F[g, g]
        dirichlet = (math.lgamma((K - 1) * n0) + math.lgamma(K * n0 + N)
                     - math.lgamma(K * n0) - math.lgamma((K - 1) * n0 + N) - math.log(n0))
    else:
        dgg = block_term(E[g, g] - o[g] - c[g], (mg - 1) * (mg - 2), eta0, zeta0, logb0) - F[g, g]
        dirichlet = -math.log(n0 + mg - 1)

    for h in range(K):
        if h == g:
            out[h] = NEG_INF
            continue
        mh = m[h]
        d = srg - rg[h] + scg - cg[h] + dgg
        d += row_r[h] - R[h, g] + col_c[h] - C[g, h]
        for t in range(n_o):
            l = nz_o[t]
            if l == g or l == h:
                continue
            d += (block_term(E[h, l] + o[l], (mh + 1) * m[l], eta0, zeta0, logb0)
                  - F[h, l] - R[h, l])
        for t in range(n_c):
            l = nz_c[t]
            if l == g or l == h:
                continue
            d += (block_term(E[l, h] + c[l], m[l] * (mh + 1), eta0, zeta0, logb0)
                  - F[l, h] - C[l, h])
        d += block_term(E[h, h] + o[h] + c[h], (mh + 1) * mh, eta0, zeta0, logb0) - F[h, h]
        if empties:
            d -= F[g, h] + F[h, g]
        else:
            d += block_term(E[g, h] + c[g] - o[h], (mg - 1) * (mh + 1), eta0, zeta0, logb0) - F[g, h]
            d += block_term(E[h, g] + o[g] - c[h], (mh + 1) * (mg - 1), eta0, zeta0, logb0) - F[h, g]
        d += math.log(n0 + mh) + dirichlet
        out[h] = d


@njit(cache=True)
def sweep(order, out_indptr, out_indices, in_indptr, in_indices, labels, E, F, m, K,
          N, n0, eta0, zeta0, logb0, eps):
    """One pass over ``order``; returns ``(K, accepted moves, total gain)``."""
    cap = m.size
    o = np.zeros(cap, dtype=np.int64)
    c = np.zeros(cap, dtype=np.int64)
    nz_o = np.empty(cap, dtype=np.int64)
    nz_c = np.empty(cap, dtype=np.int64)
    deltas = np.empty(cap)
    R = np.zeros((cap, cap))
    C = np.zeros((cap, cap))
    row_r = np.zeros(cap)
    col_c = np.zeros(cap)
    fill_shifts(E, F, m, K, R, C, row_r, col_c, eta0, zeta0, logb0)
    moves = 0
    gain = 0.0
    for t in range(order.size):
        if K == 1:
            break
        i = order[t]
        g = labels[i]
        node_counts(out_indptr, out_indices, in_indptr, in_indices, labels, K, i, o, c)
        n_o = 0
        n_c = 0
        for k in range(K):
            if o[k]:
                nz_o[n_o] = k
                n_o += 1
            if c[k]:
                nz_c[n_c] = k
                n_c += 1
        swap_deltas_sparse(E, F, m, K, g, o, c, nz_o, n_o, nz_c, n_c, R, C, row_r, col_c,
                           N, n0, eta0, zeta0, logb0, deltas)
        best = g
        best_delta = eps
        for h in range(K):
            if deltas[h] > best_delta:
                best_delta = deltas[h]
                best = h
        if best != g:
            k_before = K
            K = move_node(labels, E, F, m, K, i, g, best, o, c, eta0, zeta0, logb0)
            if K != k_before:
                fill_shifts(E, F, m, K, R, C, row_r, col_c, eta0, zeta0, logb0)
            else:
                refresh_shifts(E, F, m, K, g, R, C, eta0, zeta0, logb0)
                refresh_shifts(E, F, m, K, best, R, C, eta0, zeta0, logb0)
                sum_shifts(R, C, K, row_r, col_c)
            moves += 1
            gain += best_delta
    return K, moves, gain


@njit(cache=True)
def merge_delta(E, F, m, K, g, h, N, n0, eta0, zeta0, logb0):
    """ICL change for fusing clusters ``g`` and ``h``."""
    d = 0.0
    mf = m[g] + m[h]
    for l in range(K):
        if l == g or l == h:
            continue
        ml = m[l]
        d += block_term(E[h, l] + E[g, l], mf * ml, eta0, zeta0, logb0) - F[h, l] - F[g, l]
        d += block_term(E[l, h] + E[l, g], ml * mf, eta0, zeta0, logb0) - F[l, h] - F[l, g]
    e_ff = E[h, h] + E[g, g] + E[g, h] + E[h, g]
    d += block_term(e_ff, mf * (mf - 1), eta0, zeta0, logb0)
    d -= F[h, h] + F[g, g] + F[g, h] + F[h, g]
    d += (math.lgamma(n0) + math.lgamma((K - 1) * n0) + math.lgamma(K * n0 + N)
          - math.lgamma(K * n0) - math.lgamma((K - 1) * n0 + N)
          + math.lgamma(n0 + mf) - math.lgamma(n0 + m[g]) - math.lgamma(n0 + m[h]))
    return d


@njit(cache=True)
def best_merge(E, F, m, K, N, n0, eta0, zeta0, logb0):
    """Best pair ``g < h``; ties keep the lexicographically smallest pair."""
    bg = -1
    bh = -1
    bd = NEG_INF
    for g in range(K):
        for h in range(g + 1, K):
            d = merge_delta(E, F, m, K, g, h, N, n0, eta0, zeta0, logb0)
            if d > bd:
                bd = d
                bg = g
                bh = h
    return bg, bh, bd


@njit(cache=True)
def fuse_clusters(labels, E, F, m, K, keep, drop, eta0, zeta0, logb0):
    """Merge cluster ``drop`` into ``keep``; returns the new live K."""
    for l in range(K):
        E[keep, l] += E[drop, l]
    for k in range(K):
        E[k, keep] += E[k, drop]
    m[keep] += m[drop]
    m[drop] = 0
    for i in range(labels.size):
        if labels[i] == drop:
            labels[i] = keep
    K = remove_cluster(labels, E, F, m, K, drop)
    if keep == K:
        keep = drop
    refresh_cluster_terms(E, F, m, K, keep, eta0, zeta0, logb0)
    return K
