"""Acceptance criteria 1-9, one test each.

Every test prints a ``criterion N: PASS|FAIL`` line, and the lines are
repeated in the terminal summary. Run on its own with

    pytest tests/test_acceptance.py -v
"""
import math
import subprocess
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from greedy_icl.graph import DirectedGraph
from greedy_icl.greedy import FitState, apply_swap, delta_swap
from greedy_icl.init import InitConfig, fit_with_restarts
from greedy_icl.merge import apply_merge, delta_merge
from greedy_icl.metrics import nmi
from greedy_icl.stats import Partition, Priors, compute_stats, icl_exact
from greedy_icl.synth import SbmParams, SettingConfig, community_pi, make_setting, sample_sbm

from oracles import brute_force_max, dense_adjacency, direct_icl, random_graph, set_partitions

TESTS = Path(__file__).parent


def run_setting(setting, beta, replicates, k_up=20, restarts=10, n_nodes=None, k=None):
    scores, ks = [], []
    for rep in range(replicates):
        g, truth = sample_sbm(make_setting(SettingConfig(setting, beta, 0.01, n_nodes, k, seed=rep)))
        res = fit_with_restarts(g, Priors(), InitConfig(k_up=k_up, restarts=restarts, seed=1000 * rep))
        scores.append(nmi(res.partition, truth))
        ks.append(res.K)
    return np.array(scores), ks


def test_criterion_1_exact_values(criterion):
    g = DirectedGraph.from_edges(3, [0, 1], [1, 2])
    adj = dense_adjacency(g)
    checks = []
    for labels, target in (([0, 0, 0], -math.log(105)), ([0, 0, 1], -math.log(1296))):
        z = Partition.from_labels(labels)
        value = icl_exact(compute_stats(g, z), Priors())
        oracle = direct_icl(adj, labels)
        checks.append(abs(value - target) <= 1e-10 and abs(oracle - target) <= 1e-10)
    criterion(1, all(checks), "toy ICL = -ln 105 (K=1) and -ln 1296 ({0,1|2}) within 1e-10")


def test_criterion_2_incremental_deltas(criterion):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, case1, case2, merges = 0.0, 0, 0, 0
    while case1 + case2 < 1000 or case2 < 100 or merges < 200:
        n = int(rng.integers(2, 51))
        pr = Priors(*(float(v) for v in rng.choice([0.5, 1.0, 2.0], 3)))
        g = random_graph(rng, n, float(rng.uniform(0.02, 0.6)))
        state = FitState(g, Partition.from_labels(rng.integers(0, int(rng.integers(1, 9)), n)), pr)
        for _ in range(20):
            if state.K < 2:
                break
            sizes = state.sizes[:state.K]
            if rng.random() < 0.3 and (sizes == 1).any():
                i = int(np.flatnonzero(state.labels == np.flatnonzero(sizes == 1)[0])[0])
            else:
                i = int(rng.integers(n))
            h = int(rng.integers(state.K - 1))
            h += h >= state.labels[i]
            before = icl_exact(compute_stats(g, state.partition), pr)
            d = delta_swap(state, i, h)
            apply_swap(state, i, h, d.delta)
            worst = max(worst, abs(d.delta - (icl_exact(compute_stats(g, state.partition), pr) - before)))
            case2 += d.empties_source
            case1 += not d.empties_source
        if state.K >= 2:
            a, b = (int(v) for v in rng.choice(state.K, 2, replace=False))
            before = icl_exact(compute_stats(g, state.partition), pr)
            d = delta_merge(state, a, b)
            apply_merge(state, a, b, d)
            worst = max(worst, abs(d - (icl_exact(compute_stats(g, state.partition), pr) - before)))
            merges += 1
    elapsed = time.perf_counter() - t0
    criterion(2, worst <= 1e-8 and elapsed < 10,
              f"{case1} case-1 + {case2} case-2 swaps, {merges} merges, "
              f"max |error| {worst:.1e}, {elapsed:.1f}s")


def test_criterion_3_brute_force(criterion):
    assert sum(1 for _ in set_partitions(6)) == 203
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    hits, exceeded = 0, 0
    for _ in range(20):
        g = random_graph(rng, 6, float(rng.uniform(0.15, 0.85)))
        best, _ = brute_force_max(dense_adjacency(g))
        res = fit_with_restarts(g, Priors(), InitConfig(k_up=6, restarts=50))
        exceeded += res.icl > best + 1e-9
        hits += abs(res.icl - best) <= 1e-9
    elapsed = time.perf_counter() - t0
    criterion(3, exceeded == 0 and hits >= 18 and elapsed < 30,
              f"optimum reached on {hits}/20, exceeded {exceeded} times, {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_4_setting1(criterion):
    t0 = time.perf_counter()
    means = {beta: run_setting(1, beta, 20)[0].mean() for beta in (0.45, 0.35, 0.01)}
    elapsed = time.perf_counter() - t0
    ok = means[0.45] >= 0.95 and means[0.35] >= 0.95 and means[0.01] <= 0.2 and elapsed < 300
    criterion(4, ok, "mean NMI " + ", ".join(f"beta={b}: {m:.3f}" for b, m in means.items())
              + f", {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_5_setting2_hubs(criterion):
    t0 = time.perf_counter()
    scores, ks = run_setting(2, 0.45, 20)
    elapsed = time.perf_counter() - t0
    modal = Counter(ks).most_common(1)[0][0]
    criterion(5, scores.mean() >= 0.9 and modal == 5 and elapsed < 300,
              f"mean NMI {scores.mean():.3f}, modal K {modal}, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_6_setting3(criterion):
    t0 = time.perf_counter()
    scores, ks = run_setting(3, 0.35, 20)
    elapsed = time.perf_counter() - t0
    criterion(6, scores.mean() >= 0.98 and elapsed < 600,
              f"mean NMI {scores.mean():.3f}, K values {sorted(set(ks))}, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_7_setting4(criterion):
    t0 = time.perf_counter()
    scores, ks = run_setting(4, 0.45, 5, k_up=60, n_nodes=2000, k=20)
    reduced = time.perf_counter() - t0
    g, truth = sample_sbm(make_setting(SettingConfig(4, seed=0)))
    t1 = time.perf_counter()
    full = fit_with_restarts(g, Priors(), InitConfig(k_up=100, restarts=1))
    full_time = time.perf_counter() - t1
    full_nmi = nmi(full.partition, truth)
    ok = (scores.mean() >= 0.8 and all(20 <= k <= 40 for k in ks) and reduced <= 300
          and full_nmi >= 0.75)
    criterion(7, ok, f"N=2000: mean NMI {scores.mean():.3f}, K {ks}, {reduced:.0f}s; "
              f"N=10000: NMI {full_nmi:.3f}, K {full.K}, {full_time:.0f}s")


def fixed_degree_graph(n, seed, k=50, d_in=12.0, d_out=4.0):
    """Planted communities whose expected in/out-block degrees do not grow with n."""
    m = n / k
    return sample_sbm(SbmParams(np.full(k, 1 / k), community_pi(k, d_in / m, d_out / (n - m)), n, seed))[0]


def timed_fit(g, cfg):
    t0 = time.perf_counter()
    fit_with_restarts(g, Priors(), cfg)
    return time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_8_performance(criterion):
    g, _ = sample_sbm(make_setting(SettingConfig(4, n_nodes=5000, seed=0)))
    t5000 = timed_fit(g, InitConfig(k_up=100, restarts=1))
    grid = [1000, 2000, 4000, 8000]
    slopes = {}
    # k-means starts collapse into one large cluster on very sparse graphs,
    # which makes them cheap; random starts keep K_up clusters alive longer.
    for method in ("kmeans", "random"):
        cfg = InitConfig(k_up=100, restarts=1, method=method)
        times = [min(timed_fit(fixed_degree_graph(n, 1), cfg) for _ in range(2)) for n in grid]
        slopes[method] = (np.polyfit(np.log(grid), np.log(times), 1)[0], times)
    detail = "; ".join(f"{m} init: times {[round(t, 2) for t in ts]} exponent {sl:.2f}"
                       for m, (sl, ts) in slopes.items())
    criterion(8, t5000 <= 60 and all(sl < 1.5 for sl, _ in slopes.values()),
              f"N=5000 fit {t5000:.1f}s; N={grid}; {detail}")


PROPERTY_TESTS = [
    "test_stats.py::test_icl_permutation_invariant",
    "test_stats.py::test_counter_conservation",
    "test_greedy.py::test_icl_increases_with_every_accepted_move",
    "test_greedy.py::test_trace_is_monotone_and_consistent",
    "test_merge.py::test_merge_pass_certificate",
    "test_metrics.py::test_nmi_properties",
    "test_synth.py::test_setting1_densities",
    "test_synth.py::test_block_density_convergence_n500",
    "test_synth.py::test_seed_determinism",
    "test_cli.py::test_every_command_is_deterministic",
    "test_cli.py::test_fit_is_byte_deterministic",
]


def test_criterion_9_property_suites(criterion):
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           *[str(TESTS / t) for t in PROPERTY_TESTS]],
                          capture_output=True, text=True, cwd=TESTS.parent)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    criterion(9, proc.returncode == 0, f"{len(PROPERTY_TESTS)} property tests: {summary}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
