"""Command-line interface: ``greedy-icl {fit,generate,score,icl,bench,render}``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .graph import EdgeListError, parse_edge_list, read_partition, write_edge_list, write_partition
from .init import InitConfig, fit_with_restarts
from .metrics import entropy, mutual_information, nmi
from .stats import Partition, Priors, compute_stats, icl_asymptotic, icl_exact
from .synth import SbmParams, SettingConfig, beta_grid, make_setting, sample_sbm

RENDER_MAX_NODES = 5000
EDGE, BOUNDARY, BACKGROUND = 0, 128, 255


class CliError(Exception):
    pass


def _emit(doc: dict, fmt: str, path: str | None) -> None:
    if fmt == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = "".join(f"{k}={_kv(v)}\n" for k, v in _flatten(doc))
    _write_text(path, text)


def _kv(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


def _flatten(doc: dict, prefix: str = ""):
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                yield from _flatten(item, f"{key}.{i}.")
        else:
            yield key, v


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_graph(path: str):
    return parse_edge_list(Path(path).read_bytes())[0]


def _read_labels(path: str, n_nodes: int | None = None) -> Partition:
    return Partition.from_labels(read_partition(Path(path).read_bytes(), n_nodes))


def _priors(args) -> Priors:
    return Priors(args.prior_n0, args.prior_eta0, args.prior_zeta0)


def _init_config(args, seed: int | None = None, k_up: int | None = None) -> InitConfig:
    return InitConfig(k_up=k_up if k_up is not None else args.k_up, method=args.init,
                      kmeans_iters=args.kmeans_iters, restarts=args.restarts,
                      seed=args.seed if seed is None else seed,
                      merge_phase=not args.no_merge_phase)


def cmd_fit(args) -> int:
    g = _read_graph(args.graph)
    priors = _priors(args)
    cfg = _init_config(args)
    t0 = time.perf_counter()
    res = fit_with_restarts(g, priors, cfg)
    elapsed = time.perf_counter() - t0
    z = res.partition
    doc = {
        "graph": args.graph,
        "n_nodes": g.n_nodes,
        "n_edges": g.n_edges,
        "K": z.K,
        "icl_exact": icl_exact(compute_stats(g, z), priors),
        "icl_asymptotic": icl_asymptotic(g, z),
        "seed": cfg.seed,
        "best_restart": next(s.index for s in res.restarts if s.seed == res.seed),
        "config": {"k_up": cfg.k_up, "init": cfg.method, "kmeans_iters": cfg.kmeans_iters,
                   "restarts": cfg.restarts, "merge_phase": cfg.merge_phase,
                   "prior_n0": priors.n0, "prior_eta0": priors.eta0,
                   "prior_zeta0": priors.zeta0},
        "restart": [{"seed": s.seed, "icl": s.icl, "K": s.K, "sweeps": s.sweeps,
                     "moves": s.moves, "merges": s.merges} for s in res.restarts],
    }
    if args.truth:
        doc["nmi"] = nmi(z, _read_labels(args.truth, g.n_nodes))
    part_path = args.partition
    if part_path is None and args.output not in (None, "-"):
        part_path = args.output + ".partition"
    if part_path:
        doc["partition"] = part_path
        _write_text(part_path, write_partition(z.labels))
    _emit(doc, args.format, args.output)
    # timing stays off the document so repeated runs are byte-identical
    print(f"wall_time={elapsed:.3f}s", file=sys.stderr)
    return 0


def _load_params(path: str, seed: int) -> SbmParams:
    raw = json.loads(Path(path).read_text())
    try:
        return SbmParams(raw["alpha"], raw["pi"], int(raw["n_nodes"]), int(raw.get("seed", seed)))
    except KeyError as exc:
        raise CliError(f"{path}: missing field {exc}") from None


def cmd_generate(args) -> int:
    if args.params:
        params = _load_params(args.params, args.seed)
    else:
        params = make_setting(SettingConfig(args.setting, args.beta, args.epsilon,
                                            args.n_nodes, args.k, args.seed))
    g, z = sample_sbm(params)
    edges = write_edge_list(g, header=True)
    if args.output in (None, "-"):
        sys.stdout.write(edges)
    else:
        Path(args.output + ".edges").write_text(edges)
        Path(args.output + ".partition").write_text(write_partition(z.labels))
    print(f"n_nodes={g.n_nodes} n_edges={g.n_edges} K={z.K}", file=sys.stderr)
    return 0


def cmd_score(args) -> int:
    a = _read_labels(args.a)
    b = _read_labels(args.b)
    if a.n_nodes != b.n_nodes:
        raise CliError(f"partitions cover {a.n_nodes} and {b.n_nodes} nodes")
    doc = {"nmi": nmi(a, b), "mutual_information": mutual_information(a, b),
           "entropy_a": entropy(a), "entropy_b": entropy(b), "K_a": a.K, "K_b": b.K}
    _emit(doc, args.format, args.output)
    return 0


def cmd_icl(args) -> int:
    g = _read_graph(args.graph)
    z = _read_labels(args.partition, g.n_nodes)
    doc = {"K": z.K, "icl_exact": icl_exact(compute_stats(g, z), _priors(args)),
           "icl_asymptotic": icl_asymptotic(g, z)}
    _emit(doc, args.format, args.output)
    return 0


def _parse_betas(text: str | None) -> list[float]:
    if not text:
        return beta_grid().tolist()
    try:
        return [float(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise CliError(f"bad --betas value {text!r}") from None


def bench_rows(setting: int, betas, replicates: int, seed: int, cfg_for, priors: Priors,
               n_nodes=None, k=None, epsilon=0.01):
    """One row per beta: (beta, mean nmi, std nmi or None, mean K, mean seconds)."""
    rows = []
    for beta in betas:
        scores, ks, secs = [], [], []
        for rep in range(replicates):
            g, truth = sample_sbm(make_setting(SettingConfig(setting, beta, epsilon, n_nodes, k,
                                                             seed + rep)))
            t0 = time.perf_counter()
            res = fit_with_restarts(g, priors, cfg_for(1000 * (seed + rep)))
            secs.append(time.perf_counter() - t0)
            scores.append(nmi(res.partition, truth))
            ks.append(res.K)
        std = float(np.std(scores, ddof=1)) if replicates > 1 else None
        rows.append((float(beta), float(np.mean(scores)), std, float(np.mean(ks)),
                     float(np.mean(secs))))
    return rows


def cmd_bench(args) -> int:
    if args.replicates < 1:
        raise CliError("--replicates must be >= 1")
    k_up = args.k_up if args.k_up is not None else (100 if args.setting == 4 else 20)
    rows = bench_rows(args.setting, _parse_betas(args.betas), args.replicates, args.seed,
                      lambda s: _init_config(args, s, k_up), _priors(args),
                      args.n_nodes, args.k, args.epsilon)
    lines = ["beta\tmean_nmi\tstd_nmi\tmean_K\tmean_seconds"]
    for beta, mean, std, mk, sec in rows:
        std_s = "" if std is None else f"{std:.4f}"
        lines.append(f"{beta:.2f}\t{mean:.4f}\t{std_s}\t{mk:.2f}\t{sec:.3f}")
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


def render_matrix(g, z: Partition) -> np.ndarray:
    """Adjacency sorted by (cluster, id) with one-pixel lines between clusters."""
    order = np.lexsort((np.arange(g.n_nodes), z.labels))
    sizes = z.sizes()
    # pixel coordinate of each node: rank plus the number of boundaries before it
    pos = np.empty(g.n_nodes, dtype=np.int64)
    pos[order] = np.arange(g.n_nodes) + z.labels[order]
    side = g.n_nodes + z.K - 1
    img = np.full((side, side), BACKGROUND, dtype=np.uint8)
    for b in (np.cumsum(sizes)[:-1] + np.arange(z.K - 1)):
        img[b, :] = BOUNDARY
        img[:, b] = BOUNDARY
    src, dst = g.edges()
    img[pos[src], pos[dst]] = EDGE
    return img


def cmd_render(args) -> int:
    g = _read_graph(args.graph)
    if g.n_nodes > args.max_nodes:
        raise CliError(f"graph has {g.n_nodes} nodes, above --max-nodes={args.max_nodes}; "
                       "render a subsample or raise the cap")
    z = _read_labels(args.partition, g.n_nodes)
    img = render_matrix(g, z)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    Path(args.image).write_bytes(header + img.tobytes())
    return 0


def _add_prior_flags(p):
    p.add_argument("--prior-n0", type=float, default=1.0)
    p.add_argument("--prior-eta0", type=float, default=1.0)
    p.add_argument("--prior-zeta0", type=float, default=1.0)


def _add_fit_flags(p, k_up_default):
    p.add_argument("--k-up", type=int, default=k_up_default)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=["random", "kmeans"], default="kmeans")
    p.add_argument("--kmeans-iters", type=int, default=5)
    p.add_argument("--no-merge-phase", action="store_true")
    _add_prior_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedy-icl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="cluster a directed graph given as an edge list")
    p.add_argument("graph")
    _add_fit_flags(p, 20)
    p.add_argument("--output", "-o", help="result document path (default: stdout)")
    p.add_argument("--partition", help="partition file path (default: OUTPUT.partition)")
    p.add_argument("--truth", help="planted partition to score the fit against")
    p.add_argument("--format", choices=["kv", "json"], default="kv")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("generate", help="sample a benchmark graph")
    p.add_argument("--setting", type=int, choices=[1, 2, 3, 4], default=1)
    p.add_argument("--beta", type=float, default=0.45)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--n-nodes", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--params", help="JSON file with alpha, pi, n_nodes (and optional seed)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="prefix for PREFIX.edges and PREFIX.partition")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("score", help="normalized mutual information of two partitions")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=["kv", "json"], default="kv")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("icl", help="exact and asymptotic ICL of a given partition")
    p.add_argument("graph")
    p.add_argument("partition")
    _add_prior_flags(p)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=["kv", "json"], default="kv")
    p.set_defaults(func=cmd_icl)

    p = sub.add_parser("bench", help="NMI against the planted partition over a beta grid")
    p.add_argument("--setting", type=int, choices=[1, 2, 3, 4], default=1)
    p.add_argument("--betas", help="comma separated (default: 0.45 down to 0.01 by 0.02)")
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--n-nodes", type=int)
    p.add_argument("--k", type=int)
    _add_fit_flags(p, None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="write the cluster-sorted adjacency matrix as a PGM")
    p.add_argument("graph")
    p.add_argument("partition")
    p.add_argument("image")
    p.add_argument("--max-nodes", type=int, default=RENDER_MAX_NODES)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("k_up", "restarts", "kmeans_iters"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            parser.error(f"--{name.replace('_', '-')} must be >= 1")
    for name in ("prior_n0", "prior_eta0", "prior_zeta0"):
        value = getattr(args, name, None)
        if value is not None and not value > 0:
            parser.error(f"--{name.replace('_', '-')} must be positive")
    try:
        return args.func(args)
    except (OSError, EdgeListError, CliError, ValueError, json.JSONDecodeError) as exc:
        print(f"greedy-icl {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
