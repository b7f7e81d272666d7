"""Wall time of a single-restart fit as N grows at fixed average degree.

Graphs have 50 planted communities with expected within-block degree 12 and
between-block degree 4 regardless of N. Reports time per N and the
least-squares slope of log(time) against log(N).
"""
import argparse
import time

import numpy as np

from greedy_icl.init import InitConfig, fit_with_restarts
from greedy_icl.metrics import nmi
from greedy_icl.stats import Priors
from greedy_icl.synth import SbmParams, community_pi, sample_sbm


def graph(n, k, d_in, d_out, seed):
    m = n / k
    params = SbmParams(np.full(k, 1 / k), community_pi(k, d_in / m, d_out / (n - m)), n, seed)
    return sample_sbm(params)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 2000, 4000, 8000])
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--k-up", type=int, default=100)
    ap.add_argument("--d-in", type=float, default=12.0)
    ap.add_argument("--d-out", type=float, default=4.0)
    ap.add_argument("--init", choices=["kmeans", "random"], default="kmeans")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    cfg = InitConfig(k_up=args.k_up, method=args.init, restarts=1)
    times = []
    print("n\tedges\tseconds\tK\tnmi")
    for n in args.sizes:
        g, truth = graph(n, args.k, args.d_in, args.d_out, args.seed)
        t0 = time.perf_counter()
        res = fit_with_restarts(g, Priors(), cfg)
        times.append(time.perf_counter() - t0)
        print(f"{n}\t{g.n_edges}\t{times[-1]:.3f}\t{res.K}\t{nmi(res.partition, truth):.3f}", flush=True)
    if len(args.sizes) > 1:
        slope = np.polyfit(np.log(args.sizes), np.log(times), 1)[0]
        print(f"# scaling exponent {slope:.2f}")


if __name__ == "__main__":
    main()
