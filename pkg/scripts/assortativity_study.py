#!/usr/bin/env python3
"""Build degree-preserving graphs at a range of assortativity targets.

Degree profiles come from a sampled sparse generator, so the study reflects
what the rewiring stage actually has to work with. Targets that sit outside
the reachable band report the best graph found instead of dying.
"""

import argparse
import time

import numpy as np

from bgmlab.ensemble import sample_bgm
from bgmlab.graph import GraphGenerationError, assortativity, configuration_model


def profiles(k, m, rho, seed):
    g = sample_bgm(k, m, rho, seed=seed).g
    d1 = np.array(g.row_weights())
    d2 = np.zeros(m, dtype=np.int64)
    for support in g.row_supports:
        for j in support:
            d2[j] += 1
    return d1, d2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1024)
    ap.add_argument("--m", type=int, default=1024)
    ap.add_argument("--rho", type=float, default=0.01)
    ap.add_argument("--profile-seed", type=int, default=5)
    ap.add_argument(
        "--targets", type=float, nargs="+", default=[-0.5, -0.3, -0.1, 0.0, 0.1]
    )
    ap.add_argument("--epsilon", type=float, default=0.02)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    d1, d2 = profiles(args.k, args.m, args.rho, args.profile_seed)
    print(f"degrees: var min/max {d1.min()}/{d1.max()}, chk min/max {d2.min()}/{d2.max()}")
    print("target   achieved   status      time")
    for target in args.targets:
        t0 = time.time()
        try:
            built = configuration_model(
                d1, d2, target, epsilon=args.epsilon, seed=args.seed
            )
            r, status = built.r_measured, "ok"
            graph = built.graph
        except GraphGenerationError as exc:
            r, status = exc.best_r, "unreached"
            graph = exc.best_result.graph if exc.best_result else None
        elapsed = time.time() - t0
        if graph is not None:
            # the stored value and a fresh computation must agree
            assert abs(assortativity(graph) - r) < 1e-12
        print(f"{target:+.2f}    {r:+.4f}    {status:<10s}  {elapsed:5.1f}s")


if __name__ == "__main__":
    main()
