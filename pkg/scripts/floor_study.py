#!/usr/bin/env python3
"""Compare measured BP error floors against the certified lower bound.

Sweeps sigma for a fixed-row-weight code and prints bound, measured BER,
and their ratio. In the floor region the ratio should sit near 1.
"""

import argparse

from bgmlab.bounds import ber_lower_bound
from bgmlab.decode import BpConfig
from bgmlab.ensemble import sample_fixed_row_weight
from bgmlab.sim import SimConfig, StopRule, run_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1024)
    ap.add_argument("--m", type=int, default=1024)
    ap.add_argument("--row-weight", type=int, default=8)
    ap.add_argument("--code-seed", type=int, default=1)
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0.62, 0.65, 0.68, 0.71])
    ap.add_argument("--min-frame-errors", type=int, default=30)
    ap.add_argument("--max-frames", type=int, default=20000)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    code = sample_fixed_row_weight(args.k, args.m, args.row_weight, seed=args.code_seed)
    cfg = SimConfig(
        code={
            "construction": "fixed-row-weight",
            "k": args.k,
            "m": args.m,
            "w": args.row_weight,
            "seed": args.code_seed,
        },
        channel={"type": "awgn"},
        sweep=tuple(args.sigmas),
        stop=StopRule(min_frame_errors=args.min_frame_errors, max_frames=args.max_frames),
        decoder=BpConfig(max_iterations=50),
        workers=args.workers,
        chunk=64,
        seed=args.seed,
    )
    print("sigma     bound       measured    ratio   frames")
    for point in run_campaign(cfg):
        bound = ber_lower_bound(code, point.param)
        ber = point.bit_errors / (point.frames * args.k)
        ratio = ber / bound if bound > 0 else float("inf")
        print(
            f"{point.param:<8.3f}  {bound:.3e}  {ber:.3e}  {ratio:6.2f}  {point.frames}"
        )


if __name__ == "__main__":
    main()
