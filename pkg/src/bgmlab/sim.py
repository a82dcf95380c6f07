"""Monte Carlo decoding campaigns with reproducible accounting.

A campaign sweeps one channel parameter over a fixed code.  Every trial
owns a Philox stream keyed by (master seed, sweep index, trial index), so
results do not depend on execution order: a worker pool and a serial loop
produce identical counts.  Trials advance in fixed-size chunks and the
stopping rule is evaluated only at chunk boundaries, which keeps the
stopping decision deterministic as well.

BER counts message bits only; a frame error is any message-bit error.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import __version__
from .channel import BpskAwgn, channel_from_config, llr, transmit, sigma_from_ebn0_db
from .decode import BpConfig, BpGraph, bp_decode, hard_decision
from .ensemble import SystematicCode, encode, load_code, sample_bgm, sample_fixed_row_weight
from .rng import make_rng

__all__ = [
    "StopRule",
    "SimConfig",
    "SweepPointResult",
    "build_code",
    "run_campaign",
    "write_csv",
    "config_from_dict",
    "config_digest",
]

CSV_COLUMNS = (
    "param",
    "frames",
    "bit_errors",
    "frame_errors",
    "ber",
    "fer",
    "avg_iters",
    "elapsed_s",
    "seed",
)


@dataclass(frozen=True)
class StopRule:
    min_frame_errors: int = 100
    max_frames: int = 10_000_000

    def __post_init__(self):
        if self.min_frame_errors < 1 or self.max_frames < 1:
            raise ValueError("stop rule fields must be positive")


@dataclass(frozen=True)
class SimConfig:
    code: dict
    channel: dict
    sweep: tuple
    sweep_unit: str = "param"  # "param" or "ebn0_db" (AWGN only)
    stop: StopRule = StopRule()
    decoder: BpConfig = BpConfig()
    seed: int = 0
    workers: int = 0
    chunk: int = 256

    def __post_init__(self):
        if not self.sweep:
            raise ValueError("sweep must list at least one parameter value")
        if self.sweep_unit not in ("param", "ebn0_db"):
            raise ValueError(f"unknown sweep unit {self.sweep_unit!r}")
        if self.sweep_unit == "ebn0_db" and self.channel.get("type") != "awgn":
            raise ValueError("ebn0_db sweeps only make sense for awgn")
        if self.chunk < 1:
            raise ValueError("chunk must be positive")
        if self.workers < 0:
            raise ValueError("workers must be non-negative")


@dataclass
class SweepPointResult:
    """Counts for one sweep value; ber/fer are derived at write time."""

    param: float
    frames: int
    bit_errors: int
    frame_errors: int
    avg_iters: float
    elapsed_s: float
    seed: int


@dataclass
class _PointAccumulator:
    frames: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    iters: int = 0

    def merge(self, other: "_PointAccumulator") -> None:
        self.frames += other.frames
        self.bit_errors += other.bit_errors
        self.frame_errors += other.frame_errors
        self.iters += other.iters


def config_from_dict(raw: dict) -> SimConfig:
    """Validate a JSON-shaped dict into a SimConfig with clear errors."""
    try:
        code = dict(raw["code"])
        channel = dict(raw["channel"])
        sweep = tuple(float(x) for x in raw["sweep"])
    except KeyError as exc:
        raise ValueError(f"config missing required key: {exc.args[0]}") from None
    stop = StopRule(**raw.get("stop", {}))
    decoder = BpConfig(**raw.get("decoder", {}))
    return SimConfig(
        code=code,
        channel=channel,
        sweep=sweep,
        sweep_unit=raw.get("sweep_unit", "param"),
        stop=stop,
        decoder=decoder,
        seed=int(raw.get("seed", 0)),
        workers=int(raw.get("workers", 0)),
        chunk=int(raw.get("chunk", 256)),
    )


def config_digest(cfg: SimConfig) -> str:
    payload = {
        "code": cfg.code,
        "channel": cfg.channel,
        "sweep": list(cfg.sweep),
        "sweep_unit": cfg.sweep_unit,
        "stop": asdict(cfg.stop),
        "decoder": asdict(cfg.decoder),
        "seed": cfg.seed,
        "chunk": cfg.chunk,
    }
    blob = json.dumps(payload, sort_keys=True).encode("utf8")
    return hashlib.sha256(blob).hexdigest()[:16]


def build_code(spec: dict) -> SystematicCode | None:
    """Materialize the code named by a config's code block.

    Returns None for the uncoded construction (bits straight through the
    channel with hard decisions).
    """
    kind = spec.get("construction")
    if kind == "uncoded":
        return None
    if kind == "bgm":
        return sample_bgm(int(spec["k"]), int(spec["m"]), float(spec["rho"]), int(spec.get("seed", 0)))
    if kind == "fixed-row-weight":
        return sample_fixed_row_weight(int(spec["k"]), int(spec["m"]), int(spec["w"]), int(spec.get("seed", 0)))
    if kind == "graph-file":
        code = load_code(spec["path"])
        if not isinstance(code, SystematicCode):
            raise ValueError("graph-file construction needs a systematic code matrix")
        return code
    raise ValueError(f"unknown code construction {kind!r}")


def _point_channel(cfg: SimConfig, value: float, code: SystematicCode | None):
    if cfg.sweep_unit == "ebn0_db":
        if code is None:
            raise ValueError("ebn0_db sweeps need a code to define the rate")
        rate = float(code.rate)
        return BpskAwgn(sigma_from_ebn0_db(value, rate))
    ch_cfg = dict(cfg.channel)
    ch_cfg["param"] = value
    return channel_from_config(ch_cfg)


def _run_chunk(
    code: SystematicCode | None,
    graph: BpGraph | None,
    ch,
    decoder: BpConfig,
    master_seed: int,
    sweep_idx: int,
    t_start: int,
    t_stop: int,
    k: int,
) -> _PointAccumulator:
    acc = _PointAccumulator()
    for trial in range(t_start, t_stop):
        rng = make_rng(master_seed, sweep_idx, trial)
        u = rng.integers(0, 2, size=k, dtype=np.uint8)
        if code is None:
            received = transmit(ch, u, rng)
            u_hat = hard_decision(llr(ch, received))
            iters = 0
        else:
            cw = encode(code, u)
            received = transmit(ch, cw, rng)
            out = bp_decode(graph, llr(ch, received), decoder)
            u_hat = out.hard_decision
            iters = out.iterations_used
        errs = int(np.count_nonzero(u_hat != u))
        acc.frames += 1
        acc.bit_errors += errs
        acc.frame_errors += int(errs > 0)
        acc.iters += iters
    return acc


_WORKER_STATE: dict = {}


def _worker_init(cfg: SimConfig):
    code = build_code(cfg.code)
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["code"] = code
    _WORKER_STATE["graph"] = BpGraph(code) if code is not None else None


def _worker_chunk(args):
    sweep_idx, value, t_start, t_stop = args
    cfg = _WORKER_STATE["cfg"]
    code = _WORKER_STATE["code"]
    graph = _WORKER_STATE["graph"]
    ch = _point_channel(cfg, value, code)
    k = code.k if code is not None else int(cfg.code["k"])
    return _run_chunk(
        code, graph, ch, cfg.decoder, cfg.seed, sweep_idx, t_start, t_stop, k
    )


def run_campaign(cfg: SimConfig) -> list[SweepPointResult]:
    """Run every sweep point under the stopping rule; see module docstring."""
    code = build_code(cfg.code)
    graph = BpGraph(code) if code is not None else None
    k = code.k if code is not None else int(cfg.code["k"])
    results = []
    pool = None
    try:
        if cfg.workers > 1:
            pool = multiprocessing.get_context("fork").Pool(
                cfg.workers, initializer=_worker_init, initargs=(cfg,)
            )
        for sweep_idx, value in enumerate(cfg.sweep):
            t0 = time.perf_counter()
            acc = _PointAccumulator()
            stop = cfg.stop
            next_trial = 0
            while (
                acc.frame_errors < stop.min_frame_errors
                and acc.frames < stop.max_frames
            ):
                budget = stop.max_frames - acc.frames
                n_chunks = max(cfg.workers, 1)
                starts = []
                for _ in range(n_chunks):
                    if budget <= 0:
                        break
                    size = min(cfg.chunk, budget)
                    starts.append((sweep_idx, value, next_trial, next_trial + size))
                    next_trial += size
                    budget -= size
                if not starts:
                    break
                if pool is not None:
                    chunk_accs = pool.map(_worker_chunk, starts)
                else:
                    ch = _point_channel(cfg, value, code)
                    chunk_accs = [
                        _run_chunk(
                            code, graph, ch, cfg.decoder, cfg.seed,
                            sweep_idx, s[2], s[3], k,
                        )
                        for s in starts
                    ]
                # merge in submission order, honoring the stop rule at
                # chunk boundaries so parallel equals serial
                for chunk_acc in chunk_accs:
                    if (
                        acc.frame_errors >= stop.min_frame_errors
                        or acc.frames >= stop.max_frames
                    ):
                        break
                    acc.merge(chunk_acc)
            results.append(
                SweepPointResult(
                    param=float(value),
                    frames=acc.frames,
                    bit_errors=acc.bit_errors,
                    frame_errors=acc.frame_errors,
                    avg_iters=acc.iters / acc.frames if acc.frames else 0.0,
                    elapsed_s=time.perf_counter() - t0,
                    seed=cfg.seed,
                )
            )
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return results


def write_csv(results, cfg: SimConfig, path, k: int, timing: bool = False) -> None:
    """Campaign CSV: one comment header line, column names, one row per point.

    elapsed_s is written as 0.000 unless timing is requested, so that
    same-seed reruns are byte-identical; wall time goes to the run log.
    """
    digest = config_digest(cfg)
    with open(path, "w") as fh:
        fh.write(f"# bgmlab-simulate v{__version__} config_sha256={digest} seed={cfg.seed}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in results:
            ber = r.bit_errors / (r.frames * k) if r.frames else 0.0
            fer = r.frame_errors / r.frames if r.frames else 0.0
            elapsed = f"{r.elapsed_s:.3f}" if timing else "0.000"
            fh.write(
                f"{r.param:.10g},{r.frames},{r.bit_errors},{r.frame_errors},"
                f"{ber:.10g},{fer:.10g},{r.avg_iters:.6f},{elapsed},{r.seed}\n"
            )
