"""Concatenation of an outer algebraic code with an inner sparse code.

The outer code is the extended Hamming family [2^r, 2^r - r - 1] with
minimum distance 4, decoded bitwise-MAP on its syndrome trellis (log-domain
BCJR).  Outer codewords, interleaved, form the message of an inner
systematic Bernoulli code decoded by BP.  The receiver alternates the two
decoders, exchanging extrinsic LLRs only: each component receives the
other's output minus what it supplied itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gf2 import BitMatrix, gf2_null_space
from .ensemble import SystematicCode, encode
from .decode import BpConfig, BpGraph, DecodeOutcome, bp_decode, hard_decision
from .rng import make_rng

__all__ = [
    "ExtendedHammingCode",
    "extended_hamming",
    "SyndromeTrellis",
    "bcjr_decode",
    "ConcatConfig",
    "ConcatSystem",
    "concat_encode",
    "concat_decode",
]


@dataclass(eq=False)
class ExtendedHammingCode:
    """[2^r, 2^r - r - 1] code: Hamming plus an overall parity bit."""

    r: int
    n: int = field(init=False)
    k: int = field(init=False)
    parity_check: BitMatrix = field(init=False, repr=False)
    generator: BitMatrix = field(init=False, repr=False)
    _gen_dense: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"need r >= 2, got {self.r}")
        self.n = 2**self.r
        self.k = self.n - self.r - 1
        h = np.zeros((self.r + 1, self.n), dtype=np.uint8)
        for col in range(self.n - 1):
            value = col + 1
            for bit in range(self.r):
                h[bit, col] = (value >> bit) & 1
        h[self.r, :] = 1  # overall parity row covers every position
        self.parity_check = BitMatrix.from_dense(h)
        basis = gf2_null_space(h)
        if basis.shape[0] != self.k:
            raise ValueError("parity-check matrix rank is off")
        self._gen_dense = basis
        self.generator = BitMatrix.from_dense(basis)

    def encode(self, message) -> np.ndarray:
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.k,):
            raise ValueError(f"message length {message.shape} does not match k={self.k}")
        return (message @ self._gen_dense) & 1


def extended_hamming(r: int) -> ExtendedHammingCode:
    return ExtendedHammingCode(r)


class SyndromeTrellis:
    """Sectionalized syndrome trellis of a binary linear code.

    State after t sections is the partial syndrome of the first t bits; a
    codeword is any 0 -> 0 path.  State count is 2^(rows of H), at most
    2^(r+1) for the extended Hamming family.
    """

    def __init__(self, parity_check: BitMatrix):
        h = parity_check.to_dense()
        self.n = h.shape[1]
        self.n_states = 1 << h.shape[0]
        weights = 1 << np.arange(h.shape[0], dtype=np.int64)
        self.column_syndromes = (h.astype(np.int64) * weights[:, None]).sum(axis=0)

    def codeword_states(self, codeword) -> np.ndarray:
        """Partial-syndrome state sequence, length n + 1, for a bit vector."""
        codeword = np.asarray(codeword, dtype=np.int64)
        states = np.zeros(self.n + 1, dtype=np.int64)
        acc = 0
        for t in range(self.n):
            if codeword[t]:
                acc ^= int(self.column_syndromes[t])
            states[t + 1] = acc
        return states


def bcjr_decode(code: ExtendedHammingCode, prior_llrs, trellis: SyndromeTrellis | None = None) -> np.ndarray:
    """Bitwise MAP posterior LLRs over the code, from per-bit prior LLRs.

    Log-domain forward-backward on the syndrome trellis.  Branch metrics
    are +/- L/2 per bit so per-section constants cancel in the posteriors.
    """
    if trellis is None:
        trellis = SyndromeTrellis(code.parity_check)
    priors = np.asarray(prior_llrs, dtype=np.float64)
    if priors.shape != (trellis.n,):
        raise ValueError(f"prior length {priors.shape} does not match n={trellis.n}")
    n = trellis.n
    n_states = trellis.n_states
    state_idx = np.arange(n_states)

    alpha = np.full((n + 1, n_states), -np.inf)
    alpha[0, 0] = 0.0
    for t in range(n):
        half = 0.5 * priors[t]
        flip = state_idx ^ int(trellis.column_syndromes[t])
        stay = alpha[t] + half
        move = (alpha[t] - half)[flip]
        alpha[t + 1] = np.logaddexp(stay, move)
        peak = alpha[t + 1].max()
        if np.isfinite(peak):
            alpha[t + 1] -= peak

    posterior = np.empty(n)
    beta = np.full(n_states, -np.inf)
    beta[0] = 0.0
    for t in range(n - 1, -1, -1):
        half = 0.5 * priors[t]
        flip = state_idx ^ int(trellis.column_syndromes[t])
        num0 = _logsumexp_pair(alpha[t] + half + beta)
        num1 = _logsumexp_pair(alpha[t] - half + beta[flip])
        posterior[t] = num0 - num1
        beta = np.logaddexp(beta + half, beta[flip] - half)
        peak = beta.max()
        if np.isfinite(peak):
            beta -= peak
    return posterior


def _logsumexp_pair(values: np.ndarray) -> float:
    peak = values.max()
    if not np.isfinite(peak):
        return -np.inf
    return float(peak + np.log(np.exp(values - peak).sum()))


@dataclass(frozen=True)
class ConcatConfig:
    rounds: int = 5
    first_round_bp_iters: int = 50
    later_bp_iters: int = 10
    llr_clamp: float = 30.0

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")


@dataclass(eq=False)
class ConcatSystem:
    """Outer blocks feeding an inner systematic code through an interleaver."""

    outer: ExtendedHammingCode
    blocks: int
    inner: SystematicCode
    interleaver_seed: int
    perm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.blocks < 1:
            raise ValueError("need at least one outer block")
        if self.blocks * self.outer.n != self.inner.k:
            raise ValueError(
                f"outer stream length {self.blocks}*{self.outer.n} "
                f"does not match inner k={self.inner.k}"
            )
        rng = make_rng(self.interleaver_seed, "interleaver")
        # inner message position of outer-stream bit i
        self.perm = rng.permutation(self.inner.k)

    @property
    def total_rate(self) -> Fraction:
        return Fraction(self.outer.k * self.blocks, self.inner.k + self.inner.m)


def concat_encode(system: ConcatSystem, outer_messages) -> np.ndarray:
    """Encode block messages (blocks x outer.k) into an inner codeword."""
    msgs = np.asarray(outer_messages, dtype=np.uint8)
    if msgs.shape != (system.blocks, system.outer.k):
        raise ValueError(
            f"messages shape {msgs.shape} does not match ({system.blocks}, {system.outer.k})"
        )
    stream = np.concatenate([system.outer.encode(m) for m in msgs])
    u = np.empty(system.inner.k, dtype=np.uint8)
    u[system.perm] = stream
    return encode(system.inner, u)


def concat_decode(
    system: ConcatSystem,
    llrs,
    cfg: ConcatConfig = ConcatConfig(),
    return_trace: bool = False,
):
    """Iterative decoding; returns the inner-message estimate.

    Round structure: BP on the inner graph with the outer extrinsic as
    a-priori on systematic bits, then per-block BCJR with priors equal to
    the BP posterior minus that a-priori.  rounds=0 degenerates to plain
    inner BP.  The hard decision always covers the inner message bits (the
    interleaved outer codeword stream).
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    inner = system.inner
    if llrs.shape != (inner.k + inner.m,):
        raise ValueError(f"LLR length {llrs.shape} does not match {inner.k + inner.m}")
    graph = BpGraph(inner)
    trellis = SyndromeTrellis(system.outer.parity_check)
    n_o = system.outer.n
    trace = []

    if cfg.rounds == 0:
        bp_cfg = BpConfig(max_iterations=cfg.first_round_bp_iters, llr_clamp=cfg.llr_clamp)
        out = bp_decode(graph, llrs, bp_cfg)
        return (out, trace) if return_trace else out

    outer_extrinsic = np.zeros(inner.k)
    outcome = None
    for rnd in range(cfg.rounds):
        iters = cfg.first_round_bp_iters if rnd == 0 else cfg.later_bp_iters
        bp_cfg = BpConfig(max_iterations=iters, llr_clamp=cfg.llr_clamp)
        outcome = bp_decode(graph, llrs, bp_cfg, apriori=outer_extrinsic)
        inner_extrinsic = outcome.posterior - outer_extrinsic

        # deinterleave to outer-stream order and run one BCJR per block
        stream_prior = inner_extrinsic[system.perm]
        stream_post = np.empty_like(stream_prior)
        for b in range(system.blocks):
            sl = slice(b * n_o, (b + 1) * n_o)
            stream_post[sl] = bcjr_decode(system.outer, stream_prior[sl], trellis)
        stream_extrinsic = stream_post - stream_prior
        new_outer_extrinsic = np.empty(inner.k)
        new_outer_extrinsic[system.perm] = stream_extrinsic
        if return_trace:
            trace.append(
                {
                    "round": rnd,
                    "bp_apriori": outer_extrinsic.copy(),
                    "bp_posterior": outcome.posterior.copy(),
                    "inner_extrinsic": inner_extrinsic.copy(),
                    "bcjr_prior": stream_prior.copy(),
                    "bcjr_posterior": stream_post.copy(),
                    "outer_extrinsic": new_outer_extrinsic.copy(),
                }
            )
        outer_extrinsic = np.clip(new_outer_extrinsic, -cfg.llr_clamp, cfg.llr_clamp)

    # final decision: outer posteriors mapped back to inner message order
    stream_decision = hard_decision(stream_post)
    u_hat = np.empty(inner.k, dtype=np.uint8)
    u_hat[system.perm] = stream_decision
    final = DecodeOutcome(
        hard_decision=u_hat,
        converged=outcome.converged,
        iterations_used=outcome.iterations_used,
        posterior=None,
    )
    return (final, trace) if return_trace else final
