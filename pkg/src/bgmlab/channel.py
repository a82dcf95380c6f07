"""Binary-input output-symmetric channels and their information quantities.

Three channel families: BSC(p), BEC(eps), and BPSK over AWGN with noise
variance sigma^2 (bit b maps to the signal 1 - 2b).  LLRs are natural-log
log(P(y|0)/P(y|1)); information-theoretic quantities are reported in bits.

The "partial" quantities condition the input prior on an arbitrary
P(X=1) = p instead of the uniform prior: partial mutual information
I_0(p) and the partial Gallager exponent E_0(p, gamma).  Both reduce to
the familiar uniform-prior forms at p = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import roots_hermite

from .ensemble import rho_omega

__all__ = [
    "LLR_SAT",
    "Bsc",
    "Bec",
    "BpskAwgn",
    "BEC_ERASURE",
    "channel_from_config",
    "transmit",
    "llr",
    "partial_mutual_information",
    "capacity",
    "e0",
    "partial_error_exponent",
    "binary_entropy",
    "ldpc_threshold_bound",
    "sigma_from_ebn0_db",
]

# Saturation magnitude standing in for infinite LLRs (BEC known bits,
# BSC with p in {0, 1}).  tanh(LLR_SAT / 2) rounds to 1.0 in float64,
# which is exactly the hard-evidence behavior wanted downstream.
LLR_SAT = 40.0

BEC_ERASURE = -1  # erasure mark in BEC output arrays


@dataclass(frozen=True)
class Bsc:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"crossover must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class Bec:
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"erasure rate must lie in [0, 1], got {self.eps}")


@dataclass(frozen=True)
class BpskAwgn:
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma


Channel = Bsc | Bec | BpskAwgn


def sigma_from_ebn0_db(ebn0_db: float, rate: float) -> float:
    """Noise sigma for a given Eb/N0 in dB at unit signal energy."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return math.sqrt(1.0 / (2.0 * rate * ebn0))


def channel_from_config(cfg: dict, rate: float | None = None) -> Channel:
    """Build a channel from {"type": ..., "param": ...}.

    AWGN also accepts {"type": "awgn", "ebn0_db": x} when `rate` is given.
    """
    kind = cfg.get("type")
    if kind == "bsc":
        return Bsc(float(cfg["param"]))
    if kind == "bec":
        return Bec(float(cfg["param"]))
    if kind == "awgn":
        if "param" in cfg:
            return BpskAwgn(float(cfg["param"]))
        if "ebn0_db" in cfg:
            if rate is None:
                raise ValueError("ebn0_db form needs the code rate")
            return BpskAwgn(sigma_from_ebn0_db(float(cfg["ebn0_db"]), rate))
        raise ValueError("awgn config needs 'param' (sigma) or 'ebn0_db'")
    raise ValueError(f"unknown channel type {kind!r}")


def transmit(ch: Channel, bits, rng: np.random.Generator) -> np.ndarray:
    """Send a bit array through the channel.

    BSC returns uint8 bits, BEC returns int8 with BEC_ERASURE marking
    erasures, AWGN returns float64 observations of the signal 1 - 2b.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if isinstance(ch, Bsc):
        flips = rng.random(bits.shape) < ch.p
        return (bits ^ flips).astype(np.uint8)
    if isinstance(ch, Bec):
        out = bits.astype(np.int8)
        out[rng.random(bits.shape) < ch.eps] = BEC_ERASURE
        return out
    if isinstance(ch, BpskAwgn):
        signal = 1.0 - 2.0 * bits.astype(np.float64)
        return signal + ch.sigma * rng.standard_normal(bits.shape)
    raise TypeError(f"not a channel: {ch!r}")


def llr(ch: Channel, received, sat: float = LLR_SAT) -> np.ndarray:
    """Natural-log LLR log(P(y|0)/P(y|1)) per observation.

    Infinite values (BEC known bits, BSC with p in {0, 1}) saturate at
    +/- sat; BEC erasures map to exactly 0.
    """
    if isinstance(ch, Bsc):
        received = np.asarray(received)
        if ch.p in (0.0, 1.0):
            mag = sat
        else:
            mag = min(abs(math.log((1.0 - ch.p) / ch.p)), sat)
        sign = 1.0 - 2.0 * received.astype(np.float64)
        return (sign * mag) if ch.p <= 0.5 else (-sign * mag)
    if isinstance(ch, Bec):
        received = np.asarray(received)
        out = np.zeros(received.shape, dtype=np.float64)
        out[received == 0] = sat
        out[received == 1] = -sat
        return out
    if isinstance(ch, BpskAwgn):
        return 2.0 * np.asarray(received, dtype=np.float64) / ch.sigma2
    raise TypeError(f"not a channel: {ch!r}")


def _discrete_pairs(ch: Channel) -> tuple[np.ndarray, np.ndarray]:
    """(P(y|0), P(y|1)) over the output alphabet of a discrete channel."""
    if isinstance(ch, Bsc):
        return np.array([1.0 - ch.p, ch.p]), np.array([ch.p, 1.0 - ch.p])
    if isinstance(ch, Bec):
        # outputs ordered (0, erasure, 1)
        return (
            np.array([1.0 - ch.eps, ch.eps, 0.0]),
            np.array([0.0, ch.eps, 1.0 - ch.eps]),
        )
    raise TypeError(f"no finite output alphabet: {ch!r}")


@lru_cache(maxsize=None)
def _hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_hermite(order)
    return nodes, weights / math.sqrt(math.pi)


_GH_ORDERS = (32, 48, 64, 96, 128, 192, 256, 384)


def _expect_given_zero(ch: BpskAwgn, f, tol: float) -> float:
    """E[f(Y) | X = 0] for AWGN by Gauss-Hermite quadrature.

    The order is raised until two successive rules agree within tol.
    """
    prev = None
    for order in _GH_ORDERS:
        t, w = _hermite_rule(order)
        y = 1.0 + math.sqrt(2.0) * ch.sigma * t
        val = float(np.dot(w, f(y)))
        if prev is not None and abs(val - prev) <= tol:
            return val
        prev = val
    return prev


def partial_mutual_information(ch: Channel, p: float, tol: float = 1e-9) -> float:
    """I_0(p) = sum_y P(y|0) log2(P(y|0) / P(y)) with P(y) = (1-p)P(y|0) + pP(y|1).

    Strictly increasing in p on [0, 1/2]; I_0(1/2) is the channel capacity.
    """
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    if p == 0.0:
        return 0.0
    if isinstance(ch, BpskAwgn):
        s2 = ch.sigma2

        def integrand(y):
            # P(y|1)/P(y|0) = exp(-2y/sigma^2) for the +/-1 signal set
            ratio = np.exp(-2.0 * y / s2)
            return -np.log2((1.0 - p) + p * ratio)

        return _expect_given_zero(ch, integrand, tol)
    p0, p1 = _discrete_pairs(ch)
    mix = (1.0 - p) * p0 + p * p1
    mask = p0 > 0.0
    return float(np.sum(p0[mask] * np.log2(p0[mask] / mix[mask])))


def capacity(ch: Channel, tol: float = 1e-9) -> float:
    return partial_mutual_information(ch, 0.5, tol=tol)


def e0(ch: Channel, p: float, gamma: float, tol: float = 1e-9) -> float:
    """Partial Gallager function, in bits.

    E_0(p, gamma) = -log2 sum_y P(y|0)^(1/(1+gamma))
        [(1-p) P(y|0)^(1/(1+gamma)) + p P(y|1)^(1/(1+gamma))]^gamma.

    E_0(p, 0) = 0, and the slope at gamma = 0 equals I_0(p).
    """
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    s = 1.0 / (1.0 + gamma)
    if isinstance(ch, BpskAwgn):
        s2 = ch.sigma2

        def integrand(y):
            # P(y|0)^s [(1-p)P(y|0)^s + pP(y|1)^s]^gamma rewritten against the
            # conditional density: ((1-p) + p (P(y|1)/P(y|0))^s)^gamma
            ratio_s = np.exp(-2.0 * s * y / s2)
            return ((1.0 - p) + p * ratio_s) ** gamma

        total = _expect_given_zero(ch, integrand, tol)
        return -math.log2(total)
    p0, p1 = _discrete_pairs(ch)
    with np.errstate(invalid="ignore"):
        inner = (1.0 - p) * p0**s + p * p1**s
        terms = np.where(p0 > 0.0, p0**s * inner**gamma, 0.0)
    return -math.log2(float(terms.sum()))


_GAMMA_GRID = np.linspace(0.0, 1.0, 32)


def partial_error_exponent(ch: Channel, p: float, rate: float) -> float:
    """max over gamma in [0, 1] of E_0(p, gamma) - gamma * rate, in bits.

    A coarse 32-point scan brackets the optimum, then a bounded scalar
    search refines gamma to 1e-8.  Never negative: gamma = 0 gives 0.
    """
    if rate < 0:
        raise ValueError("rate must be non-negative")

    def objective(g: float) -> float:
        return e0(ch, p, g) - g * rate

    values = np.array([objective(g) for g in _GAMMA_GRID])
    best = int(np.argmax(values))
    lo = _GAMMA_GRID[max(best - 1, 0)]
    hi = _GAMMA_GRID[min(best + 1, len(_GAMMA_GRID) - 1)]
    if hi > lo:
        res = minimize_scalar(
            lambda g: -objective(g),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-8},
        )
        refined = -float(res.fun)
    else:
        refined = float(values[best])
    return max(refined, float(values[best]), 0.0)


def binary_entropy(p: float) -> float:
    """H(p) in bits with the 0 log 0 = 0 convention."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def ldpc_threshold_bound(dc: int, dr: int, tol: float = 1e-6) -> float:
    """Largest p in (0, 1/2) with dr H(p) < dc H(rho_dr(p)).

    rho_dr(p) = (1 - (1 - 2p)^dr) / 2 is the crossover seen by a degree-dr
    check.  Solved by bisection to `tol`.  Returns 0.5 when the inequality
    holds over the whole interval and 0.0 when it never holds.
    """
    if dc < 1 or dr < 2:
        raise ValueError(f"need dc >= 1 and dr >= 2, got ({dc}, {dr})")

    def gap(p: float) -> float:
        return dc * binary_entropy(rho_omega(p, dr)) - dr * binary_entropy(p)

    # at dc == dr the gap rounds to exactly 0 at the right endpoint, which
    # still means the inequality holds on the open interval
    lo, hi = 1e-9, 0.5 - 1e-12
    if gap(hi) >= 0.0:
        return 0.5
    if gap(lo) <= 0.0:
        return 0.0
    return float(brentq(gap, lo, hi, xtol=tol))
