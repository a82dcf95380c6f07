"""Bernoulli generator-matrix code ensembles.

A systematic code transmits the message followed by parity bits u @ G,
where G has i.i.d. Bernoulli(rho) entries.  The parity-check sibling uses
the same G as a check matrix: {u : u @ G = 0}.  Expected weight enumerators
of both families have closed forms in terms of the parity success
probability rho_omega and are evaluated in log space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, logsumexp

from .gf2 import BitMatrix, load_matrix, mat_vec_mul, rank, save_matrix
from .rng import make_rng

__all__ = [
    "rho_omega",
    "SystematicCode",
    "BpcCode",
    "sample_bgm",
    "sample_fixed_row_weight",
    "sample_bpc",
    "encode",
    "Iowef",
    "iowef",
    "bpc_weight_distribution",
    "save_code",
    "load_code",
]


def rho_omega(rho: float, omega: int) -> float:
    """Probability that a parity bit disagrees with 0 given a weight-omega message.

    Each parity bit is an XOR of Bernoulli(rho) picks over the omega set
    message positions, so the closed form is (1 - (1 - 2 rho)^omega) / 2.
    It is nondecreasing in omega and tends to 1/2.
    """
    if not 0.0 < rho <= 0.5:
        raise ValueError(f"rho must lie in (0, 1/2], got {rho}")
    if omega < 0:
        raise ValueError(f"omega must be non-negative, got {omega}")
    return 0.5 * (1.0 - (1.0 - 2.0 * rho) ** omega)


@dataclass(eq=False)
class SystematicCode:
    """Code with generator [I | G]; G is k x m and sparse."""

    k: int
    m: int
    g: BitMatrix
    meta: dict = field(default_factory=dict)
    row_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.g.rows != self.k or self.g.cols != self.m:
            raise ValueError(
                f"G has shape {self.g.rows}x{self.g.cols}, expected {self.k}x{self.m}"
            )
        # weight of row i of [I | G]; the identity contributes the +1
        self.row_weights = 1 + self.g.row_weights()

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.k + self.m)

    @property
    def n(self) -> int:
        return self.k + self.m


def encode(code: SystematicCode, u) -> np.ndarray:
    """Systematic codeword (u, u @ G) as a uint8 array of length k + m."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (code.k,):
        raise ValueError(f"message length {u.shape} does not match k={code.k}")
    return np.concatenate([u, mat_vec_mul(code.g, u)])


@dataclass(eq=False)
class BpcCode:
    """Parity-check code {u in F_2^k : u @ G = 0} with G of shape k x m."""

    k: int
    m: int
    g: BitMatrix
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.g.rows != self.k or self.g.cols != self.m:
            raise ValueError(
                f"G has shape {self.g.rows}x{self.g.cols}, expected {self.k}x{self.m}"
            )

    @property
    def design_rate(self) -> Fraction:
        return Fraction(self.k - self.m, self.k)

    @property
    def actual_rate(self) -> Fraction:
        # dimension k - rank(G); equals the design rate iff G has full column rank
        return Fraction(self.k - rank(self.g), self.k)

    def contains(self, u) -> bool:
        u = np.asarray(u, dtype=np.uint8)
        if u.shape != (self.k,):
            raise ValueError(f"vector length {u.shape} does not match k={self.k}")
        return not mat_vec_mul(self.g, u).any()


def _sample_g(k: int, m: int, rho: float, seed: int) -> BitMatrix:
    if k <= 0 or m <= 0:
        raise ValueError("k and m must be positive")
    if not 0.0 < rho <= 0.5:
        raise ValueError(f"rho must lie in (0, 1/2], got {rho}")
    rng = make_rng(seed, "bgm-sample")
    supports = []
    # one uniform draw per entry, row blocked to bound memory
    for _ in range(k):
        row = np.flatnonzero(rng.random(m) < rho).astype(np.int64)
        supports.append(row)
    return BitMatrix(k, m, supports, validate=False)


def sample_bgm(k: int, m: int, rho: float, seed: int) -> SystematicCode:
    """Draw a systematic code with i.i.d. Bernoulli(rho) entries in G."""
    g = _sample_g(k, m, rho, seed)
    return SystematicCode(k, m, g, meta={"construction": "bgm", "rho": rho, "seed": seed})


def sample_fixed_row_weight(k: int, m: int, w: int, seed: int) -> SystematicCode:
    """Draw a systematic code whose G rows each have exactly w ones."""
    if k <= 0 or m <= 0:
        raise ValueError("k and m must be positive")
    if not 0 <= w <= m:
        raise ValueError(f"row weight {w} outside [0, {m}]")
    rng = make_rng(seed, "fixed-row-weight-sample")
    supports = [np.sort(rng.choice(m, size=w, replace=False)) for _ in range(k)]
    g = BitMatrix(k, m, supports, validate=False)
    return SystematicCode(
        k, m, g, meta={"construction": "fixed-row-weight", "w": w, "seed": seed}
    )


def sample_bpc(k: int, m: int, rho: float, seed: int) -> BpcCode:
    """Draw a parity-check code from the same Bernoulli(rho) matrix family."""
    g = _sample_g(k, m, rho, seed)
    return BpcCode(k, m, g, meta={"construction": "bpc", "rho": rho, "seed": seed})


def _log_binom(n: int, k_arr) -> np.ndarray:
    k_arr = np.asarray(k_arr, dtype=np.float64)
    return gammaln(n + 1) - gammaln(k_arr + 1) - gammaln(n - k_arr + 1)


@dataclass
class Iowef:
    """Ensemble-average input-output weight enumerator.

    log_coeff[i, j] is the natural log of the expected number of codewords
    with message weight i and parity weight j.  Totals are exact in log
    space; the linear table overflows to inf for large k and is provided
    for inspection at small scale.
    """

    k: int
    m: int
    rho: float
    max_input_weight: int
    log_coeff: np.ndarray

    @property
    def coefficients(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_coeff)

    def log_total(self) -> float:
        """Natural log of the summed coefficient mass."""
        return float(logsumexp(self.log_coeff))

    def total(self) -> float:
        return float(np.exp(self.log_total()))


def iowef(k: int, m: int, rho: float, max_input_weight: int | None = None) -> Iowef:
    """Expected codeword counts A_{i,j} over the Bernoulli(rho) ensemble.

    A_{i,j} = C(k,i) C(m,j) rho_i^j (1-rho_i)^(m-j): the parity weight of a
    weight-i message is binomial with success probability rho_i.
    """
    if k <= 0 or m <= 0:
        raise ValueError("k and m must be positive")
    if max_input_weight is None:
        max_input_weight = k
    if not 0 <= max_input_weight <= k:
        raise ValueError(f"max_input_weight {max_input_weight} outside [0, {k}]")
    n_i = max_input_weight + 1
    log_coeff = np.full((n_i, m + 1), -np.inf)
    log_coeff[0, 0] = 0.0  # the zero message always maps to zero parity
    j = np.arange(m + 1, dtype=np.float64)
    log_cmj = _log_binom(m, j)
    for i in range(1, n_i):
        p = rho_omega(rho, i)
        with np.errstate(divide="ignore"):
            log_pmf = log_cmj + j * np.log(p) + (m - j) * np.log1p(-p)
        log_coeff[i] = _log_binom(k, i) + log_pmf
    return Iowef(k=k, m=m, rho=rho, max_input_weight=max_input_weight, log_coeff=log_coeff)


def bpc_weight_distribution(
    k: int, m: int, rho: float, max_weight: int | None = None, log: bool = False
) -> np.ndarray:
    """Expected number of weight-omega words in the parity-check family.

    A_omega = C(k, omega) (1 - rho_omega)^m, the chance that all m checks
    annihilate a fixed weight-omega vector, summed over positions.
    """
    if k <= 0 or m <= 0:
        raise ValueError("k and m must be positive")
    if max_weight is None:
        max_weight = k
    if not 0 <= max_weight <= k:
        raise ValueError(f"max_weight {max_weight} outside [0, {k}]")
    omega = np.arange(max_weight + 1)
    log_a = np.empty(max_weight + 1)
    log_a[0] = 0.0
    if max_weight >= 1:
        p = np.array([rho_omega(rho, int(w)) for w in omega[1:]])
        log_a[1:] = _log_binom(k, omega[1:]) + m * np.log1p(-p)
    if log:
        return log_a
    with np.errstate(over="ignore"):
        return np.exp(log_a)


def save_code(code: SystematicCode | BpcCode, path) -> None:
    """Write the G matrix in the text format plus a JSON sidecar at path + '.json'."""
    save_matrix(code.g, path)
    header = {"k": code.k, "m": code.m}
    header.update(code.meta)
    with open(f"{path}.json", "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_code(path) -> SystematicCode:
    """Read a systematic code saved by save_code; the sidecar is optional."""
    g = load_matrix(path)
    meta = {}
    try:
        with open(f"{path}.json") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        pass
    meta = {key: val for key, val in meta.items() if key not in ("k", "m")}
    if meta.get("construction") == "bpc":
        return BpcCode(g.rows, g.cols, g, meta=meta)
    return SystematicCode(g.rows, g.cols, g, meta=meta)
