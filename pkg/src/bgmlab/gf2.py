"""GF(2) bit vectors and sparse binary matrices.

Bit vectors are plain numpy uint8 arrays with values in {0, 1}; XOR is the
`^` operator.  Matrices are stored row-sparse (sorted column indices per
row) because the generator matrices of interest are very sparse, typically
density 0.01 or below.  A dense uint8 view is available for small matrices
and oracle work.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "bits",
    "bits_from_string",
    "bits_to_string",
    "weight",
    "BitMatrix",
    "mat_vec_mul",
    "density",
    "rank",
    "save_matrix",
    "load_matrix",
    "gf2_rref",
    "gf2_null_space",
]


def bits(values) -> np.ndarray:
    """Coerce to a uint8 array and check every entry is 0 or 1."""
    v = np.asarray(values, dtype=np.uint8)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D bit vector, got shape {v.shape}")
    if v.size and v.max() > 1:
        raise ValueError("bit vectors may only contain 0 and 1")
    return v


def bits_from_string(s: str) -> np.ndarray:
    """Parse a string of '0'/'1' characters, ignoring whitespace."""
    stripped = "".join(s.split())
    if not set(stripped) <= {"0", "1"}:
        raise ValueError(f"not a bit string: {s!r}")
    return np.frombuffer(stripped.encode("ascii"), dtype=np.uint8) - ord("0")


def bits_to_string(v) -> str:
    return "".join("1" if b else "0" for b in np.asarray(v))


def weight(v) -> int:
    """Hamming weight."""
    return int(np.asarray(v).sum())


class BitMatrix:
    """Binary matrix stored as sorted column-index arrays, one per row."""

    __slots__ = ("rows", "cols", "row_supports")

    def __init__(self, rows: int, cols: int, row_supports, validate: bool = True):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        if len(row_supports) != rows:
            raise ValueError(f"need {rows} row supports, got {len(row_supports)}")
        supports = [np.asarray(s, dtype=np.int64) for s in row_supports]
        if validate:
            for i, s in enumerate(supports):
                if s.size:
                    if s[0] < 0 or s[-1] >= cols or np.any(np.diff(s) <= 0):
                        raise ValueError(
                            f"row {i}: supports must be sorted, unique, in [0, {cols})"
                        )
        self.rows = rows
        self.cols = cols
        self.row_supports = supports

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.size and a.max() > 1:
            raise ValueError("entries must be 0 or 1")
        supports = [np.flatnonzero(row).astype(np.int64) for row in a]
        return cls(a.shape[0], a.shape[1], supports, validate=False)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [np.array([i], dtype=np.int64) for i in range(n)], validate=False)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        empty = np.empty(0, dtype=np.int64)
        return cls(rows, cols, [empty] * rows, validate=False)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, s in enumerate(self.row_supports):
            a[i, s] = 1
        return a

    def row_weights(self) -> np.ndarray:
        return np.array([s.size for s in self.row_supports], dtype=np.int64)

    def nnz(self) -> int:
        return int(self.row_weights().sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and all(
                np.array_equal(a, b)
                for a, b in zip(self.row_supports, other.row_supports)
            )
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def mat_vec_mul(m: BitMatrix, v) -> np.ndarray:
    """Row-vector times matrix over GF(2): returns v @ m with XOR accumulation.

    `v` has one bit per matrix row; the result has one bit per column.
    """
    v = np.asarray(v)
    if v.shape != (m.rows,):
        raise ValueError(f"vector length {v.shape} does not match {m.rows} rows")
    active = np.flatnonzero(v)
    if active.size == 0:
        return np.zeros(m.cols, dtype=np.uint8)
    stacked = np.concatenate([m.row_supports[i] for i in active])
    return (np.bincount(stacked, minlength=m.cols) & 1).astype(np.uint8)


def density(m: BitMatrix) -> float:
    """Fraction of nonzero entries.  Errors on an empty matrix."""
    if m.rows == 0 or m.cols == 0:
        raise ValueError("density of an empty matrix is undefined")
    return m.nnz() / (m.rows * m.cols)


def _rows_as_ints(m: BitMatrix) -> list[int]:
    out = []
    for s in m.row_supports:
        acc = 0
        for j in s.tolist():
            acc |= 1 << j
        out.append(acc)
    return out


def rank(m: BitMatrix) -> int:
    """GF(2) rank by elimination on word-packed rows."""
    pivots: dict[int, int] = {}
    for r in _rows_as_ints(m):
        while r:
            lead = r.bit_length() - 1
            if lead in pivots:
                r ^= pivots[lead]
            else:
                pivots[lead] = r
                break
    return len(pivots)


def save_matrix(m: BitMatrix, path) -> None:
    """Write the text format: header 'rows cols', then one line of sorted
    column indices per row (empty line for an all-zero row)."""
    with open(path, "w") as fh:
        fh.write(f"{m.rows} {m.cols}\n")
        for s in m.row_supports:
            fh.write(" ".join(str(j) for j in s.tolist()))
            fh.write("\n")


def load_matrix(path) -> BitMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad header, expected 'rows cols'")
        rows, cols = int(header[0]), int(header[1])
        supports = []
        for i in range(rows):
            line = fh.readline()
            if line == "" and i < rows:
                raise ValueError(f"{path}: truncated after {i} rows")
            supports.append(np.array([int(t) for t in line.split()], dtype=np.int64))
    return BitMatrix(rows, cols, supports)


def gf2_rref(a) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a dense 0/1 array.

    Returns (rref, pivot_columns).  Intended for small matrices; elimination
    is vectorized across rows but scans columns left to right.
    """
    r = np.asarray(a, dtype=np.uint8).copy()
    n_rows, n_cols = r.shape
    pivot_cols: list[int] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        sub = np.flatnonzero(r[row:, col])
        if sub.size == 0:
            continue
        pivot = row + sub[0]
        if pivot != row:
            r[[row, pivot]] = r[[pivot, row]]
        mask = np.flatnonzero(r[:, col])
        mask = mask[mask != row]
        r[mask] ^= r[row]
        pivot_cols.append(col)
        row += 1
    return r, pivot_cols


def gf2_null_space(a) -> np.ndarray:
    """Basis for {v : a @ v = 0 (mod 2)} as rows of a dense uint8 array.

    The basis is in the standard free-variable form: basis vector t has a 1
    at the t-th free column and satisfies the pivot equations.
    """
    a = np.asarray(a, dtype=np.uint8)
    n_cols = a.shape[1]
    rref, pivot_cols = gf2_rref(a)
    free_cols = [c for c in range(n_cols) if c not in pivot_cols]
    basis = np.zeros((len(free_cols), n_cols), dtype=np.uint8)
    for t, fc in enumerate(free_cols):
        basis[t, fc] = 1
        for row_idx, pc in enumerate(pivot_cols):
            if rref[row_idx, fc]:
                basis[t, pc] = 1
    return basis
