"""Dense linear algebra over GF(2).

Matrices are stored row-major with each row packed into a Python int
(bit j = column j), so row operations are single word-level XORs even
for 128-column generator matrices.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "F2Matrix",
    "F2Vector",
    "NotInvertible",
    "mul_mat_vec",
    "mul_mat_mat",
    "rank",
    "invert",
]


class NotInvertible(ValueError):
    """Raised when a singular matrix is passed to invert()."""


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


class F2Vector:
    """Binary vector packed into one int (bit i = entry i)."""

    __slots__ = ("n", "word")

    def __init__(self, n: int, word: int = 0):
        if n < 1:
            raise ValueError("length must be >= 1")
        self.n = n
        self.word = word & ((1 << n) - 1)

    @classmethod
    def from_bits(cls, bits) -> "F2Vector":
        bits = list(bits)
        word = 0
        for i, b in enumerate(bits):
            if b & 1:
                word |= 1 << i
        return cls(len(bits), word)

    def to_array(self) -> np.ndarray:
        return np.array([(self.word >> i) & 1 for i in range(self.n)],
                        dtype=np.uint8)

    def __getitem__(self, i: int) -> int:
        return (self.word >> i) & 1

    def __eq__(self, other) -> bool:
        return (isinstance(other, F2Vector) and self.n == other.n
                and self.word == other.word)

    def __repr__(self) -> str:
        return f"F2Vector({''.join(str(self[i]) for i in range(self.n))})"


class F2Matrix:
    """Binary matrix with int-packed rows."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words=None):
        if rows < 1 or cols < 1:
            raise ValueError("dimensions must be >= 1")
        self.rows = rows
        self.cols = cols
        self.words = list(words) if words is not None else [0] * rows
        if len(self.words) != rows:
            raise ValueError("row count mismatch")

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows) -> "F2Matrix":
        rows = [list(r) for r in rows]
        cols = len(rows[0])
        words = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
            w = 0
            for j, b in enumerate(r):
                if b & 1:
                    w |= 1 << j
            words.append(w)
        return cls(len(rows), cols, words)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "F2Matrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected 2-D array")
        return cls.from_rows(a.tolist())

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, w in enumerate(self.words):
            for j in range(self.cols):
                out[i, j] = (w >> j) & 1
        return out

    def entry(self, i: int, j: int) -> int:
        return (self.words[i] >> j) & 1

    def transpose(self) -> "F2Matrix":
        words = [0] * self.cols
        for i, w in enumerate(self.words):
            while w:
                j = (w & -w).bit_length() - 1
                words[j] |= 1 << i
                w &= w - 1
        return F2Matrix(self.cols, self.rows, words)

    def __eq__(self, other) -> bool:
        return (isinstance(other, F2Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.words == other.words)

    def __repr__(self) -> str:
        lines = ["".join(str(self.entry(i, j)) for j in range(self.cols))
                 for i in range(self.rows)]
        return "F2Matrix[\n  " + "\n  ".join(lines) + "\n]"


def mul_mat_vec(A: F2Matrix, v: F2Vector) -> F2Vector:
    """result_i = XOR over j of (A_ij AND v_j)."""
    if A.cols != v.n:
        raise ValueError(f"dimension mismatch: {A.cols} columns vs "
                         f"length-{v.n} vector")
    word = 0
    for i, row in enumerate(A.words):
        if _parity(row & v.word):
            word |= 1 << i
    return F2Vector(A.rows, word)


def mul_mat_mat(A: F2Matrix, B: F2Matrix) -> F2Matrix:
    """Standard matrix product over GF(2)."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.cols} vs {B.rows}")
    out = []
    for row in A.words:
        acc = 0
        w = row
        while w:
            k = (w & -w).bit_length() - 1
            acc ^= B.words[k]
            w &= w - 1
        out.append(acc)
    return F2Matrix(A.rows, B.cols, out)


def _eliminate(words, cols):
    """Row-reduce in place; returns list of (pivot_row, pivot_col)."""
    pivots = []
    row = 0
    for col in range(cols):
        # lowest-index row with a 1 in this column
        pivot = next((r for r in range(row, len(words))
                      if (words[r] >> col) & 1), None)
        if pivot is None:
            continue
        words[row], words[pivot] = words[pivot], words[row]
        for r in range(len(words)):
            if r != row and (words[r] >> col) & 1:
                words[r] ^= words[row]
        pivots.append((row, col))
        row += 1
        if row == len(words):
            break
    return pivots


def rank(A: F2Matrix) -> int:
    """Row rank over GF(2) by Gaussian elimination."""
    words = list(A.words)
    return len(_eliminate(words, A.cols))


def invert(A: F2Matrix) -> F2Matrix:
    """Inverse over GF(2); raises NotInvertible if rank < dimension."""
    if A.rows != A.cols:
        raise NotInvertible("matrix is not square")
    n = A.rows
    # augment with identity in the high bits
    words = [A.words[i] | (1 << (n + i)) for i in range(n)]
    pivots = _eliminate(words, n)
    if len(pivots) != n:
        raise NotInvertible(f"rank {len(pivots)} < {n}")
    # full rank: every column pivoted in order, left block is the identity
    return F2Matrix(n, n, [w >> n for w in words])
