"""Affine automorphisms (A, b) of Reed-Muller codes and their bit-index
permutations.

The induced permutation acts on code bit positions through the binary
expansion i = sum z_j 2^j: pi(i) = int(A binary(i) + b).  Composition
convention: compose(g, h) applies h first, i.e. (A_g A_h, A_g b_h + b_g).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .f2 import F2Matrix, F2Vector, invert, mul_mat_mat, mul_mat_vec, rank

__all__ = [
    "AffineAutomorphism",
    "Permutation",
    "sample_ga",
    "sample_stage_shuffle",
    "to_permutation",
    "invert_aut",
    "compose",
    "apply_perm",
    "identity_aut",
]


@dataclass(frozen=True)
class AffineAutomorphism:
    A: F2Matrix
    b: F2Vector

    @property
    def m(self) -> int:
        return self.A.rows


@dataclass(frozen=True)
class Permutation:
    n: int
    map: np.ndarray  # map[i] = pi(i)

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.map] = np.arange(self.n, dtype=np.int64)
        return Permutation(self.n, inv)


def identity_aut(m: int) -> AffineAutomorphism:
    return AffineAutomorphism(F2Matrix.identity(m), F2Vector(m, 0))


def sample_ga(m: int, rng: np.random.Generator) -> AffineAutomorphism:
    """Uniform element of the general affine group GA(m).

    A is drawn by rejection sampling over uniform m x m matrices until
    non-singular (acceptance probability > 0.288 for every m); b is
    uniform over F2^m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    while True:
        words = [int(w) for w in rng.integers(0, 1 << m, size=m)]
        A = F2Matrix(m, m, words)
        if rank(A) == m:
            break
    b = F2Vector(m, int(rng.integers(0, 1 << m)))
    return AffineAutomorphism(A, b)


def sample_stage_shuffle(m: int, rng: np.random.Generator) -> AffineAutomorphism:
    """Uniform element of the stage-shuffle subgroup Pi(m).

    A is a uniform permutation matrix (variable relabeling), b = 0.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    order = rng.permutation(m)
    words = [1 << int(order[i]) for i in range(m)]
    return AffineAutomorphism(F2Matrix(m, m, words), F2Vector(m, 0))


def to_permutation(aut: AffineAutomorphism) -> Permutation:
    """pi(i) = int(A binary(i) + b)."""
    m = aut.m
    n = 1 << m
    table = np.empty(n, dtype=np.int64)
    # column images: A applied to each unit vector
    col = [mul_mat_vec(aut.A, F2Vector(m, 1 << j)).word for j in range(m)]
    for i in range(n):
        acc = aut.b.word
        for j in range(m):
            if (i >> j) & 1:
                acc ^= col[j]
        table[i] = acc
    return Permutation(n, table)


def invert_aut(aut: AffineAutomorphism) -> AffineAutomorphism:
    """(A, b) inverse is (A^-1, A^-1 b); permutations invert accordingly."""
    Ainv = invert(aut.A)
    return AffineAutomorphism(Ainv, mul_mat_vec(Ainv, aut.b))


def compose(outer: AffineAutomorphism, inner: AffineAutomorphism) -> AffineAutomorphism:
    """Automorphism applying inner first, then outer."""
    A = mul_mat_mat(outer.A, inner.A)
    b = F2Vector(outer.m, mul_mat_vec(outer.A, inner.b).word ^ outer.b.word)
    return AffineAutomorphism(A, b)


def apply_perm(perm: Permutation, v):
    """out_i = v[pi(i)] for bit or real sequences."""
    v = np.asarray(v)
    if v.shape[0] != perm.n:
        raise ValueError(f"length {v.shape[0]} != {perm.n}")
    return v[perm.map]
