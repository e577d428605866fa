"""Reed-Muller code construction, encoding, and membership tests.

Bit-position convention: position i encodes the variable assignment
z_j = bit j of i.  The monomial attached to information position i is
the product of z_j over the zero bits of i, so its evaluation vector
has a 1 exactly at positions covering the complement of i.  Bit
vectors are numpy uint8 arrays throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .f2 import F2Matrix, mul_mat_vec, F2Vector, rank

__all__ = [
    "RmCode",
    "build_code",
    "encode",
    "encode_matrix",
    "is_codeword",
    "min_distance_bruteforce",
    "butterfly_transform",
]


@dataclass(frozen=True)
class RmCode:
    r: int
    m: int
    N: int
    K: int
    info_set: tuple       # sorted bit positions with popcount >= m - r
    G: F2Matrix           # K x N, monomial evaluation rows
    H: F2Matrix | None    # (N-K) x N generator of RM(m-r-1, m); None if r = m
    frozen_mask: np.ndarray = field(compare=False)  # bool, True where frozen

    def __repr__(self) -> str:
        return f"RmCode(r={self.r}, m={self.m}, N={self.N}, K={self.K})"


def _monomial_rows(r: int, m: int) -> tuple[tuple, list]:
    """Info positions (sorted) and packed evaluation rows of their monomials."""
    n = 1 << m
    full = n - 1
    info = [i for i in range(n) if bin(i).count("1") >= m - r]
    words = []
    for i in info:
        mask = full ^ i  # variables of the monomial
        w = 0
        for p in range(n):
            if p & mask == mask:
                w |= 1 << p
        words.append(w)
    return tuple(info), words


def build_code(r: int, m: int) -> RmCode:
    """Construct RM(r, m) with monomial generator rows.

    G rows evaluate all monomials of degree <= r; H is the generator of
    the dual code RM(m-r-1, m), empty (None) when r = m.
    """
    if m < 1 or r < 0 or r > m:
        raise ValueError(f"invalid RM parameters r={r}, m={m}")
    n = 1 << m
    info, words = _monomial_rows(r, m)
    G = F2Matrix(len(info), n, words)
    if r == m:
        H = None
    else:
        _, hwords = _monomial_rows(m - r - 1, m)
        H = F2Matrix(len(hwords), n, hwords)
    frozen = np.ones(n, dtype=bool)
    frozen[list(info)] = False
    return RmCode(r=r, m=m, N=n, K=len(info), info_set=info, G=G, H=H,
                  frozen_mask=frozen)


def butterfly_transform(w: np.ndarray) -> np.ndarray:
    """m-fold butterfly over GF(2): pairs (p, p+2^j) map to (a^b, b).

    Acts on the last axis, so a batch of words transforms in one call.
    """
    w = np.asarray(w, dtype=np.uint8).copy()
    n = w.shape[-1]
    flat = w.reshape(-1, n)
    half = 1
    while half < n:
        upper = np.array([p for p in range(n) if not p & half])
        flat[:, upper] ^= flat[:, upper + half]
        half <<= 1
    return w


def encode(code: RmCode, u) -> np.ndarray:
    """x = u G over GF(2).

    Implemented as the fast-transform path: scatter u onto info_set,
    butterfly, and reverse the index order.  Matches the G-matrix
    product bit-exactly (covered by tests).
    """
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[0] != code.K:
        raise ValueError(f"message length {u.shape[0]} != K={code.K}")
    w = np.zeros(code.N, dtype=np.uint8)
    w[list(code.info_set)] = u & 1
    return butterfly_transform(w)[::-1].copy()


def encode_matrix(code: RmCode, u) -> np.ndarray:
    """Reference encode through the packed generator rows."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[0] != code.K:
        raise ValueError(f"message length {u.shape[0]} != K={code.K}")
    acc = 0
    for k in range(code.K):
        if u[k] & 1:
            acc ^= code.G.words[k]
    return np.array([(acc >> p) & 1 for p in range(code.N)], dtype=np.uint8)


def is_codeword(code: RmCode, x) -> bool:
    """True iff H x^T = 0 over GF(2) (vacuous for r = m)."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape[0] != code.N:
        raise ValueError(f"length {x.shape[0]} != N={code.N}")
    if code.H is None:
        return True
    xv = F2Vector.from_bits(x.tolist())
    return mul_mat_vec(code.H, xv).word == 0


def min_distance_bruteforce(code: RmCode) -> int:
    """Minimum weight over all nonzero codewords; K <= 20 only."""
    if code.K > 20:
        raise ValueError(f"K={code.K} too large for exhaustive enumeration")
    msgs = np.arange(1, 1 << code.K, dtype=np.int64)
    u = ((msgs[:, None] >> np.arange(code.K)) & 1).astype(np.uint8)
    w = np.zeros((u.shape[0], code.N), dtype=np.uint8)
    w[:, list(code.info_set)] = u
    x = butterfly_transform(w)
    return int(x.sum(axis=1).min())
