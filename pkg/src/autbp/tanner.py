"""Flooding belief propagation over a Tanner graph, plus the
multiple-bases ensemble over random parity-check matrices.

Check nodes use the total-then-box-minus form: one running box-plus
over all incoming messages, then one box-minus per edge to remove the
edge's own contribution.  Variable nodes add the channel LLR and all
incoming check messages and subtract per edge.  The syndrome is checked
on the channel hard decision before the first iteration, so a clean
codeword reports zero iterations.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .code import RmCode
from .complexity import OpCount, cn_opcount, vn_opcount
from .f2 import F2Matrix, mul_mat_mat, rank
from .ffg import DecodeResult
from .msgops import (
    F_MINUS_TABLE,
    F_PLUS_TABLE,
    L_MAX,
    boxminus,
    boxplus,
)

__all__ = ["TannerGraph", "build_tanner", "bp_decode", "random_pcm",
           "random_minweight_pcm", "mbbp_decode"]


@dataclass(frozen=True)
class TannerGraph:
    """Parity-check matrix with edge adjacency in both directions."""

    H: F2Matrix
    cn_degrees: tuple
    adjacency: tuple  # (check -> vars, var -> checks)
    _dense: np.ndarray  # uint8 copy for syndrome checks
    _cv_var: np.ndarray  # (rows, max_deg) variable index per slot
    _cv_mask: np.ndarray  # (rows, max_deg) slot validity
    _edge_var: np.ndarray
    _edge_row: np.ndarray
    _edge_slot: np.ndarray

    @property
    def n_checks(self):
        return self.H.rows

    @property
    def n_vars(self):
        return self.H.cols


def build_tanner(H: F2Matrix) -> TannerGraph:
    dense = H.to_array().astype(np.uint8)
    rows, cols = dense.shape
    check_vars = tuple(tuple(np.flatnonzero(dense[r]).tolist())
                       for r in range(rows))
    var_checks = tuple(tuple(np.flatnonzero(dense[:, v]).tolist())
                       for v in range(cols))
    degs = tuple(len(cv) for cv in check_vars)
    if min(degs) < 2:
        raise ValueError("check node of degree < 2")
    if any(len(vc) == 0 for vc in var_checks):
        raise ValueError("unconnected variable node")
    dmax = max(degs)
    cv_var = np.zeros((rows, dmax), dtype=np.int64)
    cv_mask = np.zeros((rows, dmax), dtype=bool)
    ev, er, es = [], [], []
    for r, cv in enumerate(check_vars):
        for s, v in enumerate(cv):
            cv_var[r, s] = v
            cv_mask[r, s] = True
            ev.append(v)
            er.append(r)
            es.append(s)
    return TannerGraph(
        H=H,
        cn_degrees=degs,
        adjacency=(check_vars, var_checks),
        _dense=dense,
        _cv_var=cv_var,
        _cv_mask=cv_mask,
        _edge_var=np.array(ev, dtype=np.int64),
        _edge_row=np.array(er, dtype=np.int64),
        _edge_slot=np.array(es, dtype=np.int64),
    )


def _iter_opcount(g: TannerGraph) -> OpCount:
    ops = OpCount()
    for d in g.cn_degrees:
        ops = ops + cn_opcount(d)
    for vc in g.adjacency[1]:
        ops = ops + vn_opcount(len(vc))
    return ops


def bp_decode(g: TannerGraph, llrs, iters: int, exact: bool = False,
              track_ops: bool = True) -> DecodeResult:
    """Flooding BP with syndrome-based early stopping.

    The arithmetic defaults to table mode, matching the factor-graph
    decoder's default.
    """
    llr = np.asarray(llrs, dtype=np.float64)
    if llr.shape != (g.n_vars,):
        raise ValueError(f"expected {g.n_vars} LLRs, got {llr.shape}")

    x_hat = (llr < 0).astype(np.uint8)
    per_iter = _iter_opcount(g) if track_ops else OpCount()
    if not np.any((g._dense @ x_hat) & 1):
        return DecodeResult(x_hat=x_hat, u_hat=None, iterations_used=0,
                            converged=True, op_count=OpCount())

    # padded (checks, max_deg) message grid; +inf padding is the
    # box-plus identity and keeps the fold identical to a ragged loop
    pad = np.full(g._cv_var.shape, np.inf)
    v2c_flat = llr[g._edge_var]
    it = 0
    converged = False
    for it in range(1, iters + 1):
        pad[g._edge_row, g._edge_slot] = v2c_flat
        total = pad[:, 0]
        for d in range(1, pad.shape[1]):
            total = boxplus(total, pad[:, d], exact=exact, table=F_PLUS_TABLE)
        c2v_pad = boxminus(total[:, None], pad, exact=exact,
                           table=F_MINUS_TABLE)
        c2v_flat = np.clip(c2v_pad[g._edge_row, g._edge_slot], -L_MAX, L_MAX)

        beliefs = llr + np.bincount(g._edge_var, weights=c2v_flat,
                                    minlength=g.n_vars)
        v2c_flat = np.clip(beliefs[g._edge_var] - c2v_flat, -L_MAX, L_MAX)

        x_hat = (beliefs < 0).astype(np.uint8)
        if not np.any((g._dense @ x_hat) & 1):
            converged = True
            break
    return DecodeResult(x_hat=x_hat, u_hat=None, iterations_used=it,
                        converged=converged, op_count=per_iter.scaled(it))


def random_pcm(code: RmCode, rng) -> F2Matrix:
    """Random basis of the dual code: T @ H with T uniform invertible."""
    if code.H is None:
        raise ValueError("code has an empty dual (r = m)")
    n = code.H.rows
    mask = (1 << n) - 1
    while True:
        draws = rng.integers(0, 2 ** 64, size=n, dtype=np.uint64)
        T = F2Matrix(n, n, tuple(int(w) & mask for w in draws))
        if rank(T) == n:
            return mul_mat_mat(T, code.H)


def _random_minweight_dual_word(code: RmCode, rng) -> int:
    """One uniform-ish minimum-weight dual codeword, bit-packed.

    Minimum-weight words of an order-r_dual RM code are indicators of
    affine subspaces: products of r_dual independent affine forms.
    """
    m = code.m
    r_dual = m - code.r - 1
    if r_dual == 0:
        return (1 << code.N) - 1
    points = np.arange(code.N, dtype=np.uint64)
    while True:
        a = rng.integers(1, 1 << m, size=r_dual, dtype=np.int64)
        if rank(F2Matrix(r_dual, m, tuple(int(v) for v in a))) < r_dual:
            continue
        b = rng.integers(0, 2, size=r_dual)
        vals = np.ones(code.N, dtype=np.uint8)
        for t in range(r_dual):
            form = (np.bitwise_count(points & np.uint64(a[t])) + b[t]) & 1
            vals &= form.astype(np.uint8)
        packed = np.packbits(vals, bitorder="little").tobytes()
        return int.from_bytes(packed, "little")


def random_minweight_pcm(code: RmCode, rng, nrows: Optional[int] = None) -> F2Matrix:
    """Random parity-check matrix made of minimum-weight dual words.

    The first n - k rows form a full-rank basis; RM codes are spanned by
    their minimum-weight codewords, so rejection sampling until the rank
    fills always terminates.  With nrows > n - k the matrix is
    overcomplete: extra distinct words are appended, which adds
    redundant checks that help short-iteration flooding BP.  Low-weight
    checks keep check-node degrees small, which flooding BP needs; a
    uniform invertible recombination (random_pcm) yields degree ~N/2
    checks on which BP makes no progress.

    Small duals may not contain nrows distinct minimum-weight words; the
    matrix is truncated once fresh draws keep hitting duplicates.
    """
    if code.H is None:
        raise ValueError("code has an empty dual (r = m)")
    base = code.H.rows
    target = base if nrows is None else nrows
    if target < base:
        raise ValueError("nrows below the dual dimension cannot be full rank")
    words = []
    seen = set()
    stale = 0
    while len(words) < target:
        w = _random_minweight_dual_word(code, rng)
        if len(words) < base:
            cand = F2Matrix(len(words) + 1, code.N, tuple(words + [w]))
            if rank(cand) < len(words) + 1:
                continue
        elif w in seen:
            stale += 1
            if stale > 64:
                break
            continue
        words.append(w)
        seen.add(w)
        stale = 0
    return F2Matrix(len(words), code.N, tuple(words))


OVERCOMPLETE_FACTOR = 8


def mbbp_decode(code: RmCode, llrs, M: int, iters: int, rng=None,
                graphs: Optional[list] = None) -> np.ndarray:
    """Multiple-bases BP: M decoders on random parity-check matrices.

    Bases are overcomplete random minimum-weight-row matrices (factor 8
    over the dual dimension) so that check degrees stay BP-friendly and
    few-iteration flooding has enough redundant checks to converge.
    Selection runs ML-in-the-list over the candidates that converged to
    a codeword (syndrome zero); raw non-codeword outputs would dominate
    the correlation unfairly.  If no decoder converges, the first
    decoder's output is returned.  The LLR vector stands in for the
    received vector in the correlation, which is a positive rescaling.
    """
    if M < 1:
        raise ValueError("ensemble size M must be >= 1")
    if graphs is None:
        if rng is None:
            rng = np.random.default_rng()
        nrows = OVERCOMPLETE_FACTOR * code.H.rows
        graphs = [build_tanner(random_minweight_pcm(code, rng, nrows))
                  for _ in range(M)]
    if len(graphs) != M:
        raise ValueError("need one Tanner graph per decoder")
    llr = np.asarray(llrs, dtype=np.float64)

    from .ensemble import ml_in_the_list

    cands = []
    fallback = None
    for j, g in enumerate(graphs):
        res = bp_decode(g, llr, iters)
        if j == 0:
            fallback = res.x_hat
        if res.converged:
            cands.append(res.x_hat)
    if not cands:
        return fallback
    _, best = ml_in_the_list(np.array(cands), llr)
    return best
