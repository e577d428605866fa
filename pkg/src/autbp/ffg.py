"""Belief propagation on the staged factor graph of a Reed-Muller code.

The graph has m stages of N/2 degree-3 processing elements wired as the
m-fold Plotkin/polar butterfly.  Each iteration runs one rightward sweep
(stage 0 to m-1) followed by one leftward sweep (stage m-1 to 0).  With
message cells R[c][i] (rightward plane) and L[c][i] (leftward plane),
the element pairing (i, j = i + 2^c) at stage c updates

    R[c+1][i] = R[c][i] (+) (L[c+1][j] + R[c][j])
    R[c+1][j] = (R[c][i] (+) L[c+1][i]) + R[c][j]
    L[c][i]   = L[c+1][i] (+) (L[c+1][j] + R[c][j])
    L[c][j]   = (L[c+1][i] (+) R[c][i]) + L[c+1][j]

where (+) is box-plus.  Frozen a-prioris are exact +inf so that the
reduced graph (constants propagated out) stays bit-identical to the
full graph.  Channel LLRs attach to the right boundary in reversed
index order, matching the encoder's output reversal.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .code import RmCode
from .complexity import OpCount, stopping_opcount
from .msgops import F_PLUS_TABLE, clip_llr

__all__ = [
    "FactorGraph",
    "DecoderConfig",
    "DecodeResult",
    "build_ffg",
    "reduce_ffg",
    "decode",
    "count_ops",
]

# op classes produced by constant propagation, in precedence order
_CONST, _COPY, _ADD, _BOX, _FULL = "const", "copy", "add", "box", "full"

# cell states tracked during reduction
_OTH, _ZERO, _INF = 0, 1, 2


@dataclass(frozen=True)
class DecoderConfig:
    """Iteration limit, early-stopping switch, and arithmetic mode."""

    max_iters: int = 200
    stopping: bool = True
    arithmetic: str = "table"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.arithmetic not in ("exact", "table"):
            raise ValueError("arithmetic must be 'exact' or 'table'")


@dataclass
class DecodeResult:
    x_hat: np.ndarray
    u_hat: np.ndarray
    iterations_used: int
    converged: bool
    op_count: OpCount


@dataclass(frozen=True)
class FactorGraph:
    """Immutable staged graph plus its flattened operation table.

    active_ops[c, p, k] marks which of the four message computations of
    element p at stage c survive reduction (k indexes R-upper, R-lower,
    L-upper, L-lower).  Deactivated slots are either constants folded
    into initial message memory or pure pass-throughs.
    """

    code: RmCode
    m: int
    N: int
    stages: tuple
    reduced: bool
    active_ops: np.ndarray
    n_boxplus: int
    n_additions: int
    class_counts: dict
    _kinds: np.ndarray = field(repr=False)
    _outs: np.ndarray = field(repr=False)
    _s1: np.ndarray = field(repr=False)
    _s2: np.ndarray = field(repr=False)
    _s3: np.ndarray = field(repr=False)
    _inf_cells: np.ndarray = field(repr=False)


def _propagate_states(code: RmCode, stages):
    """Constant-propagate a-priori values through the rightward plane.

    Frozen positions inject +inf, information positions inject an exact
    zero.  Leftward cells are never constant (they descend from channel
    LLRs), so only R states are tracked.
    """
    m, N = code.m, code.N
    states = np.full((m + 1, N), _OTH, dtype=np.int8)
    for i in range(N):
        states[0][i] = _INF if code.frozen_mask[i] else _ZERO
    for c in range(m):
        for i, j in stages[c]:
            a, b = states[c][i], states[c][j]
            if a == _ZERO:
                states[c + 1][i] = _ZERO
            elif a == _INF and b == _INF:
                states[c + 1][i] = _INF
            if b == _INF:
                states[c + 1][j] = _INF
            elif a == _ZERO and b == _ZERO:
                states[c + 1][j] = _ZERO
    return states


def _classify(a, b):
    """Op classes for the four outputs of one element given R-input states."""
    if a == _ZERO:
        r1 = _CONST
    elif a == _INF and b == _INF:
        r1 = _CONST
    elif a == _INF and b == _ZERO:
        r1 = _COPY
    elif a == _INF:
        r1 = _ADD
    elif b == _INF:
        r1 = _COPY
    elif b == _ZERO:
        r1 = _BOX
    else:
        r1 = _FULL
    if b == _INF:
        r2 = _CONST
    elif a == _ZERO and b == _ZERO:
        r2 = _CONST
    elif a == _ZERO:
        r2 = _COPY
    elif a == _INF and b == _ZERO:
        r2 = _COPY
    elif a == _INF:
        r2 = _ADD
    elif b == _ZERO:
        r2 = _BOX
    else:
        r2 = _FULL
    l1 = _COPY if b == _INF else (_BOX if b == _ZERO else _FULL)
    l2 = _COPY if a == _ZERO else (_ADD if a == _INF else _FULL)
    return r1, r2, l1, l2


def _build(code: RmCode, reduced: bool, bit_order=None) -> FactorGraph:
    # bit_order reorders which index bit each pipeline stage splits on;
    # the default is the natural order 0..m-1
    m, N = code.m, code.N
    loff = (m + 1) * N
    if bit_order is None:
        bit_order = tuple(range(m))

    def rc(c, i):
        return c * N + i

    def lc(c, i):
        return loff + c * N + i

    stages = tuple(
        tuple((i, i + (1 << bit_order[c]))
              for i in range(N) if not (i >> bit_order[c]) & 1)
        for c in range(m)
    )
    states = _propagate_states(code, stages)
    active = np.ones((m, N // 2, 4), dtype=bool)
    counts = {k: 0 for k in (_CONST, _COPY, _ADD, _BOX, _FULL)}
    # (kind, out, s1, s2, s3) tuples collected per stage and sweep
    r_ops = [[] for _ in range(m)]
    l_ops = [[] for _ in range(m)]
    inf_cells = []

    K = _kernels
    for c in range(m):
        for p, (i, j) in enumerate(stages[c]):
            a, b = states[c][i], states[c][j]
            li, lj = lc(c + 1, i), lc(c + 1, j)
            ri, rj = rc(c, i), rc(c, j)
            if not reduced:
                cls = (_FULL, _FULL, _FULL, _FULL)
            else:
                cls = _classify(a, b)
            for k in range(4):
                counts[cls[k]] += 1
                if cls[k] in (_CONST, _COPY):
                    active[c, p, k] = False

            # rightward-plane outputs
            out1, out2 = rc(c + 1, i), rc(c + 1, j)
            k1, k2, k3, k4 = cls
            if k1 == _FULL:
                r_ops[c].append((K.OP_BOX_OF_ADD, out1, ri, lj, rj))
            elif k1 == _ADD:
                r_ops[c].append((K.OP_ADD, out1, lj, rj, 0))
            elif k1 == _BOX:
                r_ops[c].append((K.OP_BOX, out1, ri, lj, 0))
            elif k1 == _COPY:
                src = lj if a == _INF else ri
                r_ops[c].append((K.OP_COPY, out1, src, 0, 0))
            elif states[c + 1][i] == _INF:
                inf_cells.append(out1)

            if k2 == _FULL:
                r_ops[c].append((K.OP_ADD_OF_BOX, out2, ri, li, rj))
            elif k2 == _ADD:
                r_ops[c].append((K.OP_ADD, out2, li, rj, 0))
            elif k2 == _BOX:
                r_ops[c].append((K.OP_BOX, out2, ri, li, 0))
            elif k2 == _COPY:
                src = li if a == _INF else rj
                r_ops[c].append((K.OP_COPY, out2, src, 0, 0))
            elif states[c + 1][j] == _INF:
                inf_cells.append(out2)

            # leftward-plane outputs
            out3, out4 = lc(c, i), lc(c, j)
            if k3 == _FULL:
                l_ops[c].append((K.OP_BOX_OF_ADD, out3, li, lj, rj))
            elif k3 == _BOX:
                l_ops[c].append((K.OP_BOX, out3, li, lj, 0))
            else:
                l_ops[c].append((K.OP_COPY, out3, li, 0, 0))

            if k4 == _FULL:
                l_ops[c].append((K.OP_ADD_OF_BOX, out4, li, ri, lj))
            elif k4 == _ADD:
                l_ops[c].append((K.OP_ADD, out4, li, lj, 0))
            else:
                l_ops[c].append((K.OP_COPY, out4, lj, 0, 0))

    if not reduced:
        # full graph seeds only the frozen a-prioris; downstream
        # infinities regenerate every sweep
        inf_cells = [rc(0, i) for i in range(N) if code.frozen_mask[i]]
    else:
        inf_cells.extend(rc(0, i) for i in range(N) if code.frozen_mask[i])

    # execution order: rightward sweep ascending, leftward descending;
    # within a stage ops are independent, so group by kind for the
    # interpreter's branch predictor
    flat = []
    for c in range(m):
        flat.extend(sorted(r_ops[c], key=lambda t: t[0]))
    for c in range(m - 1, -1, -1):
        flat.extend(sorted(l_ops[c], key=lambda t: t[0]))

    arr = np.array(flat, dtype=np.int64).reshape(-1, 5)
    return FactorGraph(
        code=code,
        m=m,
        N=N,
        stages=stages,
        reduced=reduced,
        active_ops=active,
        n_boxplus=counts[_FULL] + counts[_BOX],
        n_additions=counts[_FULL] + counts[_ADD],
        class_counts=counts,
        _kinds=arr[:, 0].astype(np.int8),
        _outs=arr[:, 1].astype(np.int32),
        _s1=arr[:, 2].astype(np.int32),
        _s2=arr[:, 3].astype(np.int32),
        _s3=arr[:, 4].astype(np.int32),
        _inf_cells=np.array(sorted(inf_cells), dtype=np.int32),
    )


def build_ffg(code: RmCode) -> FactorGraph:
    """Full factor graph: every element computes all four messages."""
    return _build(code, reduced=False)


def reduce_ffg(g: FactorGraph, code: RmCode) -> FactorGraph:
    """Constant-propagated graph; decoding output is unchanged.

    Frozen +inf and information-zero a-prioris are pushed through the
    rightward plane; computations with constant results are folded into
    the initial message memory and pass-throughs become copies.
    """
    if g.reduced:
        raise ValueError("graph is already reduced")
    if code is not g.code and code != g.code:
        raise ValueError("graph was built for a different code")
    return _build(code, reduced=True)


def count_ops(g: FactorGraph) -> OpCount:
    """Per-iteration operation tally for one full sweep pair.

    Each active message computation performs one box-plus and one
    addition (pure adds and pure box-plus ops count once apiece);
    constants and copies are free.
    """
    return OpCount.from_boxplus_adds(g.n_boxplus, g.n_additions)


def decode(g: FactorGraph, channel_llrs: np.ndarray,
           cfg: Optional[DecoderConfig] = None) -> DecodeResult:
    """Run iterative decoding and return hard decisions plus accounting."""
    if cfg is None:
        cfg = DecoderConfig()
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if llrs.shape != (g.N,):
        raise ValueError(f"expected {g.N} channel LLRs, got {llrs.shape}")

    # clip at attach: reduced-graph copy ops forward the raw channel
    # value, so out-of-range inputs must be clamped before the kernel
    # to keep full and reduced graphs bit-identical
    llr_rev = clip_llr(llrs)[::-1].copy()
    xg = np.empty(g.N, dtype=np.uint8)
    vb = np.empty(g.N, dtype=np.uint8)
    arith = (_kernels.ARITH_EXACT if cfg.arithmetic == "exact"
             else _kernels.ARITH_TABLE)
    fp = F_PLUS_TABLE.values
    iters, converged = _kernels.ffg_decode_frame(
        g._kinds, g._outs, g._s1, g._s2, g._s3, g._inf_cells, llr_rev,
        g.m, g.N, cfg.max_iters, cfg.stopping, arith,
        fp, 1.0 / F_PLUS_TABLE.step, F_PLUS_TABLE.max_input, xg, vb)

    x_hat = xg[::-1].copy()
    u_hat = vb[list(g.code.info_set)].copy()
    ops = count_ops(g).scaled(iters)
    if cfg.stopping:
        ops = ops + stopping_opcount(g.m, g.N).scaled(iters)
    return DecodeResult(
        x_hat=x_hat,
        u_hat=u_hat,
        iterations_used=iters,
        converged=bool(converged),
        op_count=ops,
    )
