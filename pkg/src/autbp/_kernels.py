"""Compiled inner loops for the factor-graph decoder and the Monte-Carlo
harness.

A factor graph is executed as a flat table of message operations in
sweep order (R stages ascending, then L stages descending).  Operation
kinds cover the reduced-graph forms; the full graph uses only the two
compound kinds with constant cells materialized in message memory.
Frozen a-prioris are exact +inf: box-plus passes the other operand
through unchanged and clipping leaves infinities alone, which keeps
reduced and full graphs bit-identical.
"""

import numpy as np
from numba import njit, prange

L_MAX = 30.0

OP_BOX_OF_ADD = 0   # out = clip(box(s1, s2 + s3))
OP_ADD_OF_BOX = 1   # out = clip(box(s1, s2) + s3)
OP_ADD = 2          # out = clip(s1 + s2)
OP_BOX = 3          # out = clip(box(s1, s2))
OP_COPY = 4         # out = s1

ARITH_EXACT = 0
ARITH_TABLE = 1


@njit(inline="always")
def _clip(x):
    if x > L_MAX:
        return x if x == np.inf else L_MAX
    if x < -L_MAX:
        return x if x == -np.inf else -L_MAX
    return x


@njit(inline="always")
def _box(a, b, arith, fp, inv_step, max_in):
    if a == np.inf:
        return b
    if a == -np.inf:
        return -b
    if b == np.inf:
        return a
    if b == -np.inf:
        return -a
    s = abs(a + b)
    d = abs(a - b)
    if arith == ARITH_EXACT:
        cs = np.log1p(np.exp(-s))
        cd = np.log1p(np.exp(-d))
    else:
        cs = 0.0 if s >= max_in else fp[int(s * inv_step + 0.5)]
        cd = 0.0 if d >= max_in else fp[int(d * inv_step + 0.5)]
    mn = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        mn = -mn
    # associate as (min + f(s)) - f(d), matching the vectorized reference
    return (mn + cs) - cd


@njit(inline="always")
def _run_ops(mem, kinds, outs, s1, s2, s3, arith, fp, inv_step, max_in):
    for k in range(kinds.shape[0]):
        kind = kinds[k]
        if kind == OP_BOX_OF_ADD:
            v = _box(mem[s1[k]], mem[s2[k]] + mem[s3[k]],
                     arith, fp, inv_step, max_in)
        elif kind == OP_ADD_OF_BOX:
            v = _box(mem[s1[k]], mem[s2[k]],
                     arith, fp, inv_step, max_in) + mem[s3[k]]
        elif kind == OP_ADD:
            v = mem[s1[k]] + mem[s2[k]]
        elif kind == OP_BOX:
            v = _box(mem[s1[k]], mem[s2[k]], arith, fp, inv_step, max_in)
        else:
            mem[outs[k]] = mem[s1[k]]
            continue
        mem[outs[k]] = _clip(v)


@njit(inline="always")
def _graph_butterfly(vb, m, N):
    half = 1
    for _ in range(m):
        for p in range(N):
            if p & half == 0:
                vb[p] ^= vb[p + half]
        half <<= 1


@njit(cache=True)
def ffg_decode_frame(kinds, outs, s1, s2, s3, inf_cells, llr_rev, m, N,
                     max_iters, stopping, arith, fp, inv_step, max_in,
                     xg, vb):
    """Decode one frame; returns (iterations_used, converged).

    llr_rev is the channel LLR vector already in graph index order.  On
    return xg holds the right-boundary hard decision (graph order) and
    vb the left-boundary hard decision.
    """
    nmem = 2 * (m + 1) * N
    mem = np.zeros(nmem, dtype=np.float64)
    for k in range(inf_cells.shape[0]):
        mem[inf_cells[k]] = np.inf
    lm = (m + 1) * N + m * N
    for i in range(N):
        mem[lm + i] = llr_rev[i]

    loff = (m + 1) * N
    rm = m * N
    iters = 0
    converged = False
    for it in range(1, max_iters + 1):
        iters = it
        _run_ops(mem, kinds, outs, s1, s2, s3, arith, fp, inv_step, max_in)
        if stopping or it == max_iters:
            for i in range(N):
                vb[i] = 1 if mem[i] + mem[loff + i] < 0.0 else 0
                xg[i] = 1 if mem[rm + i] + mem[loff + rm + i] < 0.0 else 0
            _graph_butterfly(vb, m, N)
            ok = True
            for i in range(N):
                if vb[i] != xg[i]:
                    ok = False
                    break
            # restore vb to the pre-encode hard decision for u extraction
            _graph_butterfly(vb, m, N)
            if ok:
                converged = True
                if stopping:
                    break
    return iters, converged


# ---------------------------------------------------------------------------
# Monte-Carlo batch harness.
#
# Every frame derives its randomness from (master_seed, snr_index,
# frame_index) through a splitmix64 chain, so results are bit-identical
# at any thread count and any batch split.  Per-frame draw order is
# fixed: message words, then N/2 Box-Muller pairs, then the per-decoder
# permutation draws.  Message words are drawn even in all-zero mode so
# both modes see the same noise.

U64_GOLD = np.uint64(0x9E3779B97F4A7C15)
U64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
U64_MIX2 = np.uint64(0x94D049BB133111EB)
U64_ONE = np.uint64(1)
U64_ZERO = np.uint64(0)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_S16 = np.uint64(16)
_S8 = np.uint64(8)
_S4 = np.uint64(4)
_S2 = np.uint64(2)
_S1 = np.uint64(1)
_S11 = np.uint64(11)
_INV53 = 2.0 ** -53
_TWO_PI = 2.0 * np.pi
F_MINUS_EPS = 2.0 ** -10


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * U64_MIX1
    z = (z ^ (z >> _S27)) * U64_MIX2
    return z ^ (z >> _S31)


@njit(inline="always")
def _sm_next(s):
    s = s + U64_GOLD
    return s, _mix64(s)


@njit(inline="always")
def _parity64(v):
    v ^= v >> _S32
    v ^= v >> _S16
    v ^= v >> _S8
    v ^= v >> _S4
    v ^= v >> _S2
    v ^= v >> _S1
    return v & U64_ONE


@njit(inline="always")
def _frame_state(master, snr_idx, frame_idx):
    s = _mix64(master + U64_GOLD * np.uint64(snr_idx + 1))
    return _mix64(s + U64_GOLD * np.uint64(frame_idx + 1))


@njit(inline="always")
def _channel_frame(state, info_mask, m, N, K, sigma, all_zero,
                   xcode, y, llr):
    """Draw a frame: message, encode, BPSK, AWGN, clipped LLRs.

    xcode/y/llr are filled in code bit order.  Encoding scatters the
    message into the info positions in ascending graph index, runs the
    butterfly, and reverses, matching the block-code encoder.
    """
    ug = np.zeros(N, dtype=np.uint8)
    word = U64_ZERO
    bit = 64
    for i in range(N):
        if info_mask[i] == 1:
            if bit == 64:
                state, word = _sm_next(state)
                bit = 0
            b = np.uint8((word >> np.uint64(bit)) & U64_ONE)
            bit += 1
            if all_zero == 0:
                ug[i] = b
    _graph_butterfly(ug, m, N)
    for g in range(N):
        xcode[g] = ug[N - 1 - g]

    sigma2 = sigma * sigma
    for p in range(N // 2):
        state, aw = _sm_next(state)
        state, bw = _sm_next(state)
        u1 = (np.float64(aw >> _S11) + 1.0) * _INV53
        u2 = np.float64(bw >> _S11) * _INV53
        rad = np.sqrt(-2.0 * np.log(u1))
        ang = _TWO_PI * u2
        g0 = 2 * p
        g1 = g0 + 1
        y[g0] = (1.0 - 2.0 * xcode[g0]) + sigma * (rad * np.cos(ang))
        y[g1] = (1.0 - 2.0 * xcode[g1]) + sigma * (rad * np.sin(ang))
    for g in range(N):
        v = 2.0 * y[g] / sigma2
        if v > L_MAX:
            v = L_MAX
        elif v < -L_MAX:
            v = -L_MAX
        llr[g] = v
    return state


@njit(inline="always")
def _ga_perm(state, m, N, perm, rows, piv):
    """Uniform GA(m) bit-index permutation: z -> Az + b, A non-singular.

    Rejection over uniform m x m bit matrices; pi(i) bit t is
    parity(row_t & i) xor b_t, matching the affine-map convention of the
    automorphism module.
    """
    mask = (U64_ONE << np.uint64(m)) - U64_ONE
    while True:
        for t in range(m):
            state, w = _sm_next(state)
            rows[t] = w & mask
        for t in range(m):
            piv[t] = U64_ZERO
        cnt = 0
        for t in range(m):
            v = rows[t]
            b = m - 1
            while b >= 0:
                if ((v >> np.uint64(b)) & U64_ONE) != U64_ZERO:
                    if piv[b] != U64_ZERO:
                        v ^= piv[b]
                    else:
                        piv[b] = v
                        cnt += 1
                        break
                b -= 1
        if cnt == m:
            break
    state, bw = _sm_next(state)
    bword = bw & mask
    for i in range(N):
        acc = U64_ZERO
        for t in range(m):
            if _parity64(rows[t] & np.uint64(i)) != U64_ZERO:
                acc |= U64_ONE << np.uint64(t)
        perm[i] = np.int64(acc ^ bword)
    return state


@njit(inline="always")
def _pi_perm(state, m, N, perm, order):
    """Uniform stage-shuffle permutation: A a permutation matrix, b = 0.

    Fisher-Yates over the m index bits; the modulo draw has bias below
    2^-57, negligible against Monte-Carlo noise.
    """
    for t in range(m):
        order[t] = t
    for t in range(m - 1, 0, -1):
        state, w = _sm_next(state)
        j = np.int64(w % np.uint64(t + 1))
        tmp = order[t]
        order[t] = order[j]
        order[j] = tmp
    for i in range(N):
        acc = 0
        for t in range(m):
            if (i >> order[t]) & 1:
                acc |= 1 << t
        perm[i] = acc
    return state


GROUP_ID = 0
GROUP_GA = 1
GROUP_PI = 2


@njit(parallel=True, cache=True)
def sim_ensemble_batch(kinds, outs, s1, s2, s3, inf_cells, info_mask,
                       m, N, K, M, group, select,
                       max_iters, stopping, arith, fp, inv_step, max_in,
                       master, snr_idx, frame_start, nframes,
                       sigma, all_zero, err_out, iters_out, conv_out):
    """Simulate frames of the factor-graph ensemble decoder.

    select picks the list rule for the correlation stage: 0 scores every
    branch on its raw output (plain single-graph decoding with M=1);
    1 scores only branches that converged to a codeword and falls back
    to branch 0's raw output when none did (a raw non-codeword would
    dominate the correlation unfairly); 2 re-encodes non-converged
    branch outputs from their info bits so every branch competes with a
    codeword.  Per frame: err_out gets 0/1, iters_out the summed
    constituent iterations, conv_out the number of converged branches.
    """
    for f in prange(nframes):
        state = _frame_state(master, snr_idx, frame_start + f)
        xcode = np.empty(N, dtype=np.uint8)
        y = np.empty(N, dtype=np.float64)
        llr = np.empty(N, dtype=np.float64)
        state = _channel_frame(state, info_mask, m, N, K, sigma, all_zero,
                               xcode, y, llr)

        perm = np.empty(N, dtype=np.int64)
        ga_rows = np.empty(m, dtype=np.uint64)
        ga_piv = np.empty(m, dtype=np.uint64)
        pi_order = np.empty(m, dtype=np.int64)
        llr_rev = np.empty(N, dtype=np.float64)
        xg = np.empty(N, dtype=np.uint8)
        vb = np.empty(N, dtype=np.uint8)
        tmp = np.empty(N, dtype=np.uint8)
        cand = np.empty(N, dtype=np.uint8)
        best_cand = np.empty(N, dtype=np.uint8)
        fallback = np.empty(N, dtype=np.uint8)
        best = -np.inf
        tot_it = 0
        nconv = 0
        for j in range(M):
            if group == GROUP_GA:
                state = _ga_perm(state, m, N, perm, ga_rows, ga_piv)
            elif group == GROUP_PI:
                state = _pi_perm(state, m, N, perm, pi_order)
            else:
                for i in range(N):
                    perm[i] = i
            for g in range(N):
                llr_rev[g] = llr[perm[N - 1 - g]]
            it, conv = ffg_decode_frame(kinds, outs, s1, s2, s3, inf_cells,
                                        llr_rev, m, N, max_iters, stopping,
                                        arith, fp, inv_step, max_in, xg, vb)
            tot_it += it
            if conv:
                nconv += 1
            if conv or select != 2:
                for t in range(N):
                    cand[perm[t]] = xg[N - 1 - t]
            else:
                for i in range(N):
                    tmp[i] = vb[i] if info_mask[i] == 1 else 0
                _graph_butterfly(tmp, m, N)
                for t in range(N):
                    cand[perm[t]] = tmp[N - 1 - t]
            if j == 0:
                for g in range(N):
                    fallback[g] = cand[g]
            if select == 1 and not conv:
                continue
            corr = 0.0
            for g in range(N):
                corr += y[g] if cand[g] == 0 else -y[g]
            if corr > best:
                best = corr
                for g in range(N):
                    best_cand[g] = cand[g]
        if best == -np.inf:
            for g in range(N):
                best_cand[g] = fallback[g]
        err = 0
        for g in range(N):
            if best_cand[g] != xcode[g]:
                err = 1
                break
        err_out[f] = err
        iters_out[f] = tot_it
        conv_out[f] = nconv


@njit(inline="always")
def _boxminus_s(L1, L2, arith, fm, inv_step, max_in):
    if L2 == np.inf:
        return L1
    if L2 == -np.inf:
        return -L1
    s = abs(L1 + L2)
    d = abs(L1 - L2)
    if arith == ARITH_EXACT:
        cs = np.log(-np.expm1(-(s if s > F_MINUS_EPS else F_MINUS_EPS)))
        cd = np.log(-np.expm1(-(d if d > F_MINUS_EPS else F_MINUS_EPS)))
    else:
        cs = 0.0 if s >= max_in else fm[int(s * inv_step + 0.5)]
        cd = 0.0 if d >= max_in else fm[int(d * inv_step + 0.5)]
    sgn = -1.0 if L2 < 0.0 else 1.0
    return (sgn * L1 + cs) - cd


@njit(inline="always")
def _syndrome_ok(eptr, evar, b, R, xhat):
    for r in range(R):
        acc = 0
        for e in range(eptr[b, r], eptr[b, r + 1]):
            acc ^= xhat[evar[b, e]]
        if acc == 1:
            return False
    return True


@njit(parallel=True, cache=True)
def sim_tanner_batch(eptr, evar, nrows, periter_w, info_mask,
                     m, N, K, B, iters_max, select,
                     arith, fp, fp_inv_step, fp_max_in,
                     fm, fm_inv_step, fm_max_in,
                     master, snr_idx, frame_start, nframes,
                     sigma, all_zero, err_out, iters_out, ops_out):
    """Simulate frames of flooding Tanner BP over B parity-check bases.

    Mirrors the vector decoder: syndrome pre-check on the channel hard
    decision, total-then-box-minus check update, belief accumulation in
    edge order.  select=1 applies ML-in-the-list over converged bases
    with base 0 as fallback (the multiple-bases ensemble); select=0
    reports base 0's raw output (plain BP, B must be 1).  ops_out gets
    the summed periter_w[b] * iterations, iters_out the summed
    iterations.
    """
    Emax = evar.shape[1]
    for f in prange(nframes):
        state = _frame_state(master, snr_idx, frame_start + f)
        xcode = np.empty(N, dtype=np.uint8)
        y = np.empty(N, dtype=np.float64)
        llr = np.empty(N, dtype=np.float64)
        state = _channel_frame(state, info_mask, m, N, K, sigma, all_zero,
                               xcode, y, llr)

        v2c = np.empty(Emax, dtype=np.float64)
        c2v = np.empty(Emax, dtype=np.float64)
        beliefs = np.empty(N, dtype=np.float64)
        xhat = np.empty(N, dtype=np.uint8)
        cand0 = np.empty(N, dtype=np.uint8)
        best_cand = np.empty(N, dtype=np.uint8)
        best = -np.inf
        any_conv = 0
        tot_it = 0
        wops = 0.0
        for b in range(B):
            R = nrows[b]
            for v in range(N):
                xhat[v] = 1 if llr[v] < 0.0 else 0
            conv = _syndrome_ok(eptr, evar, b, R, xhat)
            it = 0
            if not conv:
                ne = eptr[b, R]
                for e in range(ne):
                    v2c[e] = llr[evar[b, e]]
                for step in range(1, iters_max + 1):
                    it = step
                    for r in range(R):
                        lo = eptr[b, r]
                        hi = eptr[b, r + 1]
                        total = v2c[lo]
                        for e in range(lo + 1, hi):
                            total = _box(total, v2c[e], arith, fp,
                                         fp_inv_step, fp_max_in)
                        for e in range(lo, hi):
                            w = _boxminus_s(total, v2c[e], arith, fm,
                                            fm_inv_step, fm_max_in)
                            if w > L_MAX:
                                w = L_MAX
                            elif w < -L_MAX:
                                w = -L_MAX
                            c2v[e] = w
                    # sums start at zero and llr is added last, matching
                    # the vector decoder's float association
                    for v in range(N):
                        beliefs[v] = 0.0
                    for e in range(ne):
                        beliefs[evar[b, e]] += c2v[e]
                    for v in range(N):
                        beliefs[v] = llr[v] + beliefs[v]
                    for e in range(ne):
                        w = beliefs[evar[b, e]] - c2v[e]
                        if w > L_MAX:
                            w = L_MAX
                        elif w < -L_MAX:
                            w = -L_MAX
                        v2c[e] = w
                    for v in range(N):
                        xhat[v] = 1 if beliefs[v] < 0.0 else 0
                    if _syndrome_ok(eptr, evar, b, R, xhat):
                        conv = True
                        break
            tot_it += it
            wops += periter_w[b] * it
            if b == 0:
                for v in range(N):
                    cand0[v] = xhat[v]
            if select == 1:
                if conv:
                    any_conv = 1
                    corr = 0.0
                    for g in range(N):
                        corr += y[g] if xhat[g] == 0 else -y[g]
                    if corr > best:
                        best = corr
                        for g in range(N):
                            best_cand[g] = xhat[g]
            else:
                for g in range(N):
                    best_cand[g] = xhat[g]
        if select == 1 and any_conv == 0:
            for g in range(N):
                best_cand[g] = cand0[g]
        err = 0
        for g in range(N):
            if best_cand[g] != xcode[g]:
                err = 1
                break
        err_out[f] = err
        iters_out[f] = tot_it
        ops_out[f] = wops
