import numpy as np
import pytest

from autbp.code import build_code, encode
from autbp.complexity import stopping_opcount
from autbp.ffg import (
    DecoderConfig,
    build_ffg,
    count_ops,
    decode,
    reduce_ffg,
)

CLASS_COUNTS_37 = {"const": 152, "copy": 116, "add": 190, "box": 190,
                   "full": 1144}


@pytest.fixture(scope="module")
def graphs37(rm37):
    full = build_ffg(rm37)
    return full, reduce_ffg(full, rm37)


def test_full_graph_op_counts(rm13, rm25, rm37, graphs37):
    # every processing element computes four composite messages
    for code, g in ((rm13, build_ffg(rm13)), (rm25, build_ffg(rm25)),
                    (rm37, graphs37[0])):
        pes = code.m * code.N // 2
        assert g.n_boxplus == 4 * pes
        assert g.n_additions == 4 * pes


def test_reduced_graph_op_counts(rm13, rm25, rm37, graphs37):
    assert reduce_ffg(build_ffg(rm13), rm13).n_boxplus == 29
    assert reduce_ffg(build_ffg(rm25), rm25).n_boxplus == 223
    full, red = graphs37
    assert (full.n_boxplus, red.n_boxplus) == (1792, 1334)
    assert red.n_additions == 1334
    assert red.class_counts == CLASS_COUNTS_37
    assert abs(red.n_boxplus / full.n_boxplus - 0.744) < 0.02


def test_trivial_code_reduces_to_pure_boxplus():
    # r = m keeps no frozen a-prioris: the L-side additions all vanish
    code = build_code(7, 7)
    red = reduce_ffg(build_ffg(code), code)
    assert red.n_boxplus == 448
    assert red.n_additions == 0


def test_weighted_per_iteration_cost(graphs37):
    _, red = graphs37
    assert count_ops(red).weighted_total() == 13340.0


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(max_iters=0)
    with pytest.raises(ValueError):
        DecoderConfig(arithmetic="float8")


def test_decode_noiseless_round_trip(rm37, graphs37, rng):
    _, red = graphs37
    for _ in range(10):
        u = rng.integers(0, 2, size=rm37.K).astype(np.uint8)
        x = encode(rm37, u)
        llr = (8.0 * (1.0 - 2.0 * x.astype(np.float64)))
        res = decode(red, llr, DecoderConfig())
        assert res.converged and res.iterations_used == 1
        assert np.array_equal(res.x_hat, x)
        assert np.array_equal(res.u_hat, u)


def test_decode_validates_length(graphs37):
    with pytest.raises(ValueError):
        decode(graphs37[1], np.zeros(64), DecoderConfig())


def test_decode_without_stopping_runs_full_budget(rm25, rng):
    red = reduce_ffg(build_ffg(rm25), rm25)
    llr = rng.normal(0.0, 2.0, size=rm25.N)
    res = decode(red, llr, DecoderConfig(max_iters=7, stopping=False))
    assert res.iterations_used == 7


def test_decode_clips_at_attach(rm25, rng):
    red = reduce_ffg(build_ffg(rm25), rm25)
    llr = rng.normal(0.0, 40.0, size=rm25.N)
    a = decode(red, llr, DecoderConfig())
    b = decode(red, np.clip(llr, -30.0, 30.0), DecoderConfig())
    assert np.array_equal(a.x_hat, b.x_hat)
    assert a.iterations_used == b.iterations_used


def test_op_accounting_scales_with_iterations(rm37, graphs37, rng):
    _, red = graphs37
    stop_w = stopping_opcount(rm37.m, rm37.N).weighted_total()
    llr = rng.normal(0.8, 1.0, size=rm37.N)
    for stopping in (True, False):
        cfg = DecoderConfig(max_iters=5, stopping=stopping)
        res = decode(red, llr, cfg)
        want = 13340.0 * res.iterations_used
        if stopping:
            want += stop_w * res.iterations_used
        assert res.op_count.weighted_total() == want


@pytest.mark.parametrize("r,m,trials", [(1, 3, 300), (2, 5, 300), (3, 7, 60)])
@pytest.mark.parametrize("arithmetic", ["table", "exact"])
def test_reduction_preserves_decisions(r, m, trials, arithmetic):
    # reduced and full graphs must agree bit for bit, iteration for
    # iteration; the acceptance suite reruns this at 1e4 vectors
    code = build_code(r, m)
    full = build_ffg(code)
    red = reduce_ffg(full, code)
    gen = np.random.default_rng(777 + r + m)
    cfg = DecoderConfig(max_iters=8, stopping=True, arithmetic=arithmetic)
    for _ in range(trials):
        llr = gen.uniform(-12.0, 12.0, size=code.N)
        a = decode(full, llr, cfg)
        b = decode(red, llr, cfg)
        assert np.array_equal(a.x_hat, b.x_hat)
        assert np.array_equal(a.u_hat, b.u_hat)
        assert a.iterations_used == b.iterations_used
        assert a.converged == b.converged
