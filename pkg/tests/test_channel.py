import csv
import json

import numpy as np
import pytest

from autbp.channel import (
    CSV_HEADER,
    ChannelConfig,
    DecoderSpec,
    SimStats,
    awgn,
    bpsk_modulate,
    run_bler,
    to_llr,
    wilson_interval,
    write_csv,
    write_report,
)


def test_sigma2_formula():
    cfg = ChannelConfig(3.65, 0.5)
    assert cfg.sigma2 == pytest.approx(0.43152, abs=1e-5)
    assert ChannelConfig(0.0, 0.5).sigma2 == 1.0
    # Es/N0 mode drops the rate factor
    assert ChannelConfig(3.0, 0.5, es_mode=True).sigma2 == pytest.approx(
        ChannelConfig(3.0, 1.0).sigma2)


def test_channel_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 0.0)
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 1.5)


def test_bpsk_modulate():
    assert np.array_equal(bpsk_modulate([0, 1, 1, 0]), [1.0, -1.0, -1.0, 1.0])


def test_awgn_statistics(rng):
    y = awgn(np.ones(200_000), 0.25, rng)
    noise = y - 1.0
    assert abs(noise.mean()) < 4 * 0.5 / np.sqrt(200_000)
    assert abs(noise.var() - 0.25) / 0.25 < 0.01
    with pytest.raises(ValueError):
        awgn(np.ones(4), 0.0, rng)


def test_to_llr_scaling_and_clip():
    y = np.array([0.5, -0.5, 20.0])
    assert np.array_equal(to_llr(y, 0.5), [2.0, -2.0, 30.0])


def test_wilson_interval_properties():
    # algebraically 0 at k=0 but computed in floating point
    lo, hi = wilson_interval(0, 1000)
    assert 0.0 <= lo < 1e-12 and 0.0 < hi < 0.01
    lo, hi = wilson_interval(1000, 1000)
    assert hi > 1.0 - 1e-12 and lo > 0.99
    lo, hi = wilson_interval(10, 1000)
    assert lo < 0.01 < hi
    # interval shrinks with more data at fixed rate
    lo1, hi1 = wilson_interval(10, 1000)
    lo2, hi2 = wilson_interval(100, 10000)
    assert hi2 - lo2 < hi1 - lo1


def test_decoder_spec_validation():
    with pytest.raises(ValueError):
        DecoderSpec(kind="viterbi")
    with pytest.raises(ValueError):
        DecoderSpec(kind="aut-bp", perm_group="all")
    with pytest.raises(ValueError):
        DecoderSpec(kind="aut-bp", ensemble=0)
    with pytest.raises(ValueError):
        DecoderSpec(kind="aut-bp", max_iters=0)
    with pytest.raises(ValueError):
        DecoderSpec(kind="aut-bp", arithmetic="int4")


def test_run_bler_clean_channel(rm25):
    spec = DecoderSpec(kind="ffg-bp")
    stats = run_bler(rm25, spec, [12.0], min_errors=100, max_frames=2048,
                     master_seed=7)
    (s,) = stats
    assert s.block_errors == 0 and s.bler == 0.0
    assert s.frames == 2048
    assert s.ci_low == 0.0 and s.ci_high > 0.0
    assert s.avg_iters_per_decoder >= 1.0


def test_run_bler_deterministic(rm25):
    spec = DecoderSpec(kind="aut-bp", ensemble=4)
    a = run_bler(rm25, spec, [2.0], min_errors=50, max_frames=4096,
                 master_seed=3)
    b = run_bler(rm25, spec, [2.0], min_errors=50, max_frames=4096,
                 master_seed=3)
    assert a == b
    c = run_bler(rm25, spec, [2.0], min_errors=50, max_frames=4096,
                 master_seed=4)
    assert a != c


def test_run_bler_stops_at_batch_boundary(rm25):
    spec = DecoderSpec(kind="ffg-bp")
    (s,) = run_bler(rm25, spec, [1.0], min_errors=1, max_frames=10_000,
                    master_seed=1, batch_frames=512)
    assert s.frames % 512 == 0
    assert s.block_errors >= 1


def test_run_bler_all_zero_matches_random_codewords(rm25):
    # linear code + symmetric channel: the all-zero shortcut must agree
    # within Monte-Carlo noise
    spec = DecoderSpec(kind="ffg-bp")
    kw = dict(min_errors=10**9, max_frames=16384, master_seed=11)
    (a,) = run_bler(rm25, spec, [2.0], all_zero=True, **kw)
    (b,) = run_bler(rm25, spec, [2.0], all_zero=False, **kw)
    assert a.frames == b.frames == 16384
    ka, kb = a.block_errors, b.block_errors
    assert ka > 50 and kb > 50
    sd = np.sqrt(ka + kb)
    assert abs(ka - kb) < 5 * sd


def test_run_bler_validation(rm25):
    spec = DecoderSpec(kind="ffg-bp")
    with pytest.raises(ValueError):
        run_bler(rm25, spec, [1.0], min_errors=0)
    with pytest.raises(ValueError):
        run_bler(rm25, spec, [1.0], max_frames=0)


def test_csv_round_trip(tmp_path):
    stats = [SimStats(3.0, 1024, 17, 17 / 1024, 0.01, 0.026, 4.25, 123.5),
             SimStats(3.5, 2048, 5, 5 / 2048, 0.001, 0.006, 3.5, 99.0)]
    path = tmp_path / "out.csv"
    write_csv(stats, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(CSV_HEADER)
    assert len(rows) == 3
    assert float(rows[1][3]) == stats[0].bler
    assert int(rows[2][1]) == 2048
    # shortest round-trip float text survives exactly
    assert rows[1][3] == repr(17 / 1024)


def test_report_json(tmp_path):
    stats = [SimStats(3.0, 10, 1, 0.1, 0.01, 0.4, 2.0, 50.0)]
    path = tmp_path / "out.json"
    write_report(stats, path, manifest_path="out.manifest.json")
    doc = json.loads(path.read_text())
    assert doc["manifest"] == "out.manifest.json"
    assert doc["results"][0]["snr_db"] == 3.0
    assert doc["results"][0]["block_errors"] == 1
