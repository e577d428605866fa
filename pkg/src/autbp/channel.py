"""BPSK over AWGN with LLR output, plus the Monte-Carlo BLER harness.

The harness runs compiled batch kernels; every frame's randomness is
derived from (master_seed, snr_index, frame_index), so a sweep is
bit-reproducible at any thread count.  The stop rule is evaluated at
batch boundaries with a fixed batch size, which keeps the frame count
(and therefore the CSV) independent of scheduling.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .code import RmCode
from .complexity import ml_opcount, stopping_opcount
from .ffg import FactorGraph, build_ffg, count_ops, reduce_ffg
from .msgops import F_MINUS_TABLE, F_PLUS_TABLE, clip_llr
from . import _kernels as _k

__all__ = [
    "ChannelConfig",
    "SimStats",
    "DecoderSpec",
    "bpsk_modulate",
    "awgn",
    "to_llr",
    "wilson_interval",
    "run_bler",
    "write_csv",
    "write_report",
    "set_threads",
    "CSV_HEADER",
]

CSV_HEADER = ("snr_db", "frames", "block_errors", "bler",
              "ci_low", "ci_high", "avg_iters", "avg_weighted_ops")

DECODER_KINDS = ("aut-bp", "ffg-bp", "tanner-bp", "mbbp")


@dataclass(frozen=True)
class ChannelConfig:
    """SNR point; sigma2 = 1 / (2 * rate * 10^(ebn0_db/10)).

    es_mode reinterprets the dB figure as Es/N0 (rate dropped from the
    noise variance).
    """

    ebn0_db: float
    rate: float
    es_mode: bool = False

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    @property
    def sigma2(self) -> float:
        snr = 10.0 ** (self.ebn0_db / 10.0)
        r = 1.0 if self.es_mode else self.rate
        return 1.0 / (2.0 * r * snr)


@dataclass(frozen=True)
class SimStats:
    """One SNR point of a sweep, with a 95% Wilson interval."""

    snr_db: float
    frames: int
    block_errors: int
    bler: float
    ci_low: float
    ci_high: float
    avg_iters_per_decoder: float
    avg_weighted_ops: float

    def csv_row(self) -> tuple:
        return (self.snr_db, self.frames, self.block_errors, self.bler,
                self.ci_low, self.ci_high, self.avg_iters_per_decoder,
                self.avg_weighted_ops)


@dataclass(frozen=True)
class DecoderSpec:
    """Which decoder the harness runs and under what budget."""

    kind: str
    ensemble: int = 8
    perm_group: str = "ga"
    max_iters: int = 200
    stopping: bool = True
    arithmetic: str = "table"

    def __post_init__(self):
        if self.kind not in DECODER_KINDS:
            raise ValueError(f"unknown decoder {self.kind!r}")
        if self.perm_group not in ("ga", "pi", "id"):
            raise ValueError(f"unknown perm group {self.perm_group!r}")
        if self.ensemble < 1:
            raise ValueError("ensemble size must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.arithmetic not in ("exact", "table"):
            raise ValueError(f"unknown arithmetic {self.arithmetic!r}")


def bpsk_modulate(x) -> np.ndarray:
    """Bit 0 -> +1.0, bit 1 -> -1.0."""
    return 1.0 - 2.0 * np.asarray(x, dtype=np.float64)


def awgn(symbols, sigma2: float, rng) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise of variance sigma2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be > 0")
    s = np.asarray(symbols, dtype=np.float64)
    return s + rng.normal(0.0, math.sqrt(sigma2), size=s.shape)


def to_llr(y, sigma2: float) -> np.ndarray:
    """Channel LLRs 2y/sigma2, clipped to the message range."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be > 0")
    return clip_llr(2.0 * np.asarray(y, dtype=np.float64) / sigma2)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for k successes in n trials."""
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def set_threads(n: Optional[int]) -> int:
    """Set the kernel thread count, clamped to the numba maximum."""
    import numba

    if n is None:
        return numba.get_num_threads()
    t = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(t)
    return t


_GROUP_CODES = {"id": _k.GROUP_ID, "ga": _k.GROUP_GA, "pi": _k.GROUP_PI}


def _info_mask(code: RmCode) -> np.ndarray:
    mask = np.zeros(code.N, dtype=np.uint8)
    mask[np.asarray(code.info_set, dtype=np.int64)] = 1
    return mask


def _tanner_arrays(graphs):
    """Pad per-base CSR adjacency into rectangular kernel arrays."""
    from .tanner import _iter_opcount

    B = len(graphs)
    rmax = max(g.n_checks for g in graphs)
    emax = max(sum(g.cn_degrees) for g in graphs)
    eptr = np.zeros((B, rmax + 1), dtype=np.int64)
    evar = np.zeros((B, emax), dtype=np.int64)
    nrows = np.zeros(B, dtype=np.int64)
    w = np.zeros(B, dtype=np.float64)
    for b, g in enumerate(graphs):
        nrows[b] = g.n_checks
        pos = 0
        for r, cvars in enumerate(g.adjacency[0]):
            for v in cvars:
                evar[b, pos] = v
                pos += 1
            eptr[b, r + 1] = pos
        eptr[b, g.n_checks:] = pos
        w[b] = float(_iter_opcount(g).weighted_total())
    return eptr, evar, nrows, w


class _EnsembleRunner:
    """Factor-graph decoders (aut-bp and plain ffg-bp)."""

    def __init__(self, code: RmCode, spec: DecoderSpec,
                 graph: Optional[FactorGraph] = None):
        if graph is None:
            graph = reduce_ffg(build_ffg(code), code)
        self.graph = graph
        self.code = code
        self.spec = spec
        self.is_aut = spec.kind == "aut-bp"
        self.M = spec.ensemble if self.is_aut else 1
        self.group = _GROUP_CODES[spec.perm_group] if self.is_aut \
            else _k.GROUP_ID
        # aut-bp scores converged (codeword) branches only; the plain
        # single-graph decoder is judged on its raw output
        self.select = 1 if self.is_aut else 0
        self.info_mask = _info_mask(code)
        self.arith = _k.ARITH_EXACT if spec.arithmetic == "exact" \
            else _k.ARITH_TABLE
        self.iter_w = float(count_ops(graph).weighted_total())
        self.stop_w = float(stopping_opcount(code.m, code.N).weighted_total())
        self.ml_w = float(ml_opcount(self.M, code.N).weighted_total()) \
            if self.is_aut else 0.0

    def run(self, master, snr_idx, frame_start, nframes, sigma, all_zero):
        g = self.graph
        err = np.zeros(nframes, dtype=np.int64)
        its = np.zeros(nframes, dtype=np.int64)
        conv = np.zeros(nframes, dtype=np.int64)
        _k.sim_ensemble_batch(
            g._kinds, g._outs, g._s1, g._s2, g._s3, g._inf_cells,
            self.info_mask, self.code.m, self.code.N, self.code.K,
            self.M, self.group, self.select,
            self.spec.max_iters, self.spec.stopping, self.arith,
            F_PLUS_TABLE.values, 1.0 / F_PLUS_TABLE.step,
            F_PLUS_TABLE.max_input,
            np.uint64(master), snr_idx, frame_start, nframes,
            sigma, 1 if all_zero else 0, err, its, conv)
        tot_it = int(its.sum())
        wops = self.iter_w * tot_it
        if self.spec.stopping:
            wops += self.stop_w * tot_it
        wops += self.ml_w * nframes
        return int(err.sum()), tot_it, wops


class _TannerRunner:
    """Tanner-graph decoders (naive tanner-bp and the mbbp ensemble).

    Early stopping on the syndrome is inherent to both, so the spec's
    stopping flag does not apply here.  mbbp bases are fixed once per
    run from the master seed; its op accounting adds the selection cost
    for the full ensemble size every frame.
    """

    def __init__(self, code: RmCode, spec: DecoderSpec, graphs=None):
        from .tanner import (OVERCOMPLETE_FACTOR, build_tanner,
                             random_minweight_pcm)

        self.code = code
        self.spec = spec
        self.select = 1 if spec.kind == "mbbp" else 0
        # mbbp bases are drawn once the master seed is known
        self._user_graphs = graphs
        self._graphs = None
        self._arrays = None
        self._built_for = None
        self.info_mask = _info_mask(code)
        self.arith = _k.ARITH_EXACT if spec.arithmetic == "exact" \
            else _k.ARITH_TABLE
        self._build_tanner = build_tanner
        self._random_pcm = random_minweight_pcm
        self._oc = OVERCOMPLETE_FACTOR

    def _ensure(self, master):
        if self._built_for == master and self._graphs is not None:
            return
        if self._user_graphs is not None:
            self._graphs = list(self._user_graphs)
        elif self.spec.kind == "tanner-bp":
            self._graphs = [self._build_tanner(self.code.H)]
        else:
            rng = np.random.default_rng(master)
            nrows = self._oc * self.code.H.rows
            self._graphs = [
                self._build_tanner(self._random_pcm(self.code, rng, nrows))
                for _ in range(self.spec.ensemble)]
        self._arrays = _tanner_arrays(self._graphs)
        self._built_for = master

    def run(self, master, snr_idx, frame_start, nframes, sigma, all_zero):
        self._ensure(master)
        eptr, evar, nrows, w = self._arrays
        B = len(self._graphs)
        err = np.zeros(nframes, dtype=np.int64)
        its = np.zeros(nframes, dtype=np.int64)
        ops = np.zeros(nframes, dtype=np.float64)
        _k.sim_tanner_batch(
            eptr, evar, nrows, w, self.info_mask,
            self.code.m, self.code.N, self.code.K, B,
            self.spec.max_iters, self.select, self.arith,
            F_PLUS_TABLE.values, 1.0 / F_PLUS_TABLE.step,
            F_PLUS_TABLE.max_input,
            F_MINUS_TABLE.values, 1.0 / F_MINUS_TABLE.step,
            F_MINUS_TABLE.max_input,
            np.uint64(master), snr_idx, frame_start, nframes,
            sigma, 1 if all_zero else 0, err, its, ops)
        wops = float(ops.sum())
        if self.select:
            ml_w = float(ml_opcount(self.spec.ensemble,
                                    self.code.N).weighted_total())
            wops += ml_w * nframes
        return int(err.sum()), int(its.sum()), wops


def _make_runner(code: RmCode, spec: DecoderSpec):
    if spec.kind in ("aut-bp", "ffg-bp"):
        return _EnsembleRunner(code, spec)
    if code.H is None:
        raise ValueError("Tanner decoders need a nonempty dual (r < m)")
    return _TannerRunner(code, spec)


def run_bler(code: RmCode, spec: DecoderSpec, ebn0_list, *,
             min_errors: int = 100, max_frames: int = 10_000_000,
             master_seed: int = 0, all_zero: bool = False,
             es_mode: bool = False, batch_frames: int = 1024,
             threads: Optional[int] = None, log=None):
    """Sweep SNR points and return one SimStats per point.

    Stops each point at the first batch boundary where min_errors block
    errors have accumulated, or at max_frames.  batch_frames is part of
    the result definition (the stop rule quantizes to it); the default
    is fixed so identical configs yield identical frame counts.
    """
    if min_errors < 1:
        raise ValueError("min_errors must be >= 1")
    if max_frames < 1:
        raise ValueError("max_frames must be >= 1")
    if batch_frames < 1:
        raise ValueError("batch_frames must be >= 1")
    if threads is not None:
        set_threads(threads)
    ebn0_list = [float(s) for s in ebn0_list]
    runner = _make_runner(code, spec)
    n_dec = runner.M if isinstance(runner, _EnsembleRunner) else (
        spec.ensemble if spec.kind == "mbbp" else 1)
    rate = code.K / code.N
    out = []
    for snr_idx, ebn0 in enumerate(ebn0_list):
        sigma2 = ChannelConfig(ebn0, rate, es_mode).sigma2
        sigma = math.sqrt(sigma2)
        frames = 0
        errors = 0
        tot_iters = 0
        tot_wops = 0.0
        while frames < max_frames and errors < min_errors:
            n = min(batch_frames, max_frames - frames)
            e, it, w = runner.run(master_seed, snr_idx, frames, n,
                                  sigma, all_zero)
            frames += n
            errors += e
            tot_iters += it
            tot_wops += w
            if log is not None and frames % (batch_frames * 64) == 0:
                print(f"[sim] snr={ebn0:g} frames={frames} errors={errors}",
                      file=log, flush=True)
        lo, hi = wilson_interval(errors, frames)
        out.append(SimStats(
            snr_db=ebn0, frames=frames, block_errors=errors,
            bler=errors / frames, ci_low=lo, ci_high=hi,
            avg_iters_per_decoder=tot_iters / (frames * n_dec),
            avg_weighted_ops=tot_wops / frames))
        if log is not None:
            s = out[-1]
            print(f"[sim] done snr={ebn0:g} frames={s.frames} "
                  f"errors={s.block_errors} bler={s.bler:.3e} "
                  f"iters={s.avg_iters_per_decoder:.3f}", file=log,
                  flush=True)
    return out


def write_csv(stats, path):
    """Delimited sweep results; floats use shortest round-trip form."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for s in stats:
            w.writerow([repr(float(v)) if isinstance(v, float) else v
                        for v in s.csv_row()])


def write_report(stats, path, manifest_path=None):
    """JSON-shaped equivalent of the CSV, referencing its manifest."""
    doc = {
        "manifest": str(manifest_path) if manifest_path else None,
        "results": [asdict(s) for s in stats],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
