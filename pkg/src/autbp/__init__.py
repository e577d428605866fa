"""Ensemble belief-propagation decoding of Reed-Muller codes.

Factor-graph BP with automorphism ensembles and ML-in-the-list
selection, Tanner-graph baselines, an operation-level cost model, and a
reproducible Monte-Carlo BLER harness.
"""

from .automorphism import (AffineAutomorphism, Permutation, apply_perm,
                           compose, identity_aut, invert_aut, sample_ga,
                           sample_stage_shuffle, to_permutation)
from .channel import (ChannelConfig, DecoderSpec, SimStats, awgn,
                      bpsk_modulate, run_bler, set_threads, to_llr,
                      wilson_interval, write_csv, write_report)
from .code import RmCode, build_code, encode
from .complexity import (CostWeights, OpCount, analytic_reference_bars,
                         boxplus_cost, cn_cost, cn_opcount, ml_cost,
                         ml_opcount, stopping_cost, stopping_opcount,
                         vn_cost, vn_opcount)
from .ensemble import EnsembleConfig, EnsembleResult, aut_decode, \
    ml_in_the_list
from .ffg import (DecodeResult, DecoderConfig, FactorGraph, build_ffg,
                  count_ops, decode, reduce_ffg)
from .msgops import (F_MINUS_TABLE, F_PLUS_TABLE, L_MAX, boxminus, boxplus,
                     clip_llr, cn_update, f_minus, f_plus, f_minus_exact,
                     f_plus_exact)
from .tanner import (TannerGraph, bp_decode, build_tanner, mbbp_decode,
                     random_minweight_pcm, random_pcm)

try:
    from importlib.metadata import version as _pkg_version

    __version__ = _pkg_version("autbp")
except Exception:  # pragma: no cover
    __version__ = "0.1.0"

__all__ = [
    "AffineAutomorphism", "Permutation", "apply_perm", "compose",
    "identity_aut", "invert_aut", "sample_ga", "sample_stage_shuffle",
    "to_permutation",
    "ChannelConfig", "DecoderSpec", "SimStats", "awgn", "bpsk_modulate",
    "run_bler", "set_threads", "to_llr", "wilson_interval", "write_csv",
    "write_report",
    "RmCode", "build_code", "encode",
    "CostWeights", "OpCount", "analytic_reference_bars", "boxplus_cost",
    "cn_cost", "cn_opcount", "ml_cost", "ml_opcount", "stopping_cost",
    "stopping_opcount", "vn_cost", "vn_opcount",
    "EnsembleConfig", "EnsembleResult", "aut_decode", "ml_in_the_list",
    "DecodeResult", "DecoderConfig", "FactorGraph", "build_ffg",
    "count_ops", "decode", "reduce_ffg",
    "F_MINUS_TABLE", "F_PLUS_TABLE", "L_MAX", "boxminus", "boxplus",
    "clip_llr", "cn_update", "f_minus", "f_plus", "f_minus_exact",
    "f_plus_exact",
    "TannerGraph", "bp_decode", "build_tanner", "mbbp_decode",
    "random_minweight_pcm", "random_pcm",
    "__version__",
]
