"""Ensemble decoding with code automorphisms.

Each constituent decoder sees a permuted copy of the received LLRs,
runs the factor-graph decoder, and contributes its hard output after
undoing the permutation.  The final output is the candidate with the
highest correlation to the received vector (ML-in-the-list) among the
branches that converged; a converged branch's output is a codeword by
the stopping test.  Non-converged outputs stay out of the selection:
the bitwise hard decision of y beats every codeword on correlation, so
one raw non-codeword in the list would mask every correct candidate.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .automorphism import (
    identity_aut,
    sample_ga,
    sample_stage_shuffle,
    to_permutation,
)
from .code import RmCode
from .complexity import ml_opcount, stopping_opcount, OpCount
from .ffg import DecoderConfig, FactorGraph, build_ffg, count_ops, decode, reduce_ffg

__all__ = ["EnsembleConfig", "EnsembleResult", "ml_in_the_list", "aut_decode"]

PERM_GROUPS = ("ga", "pi", "id")


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble size, permutation group, and constituent decoder setup."""

    M: int = 8
    perm_group: str = "ga"
    decoder_cfg: DecoderConfig = field(default_factory=DecoderConfig)

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("ensemble size M must be >= 1")
        if self.perm_group not in PERM_GROUPS:
            raise ValueError(f"perm_group must be one of {PERM_GROUPS}")


@dataclass
class EnsembleResult:
    x_hat: np.ndarray
    chosen_index: int
    candidates: np.ndarray
    per_decoder_iters: list
    total_op_count: OpCount


def ml_in_the_list(candidates, y):
    """Pick the candidate maximizing correlation with the received vector.

    Candidates are bit vectors; bit 0 maps to +1 and bit 1 to -1 before
    correlating.  Ties go to the lowest index.  Equivalent to minimizing
    squared Euclidean distance, since all BPSK words share one energy.
    """
    cands = np.asarray(candidates)
    if cands.ndim == 1:
        cands = cands[None, :]
    if cands.shape[0] == 0:
        raise ValueError("empty candidate list")
    y = np.asarray(y, dtype=np.float64)
    if cands.shape[1] != y.shape[0]:
        raise ValueError("candidate / received length mismatch")
    corrs = (1.0 - 2.0 * cands.astype(np.float64)) @ y
    idx = int(np.argmax(corrs))  # argmax returns the first maximum
    return idx, cands[idx]


def _sample_perms(code: RmCode, cfg: EnsembleConfig, rng):
    perms = []
    for _ in range(cfg.M):
        if cfg.perm_group == "ga":
            aut = sample_ga(code.m, rng)
        elif cfg.perm_group == "pi":
            aut = sample_stage_shuffle(code.m, rng)
        else:
            aut = identity_aut(code.m)
        perms.append(to_permutation(aut))
    return perms


def aut_decode(code: RmCode, y, cfg: EnsembleConfig, rng,
               graph: Optional[FactorGraph] = None,
               sigma2: Optional[float] = None) -> EnsembleResult:
    """Permute, decode with M constituents, de-permute, select.

    y is the received real vector; LLRs are derived as 2y/sigma2 (unit
    sigma2 when not given, which only rescales and leaves every
    decision rule unchanged except for the clipping point).  Only
    branches that converged to a codeword enter the correlation pick; a
    raw non-codeword output sits closer to y than any codeword and
    would win unfairly.  When no branch converges the first branch's
    raw output is returned (chosen_index -1).
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.N,):
        raise ValueError(f"expected received vector of length {code.N}")
    if graph is None:
        graph = reduce_ffg(build_ffg(code), code)
    from .channel import to_llr

    llr = to_llr(y, 1.0 if sigma2 is None else sigma2)
    perms = _sample_perms(code, cfg, rng)

    candidates = np.empty((cfg.M, code.N), dtype=np.uint8)
    converged = np.zeros(cfg.M, dtype=bool)
    iters = []
    total = OpCount()
    for j, perm in enumerate(perms):
        res = decode(graph, llr[perm.map], cfg.decoder_cfg)
        candidates[j, perm.map] = res.x_hat
        converged[j] = res.converged
        iters.append(res.iterations_used)
        total = total + res.op_count
    total = total + ml_opcount(cfg.M, code.N)
    if converged.any():
        sub, best = ml_in_the_list(candidates[converged], y)
        idx = int(np.flatnonzero(converged)[sub])
    else:
        idx, best = -1, candidates[0]
    return EnsembleResult(
        x_hat=best.copy(),
        chosen_index=idx,
        candidates=candidates,
        per_decoder_iters=iters,
        total_op_count=total,
    )
