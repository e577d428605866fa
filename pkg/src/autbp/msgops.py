"""Scalar LLR arithmetic: box-plus, box-minus, and their correction terms.

Exact mode evaluates the closed-form logs and is the oracle for table
mode, which replaces f+ and f- by short lookup tables (nearest-sample,
zero beyond the table range).

Saturated a-priori beliefs are represented as exact +inf so that
box-plus degenerates to a bit-exact pass-through; clip_llr never turns
an infinity into a finite value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "L_MAX",
    "F_MINUS_EPS",
    "CorrectionTable",
    "make_f_plus_table",
    "make_f_minus_table",
    "f_plus_exact",
    "f_minus_exact",
    "f_plus",
    "f_minus",
    "boxplus",
    "boxminus",
    "cn_update",
    "clip_llr",
]

L_MAX = 30.0           # clip bound for finite messages
F_MINUS_EPS = 2.0 ** -10   # clamp point for the f- singularity at 0
TABLE_STEP = 1.0 / 16
TABLE_MAX = 8.0


def f_plus_exact(x):
    """f+(x) = log(1 + exp(-x)) for x >= 0."""
    return np.log1p(np.exp(-np.asarray(x, dtype=np.float64)))


def f_minus_exact(x):
    """f-(x) = log(1 - exp(-x)) for x > 0; inputs below eps are clamped."""
    x = np.maximum(np.asarray(x, dtype=np.float64), F_MINUS_EPS)
    return np.log(-np.expm1(-x))


@dataclass(frozen=True)
class CorrectionTable:
    step: float
    max_input: float
    values: np.ndarray  # sample k holds f(k * step)

    def lookup(self, x):
        """Nearest-sample lookup; zero beyond max_input."""
        x = np.asarray(x, dtype=np.float64)
        idx = np.minimum((x / self.step + 0.5).astype(np.int64),
                         len(self.values) - 1)
        out = self.values[np.maximum(idx, 0)]
        return np.where(x >= self.max_input, 0.0, out)


def make_f_plus_table(step: float = TABLE_STEP,
                      max_input: float = TABLE_MAX) -> CorrectionTable:
    n = int(round(max_input / step)) + 1
    xs = np.arange(n) * step
    return CorrectionTable(step, max_input, f_plus_exact(xs))


def make_f_minus_table(step: float = TABLE_STEP,
                       max_input: float = TABLE_MAX) -> CorrectionTable:
    n = int(round(max_input / step)) + 1
    xs = np.maximum(np.arange(n) * step, F_MINUS_EPS)
    return CorrectionTable(step, max_input, f_minus_exact(xs))


F_PLUS_TABLE = make_f_plus_table()
F_MINUS_TABLE = make_f_minus_table()


def f_plus(x, table: CorrectionTable = F_PLUS_TABLE):
    return table.lookup(x)


def f_minus(x, table: CorrectionTable = F_MINUS_TABLE):
    return table.lookup(x)


def _sign(x):
    # sign with sign(0) = +1 so tie inputs keep a defined branch
    return np.where(np.asarray(x, dtype=np.float64) < 0, -1.0, 1.0)


def boxplus(L1, L2, exact: bool = True, table: CorrectionTable = F_PLUS_TABLE):
    """L1 boxplus L2 = sgn L1 sgn L2 min(|L1|,|L2|) + f+(|L1+L2|) - f+(|L1-L2|).

    The identity equals ln((1+e^{L1+L2})/(e^{L1}+e^{L2})) when f+ is
    exact.  +-inf inputs pass the other operand through exactly.
    """
    L1 = np.asarray(L1, dtype=np.float64)
    L2 = np.asarray(L2, dtype=np.float64)
    inf1, inf2 = np.isinf(L1), np.isinf(L2)
    a = np.where(inf1, 0.0, L1)
    b = np.where(inf2, 0.0, L2)
    fp = f_plus_exact if exact else (lambda x: table.lookup(x))
    core = (_sign(a) * _sign(b) * np.minimum(np.abs(a), np.abs(b))
            + fp(np.abs(a + b)) - fp(np.abs(a - b)))
    out = np.where(inf1, _sign(L1) * L2, np.where(inf2, _sign(L2) * L1, core))
    return out[()] if out.ndim == 0 else out


def boxminus(L1, L2, exact: bool = True,
             table: CorrectionTable = F_MINUS_TABLE):
    """Inverse of boxplus: (a boxplus b) boxminus b ~ a.

    L1 boxminus L2 = sgn(L2) L1 + f-(|L1+L2|) - f-(|L1-L2|), with
    near-zero magnitudes clamped to eps before f-.
    """
    L1 = np.asarray(L1, dtype=np.float64)
    L2 = np.asarray(L2, dtype=np.float64)
    inf2 = np.isinf(L2)
    b = np.where(inf2, 0.0, L2)
    fm = f_minus_exact if exact else (lambda x: table.lookup(x))
    core = (_sign(b) * L1 + fm(np.abs(L1 + b)) - fm(np.abs(L1 - b)))
    out = np.where(inf2, _sign(L2) * L1, core)
    return out[()] if out.ndim == 0 else out


def cn_update(messages, exact: bool = True,
              fp_table: CorrectionTable = F_PLUS_TABLE,
              fm_table: CorrectionTable = F_MINUS_TABLE):
    """Check-node extrinsic outputs: total boxplus, then boxminus each input."""
    msgs = np.asarray(messages, dtype=np.float64)
    if msgs.shape[0] < 2:
        raise ValueError("check-node degree must be >= 2")
    total = msgs[0]
    for v in msgs[1:]:
        total = boxplus(total, v, exact=exact, table=fp_table)
    return np.array([boxminus(total, v, exact=exact, table=fm_table)
                     for v in msgs])


def clip_llr(x, lmax: float = L_MAX):
    """Clamp finite values to [-lmax, lmax]; infinities pass unchanged."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.isinf(x), x, np.clip(x, -lmax, lmax))
    return out[()] if out.ndim == 0 else out
