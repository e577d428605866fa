"""Weighted operation-count cost model for iterative decoders.

Basic operations and weights: sign-product, sign-apply, min, max, table
lookup, and add/sub all weigh 1; a non-trivial multiply weighs 3.  A
two-input box-plus expands to 1 sign-product + 1 sign-apply + 1 min +
2 lookups + 4 add/sub = 9 weighted units.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

__all__ = [
    "CostWeights",
    "OpCount",
    "boxplus_cost",
    "cn_cost",
    "vn_cost",
    "ml_cost",
    "stopping_cost",
    "decoder_workload",
    "aut_bp_frame_opcount",
    "analytic_reference_bars",
]


@dataclass(frozen=True)
class CostWeights:
    sign_product: float = 1.0
    sign_apply: float = 1.0
    min_op: float = 1.0
    max_op: float = 1.0
    table_lookup: float = 1.0
    add_sub: float = 1.0
    multiply: float = 3.0


DEFAULT_WEIGHTS = CostWeights()


@dataclass
class OpCount:
    """Tallies per basic operation kind."""

    sign_products: float = 0
    sign_applies: float = 0
    mins: float = 0
    maxs: float = 0
    table_lookups: float = 0
    add_subs: float = 0
    multiplies: float = 0

    def weighted_total(self, weights: CostWeights = DEFAULT_WEIGHTS) -> float:
        return (self.sign_products * weights.sign_product
                + self.sign_applies * weights.sign_apply
                + self.mins * weights.min_op
                + self.maxs * weights.max_op
                + self.table_lookups * weights.table_lookup
                + self.add_subs * weights.add_sub
                + self.multiplies * weights.multiply)

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(*[getattr(self, f.name) + getattr(other, f.name)
                         for f in fields(OpCount)])

    def scaled(self, k: float) -> "OpCount":
        return OpCount(*[getattr(self, f.name) * k for f in fields(OpCount)])

    @classmethod
    def from_boxplus_adds(cls, n_boxplus: float, n_adds: float) -> "OpCount":
        """Tallies of n box-plus evaluations plus n standalone additions."""
        return cls(sign_products=n_boxplus,
                   sign_applies=n_boxplus,
                   mins=n_boxplus,
                   table_lookups=2 * n_boxplus,
                   add_subs=4 * n_boxplus + n_adds)


def boxplus_cost(weights: CostWeights = DEFAULT_WEIGHTS) -> float:
    """Weighted cost of one two-input box-plus (9 at default weights)."""
    return OpCount.from_boxplus_adds(1, 0).weighted_total(weights)


def cn_cost(D: int) -> int:
    """Box-minus check-node update of degree D: 16 D - 9."""
    if D < 2:
        raise ValueError("check-node degree must be >= 2")
    return 16 * D - 9


def vn_cost(D: int, weighted_edges: bool = False) -> int:
    """Variable-node update of degree D: 2 D, plus 3 D + 3 with edge weights."""
    if D < 2:
        raise ValueError("variable-node degree must be >= 2")
    return 2 * D + (3 * D + 3 if weighted_edges else 0)


def ml_cost(M: int, N: int) -> int:
    """ML-in-the-list over M length-N candidates: 2 M N - 1."""
    if M < 1 or N < 1:
        raise ValueError("M, N must be >= 1")
    return 2 * M * N - 1


def stopping_cost(m: int, N: int) -> int:
    """Re-encode-and-compare stopping check: m N / 2 + 2 N - 1."""
    if m < 1 or N < 1:
        raise ValueError("m, N must be >= 1")
    return m * N // 2 + 2 * N - 1


def ml_opcount(M: int, N: int) -> OpCount:
    return OpCount(sign_applies=M * N, maxs=M - 1, add_subs=M * (N - 1))


def stopping_opcount(m: int, N: int) -> OpCount:
    return OpCount(sign_products=stopping_cost(m, N))


def cn_opcount(D: int) -> OpCount:
    """Tally breakdown of one degree-D box-minus check-node update."""
    if D < 2:
        raise ValueError("check-node degree must be >= 2")
    return OpCount(sign_products=D - 1, sign_applies=2 * D - 1, mins=D - 1,
                   table_lookups=4 * D - 2, add_subs=8 * D - 4)


def vn_opcount(D: int, weighted_edges: bool = False) -> OpCount:
    """Tally breakdown of one degree-D variable-node update."""
    if D < 1:
        raise ValueError("variable-node degree must be >= 1")
    return OpCount(add_subs=2 * D,
                   multiplies=D + 1 if weighted_edges else 0)


def aut_bp_frame_opcount(n_boxplus: int, n_adds: int,
                         total_constituent_iters: int, M: int, N: int,
                         m: int, stopping: bool) -> OpCount:
    """Per-frame tallies of Aut-M-BP: FFG iterations across all constituent
    decoders, per-iteration stopping checks when enabled, and one ML
    selection."""
    ops = OpCount.from_boxplus_adds(n_boxplus * total_constituent_iters,
                                    n_adds * total_constituent_iters)
    if stopping:
        ops = ops + stopping_opcount(m, N).scaled(total_constituent_iters)
    return ops + ml_opcount(M, N)


def decoder_workload(measurements,
                     weights: CostWeights = DEFAULT_WEIGHTS) -> float:
    """Mean weighted total over per-frame OpCount tallies."""
    measurements = list(measurements)
    if not measurements:
        raise ValueError("no measurements")
    return sum(m.weighted_total(weights) for m in measurements) / len(measurements)


def analytic_reference_bars() -> dict:
    """Closed-form weighted workloads for the RM(3,7) decoder comparison.

    Out-of-scope decoders are evaluated from their published
    configurations (check counts, iterations); entries are analytic, not
    measured.  Aut-BP entries use the reduced-graph per-iteration cost
    (1334 box-plus + 1334 additions) and the published mean iteration
    counts at the 1e-4 operating points.
    """
    N, m = 128, 7
    per_iter = OpCount.from_boxplus_adds(1334, 1334).weighted_total()
    stop = stopping_cost(m, N)

    def tanner(rows: int, row_weight: int, iters: int, weighted: bool) -> float:
        edges = rows * row_weight
        cn = rows * cn_cost(row_weight)
        vn = (5 * edges + 3 * N) if weighted else 2 * edges
        return iters * (cn + vn)

    bars = {
        "nbp": tanner(94488, 16, 6, weighted=True),
        "d1": tanner(2835, 16, 6, weighted=True),
        "d2": tanner(2835, 16, 6, weighted=False),
        "d3": tanner(2835, 16, 6, weighted=True),
        "mwpc": tanner(4724, 16, 30, weighted=True),
        "mbbp": tanner(64, 64, 6, weighted=False) * 60,
        "aut32_nostop": 32 * 200 * per_iter + ml_cost(32, N),
        "aut32_stop": 32 * 4.55 * (per_iter + stop) + ml_cost(32, N),
        "aut8_nostop": 8 * 200 * per_iter + ml_cost(8, N),
        "aut8_stop": 8 * 3.96 * (per_iter + stop) + ml_cost(8, N),
    }
    return bars
