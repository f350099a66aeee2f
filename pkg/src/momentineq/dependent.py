"""Block multiplier bootstrap for weakly dependent rows.

For time-ordered observations the i.i.d. bootstraps are invalid; instead the
row range is split into alternating large and small blocks, one standard
normal multiplier is attached to each *large* block, and the critical value
is the empirical quantile of the resulting weighted block sums.  The small
blocks break the dependence between consecutive large-block sums and are
ignored by the bootstrap statistic.  The test statistic here is
non-studentized: ``max_j sqrt(n) * mean_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .bootstrap import _chunk, _quantile
from .core import MomentSummary, TestDecision, as_sample_matrix, summarize
from .gaussian import SeededStream, open_uniform

__all__ = [
    "BlockPlan",
    "make_blocks",
    "nonstudentized_statistic",
    "bmb_critical",
    "bmb_test",
]


@dataclass(frozen=True)
class BlockPlan:
    """Partition of ``{0, ..., n-1}`` into alternating large and small blocks.

    ``large_blocks`` holds ``m`` half-open row ranges of length ``q``;
    ``small_blocks`` holds ``m`` ranges of length ``r`` plus one trailing
    remainder range (possibly empty).  Ranges are 0-based ``(start, stop)``.
    """

    n: int
    q: int
    r: int
    m: int
    large_blocks: tuple[tuple[int, int], ...]
    small_blocks: tuple[tuple[int, int], ...]


def make_blocks(n: int, q: int, r: int) -> BlockPlan:
    """Alternating block partition with large length ``q`` and small length ``r``.

    Requires ``1 <= r < q`` and ``q + r <= n / 2`` (at least two full
    large/small cycles fit).  The trailing remainder after the last small
    block forms one extra small block.
    """
    n, q, r = int(n), int(q), int(r)
    if r < 1:
        raise ValueError("small-block length r must be at least 1")
    if not r < q:
        raise ValueError(f"need r < q, got q={q}, r={r}")
    if not 2 * (q + r) <= n:
        raise ValueError(
            f"need q + r <= n/2, got q+r={q + r} with n={n}"
        )
    m = n // (q + r)
    large = tuple((l * (q + r), l * (q + r) + q) for l in range(m))
    small = tuple((l * (q + r) + q, (l + 1) * (q + r)) for l in range(m))
    small = small + ((m * (q + r), n),)
    return BlockPlan(n=n, q=q, r=r, m=m, large_blocks=large, small_blocks=small)


def default_block_lengths(n: int) -> tuple[int, int]:
    """Default ``(q, r)``: ``q = floor(n^(1/3))``, ``r = max(1, floor(n^(1/6)))``."""
    q = int(n ** (1.0 / 3.0))
    r = max(1, int(n ** (1.0 / 6.0)))
    return q, r


def nonstudentized_statistic(summary: MomentSummary) -> float:
    """``max_j sqrt(n) * mean_j`` (no studentization, so not scale invariant)."""
    return float(math.sqrt(summary.n) * summary.means.max())


def bmb_critical(sample, plan: BlockPlan, alpha: float, B: int,
                 stream: SeededStream) -> float:
    """Block multiplier bootstrap critical value.

    Each replication draws one N(0,1) multiplier per large block and records
    ``max_j (mq)^(-1/2) * sum_l eps_l * sum_{i in I_l} (x_ij - mean_j)``;
    the critical value is the ``1 - alpha`` empirical quantile of ``B``
    replications.
    """
    x = as_sample_matrix(sample)
    if plan.n != x.shape[0]:
        raise ValueError(
            f"block plan is for n={plan.n} but sample has n={x.shape[0]} rows"
        )
    B = int(B)
    if B < 100:
        raise ValueError("need at least 100 bootstrap replications")
    s = summarize(x)
    xc = x - s.means
    block_sums = np.stack([xc[a:b].sum(axis=0) for a, b in plan.large_blocks])
    scale = 1.0 / math.sqrt(plan.m * plan.q)
    gen = stream.generator()
    out = np.empty(B)
    step = _chunk(plan.m, B)
    for start in range(0, B, step):
        stop = min(start + step, B)
        eps = ndtri(open_uniform(gen, (stop - start, plan.m)))
        out[start:stop] = (eps @ block_sums).max(axis=1) * scale
    return _quantile(out, 1.0 - alpha)


def bmb_test(sample, plan: BlockPlan, alpha: float, B: int,
             stream: SeededStream) -> TestDecision:
    """Dependent-data test: reject when ``max_j sqrt(n) mean_j`` exceeds the BMB cutoff."""
    x = as_sample_matrix(sample)
    s = summarize(x)
    statistic = nonstudentized_statistic(s)
    cv = bmb_critical(x, plan, alpha, B, stream)
    return TestDecision(
        statistic=statistic,
        critical_value=float(cv),
        reject=bool(statistic > cv),
        selected=tuple(range(1, s.p + 1)),
        method="bmb",
    )
