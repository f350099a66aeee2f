"""One-step and two-step self-normalized (analytic) critical values.

These cutoffs need no simulation: the one-step value is a normal-quantile
formula in ``(alpha, p, n)``, and the two-step variant first discards
clearly-slack inequalities (studentized score below ``-2 c_sn(beta)``) and
re-applies the formula with the selected count.  They depend on ``p`` only
through ``log p`` but ignore correlation across columns, so they are
conservative relative to the bootstrap cutoffs when columns are dependent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import (
    CriticalValueSpec,
    MomentSummary,
    TestDecision,
    exceeds,
    test_statistic,
    DegenerateStatistic,
)
from .errors import UndefinedCriticalValueError

__all__ = ["SnConfig", "sn_one_step", "sn_select", "sn_two_step"]


def _sn_from_tail(tail: float, n: int) -> float:
    """Critical value ``z / sqrt(1 - z^2/n)`` with ``z`` the upper-``tail`` quantile."""
    z = float(-ndtri(tail))
    if z * z >= n:
        raise UndefinedCriticalValueError(
            "SN critical value undefined: p too large relative to n"
        )
    return z / np.sqrt(1.0 - z * z / n)


def sn_one_step(alpha: float, p: int, n: int) -> float:
    """One-step self-normalized critical value for ``p`` inequalities at size ``alpha``."""
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha}")
    if p < 1 or n < 2:
        raise ValueError("need p >= 1 and n >= 2")
    return _sn_from_tail(alpha / p, n)


def threshold_select(summary: MomentSummary, threshold: float) -> frozenset[int]:
    """Columns (1-based) whose studentized score exceeds ``threshold``.

    A zero-variance column has no score; it is kept when its mean is
    nonnegative (maximally binding) and dropped when negative (maximally
    slack).
    """
    root_n = np.sqrt(summary.n)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = root_n * summary.means / summary.sds
    keep = np.where(
        summary.degenerate, summary.means >= 0.0, scores > threshold
    )
    return frozenset(int(j) + 1 for j in np.flatnonzero(keep))


def sn_select(summary: MomentSummary, beta: float) -> frozenset[int]:
    """Selection step: keep columns with score above ``-2 c_sn(beta)``."""
    if not 0.0 < beta < 0.5:
        raise ValueError(f"beta must lie in (0, 0.5), got {beta}")
    c_beta = sn_one_step(beta, summary.p, summary.n)
    return threshold_select(summary, -2.0 * c_beta)


@dataclass(frozen=True)
class SnConfig:
    """Tuning constants for the self-normalized test."""

    alpha: float
    beta: float = 0.001
    use_selection: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if self.use_selection and not 0.0 < self.beta < self.alpha / 3:
            raise ValueError(
                "selection requires 0 < beta < alpha/3 "
                f"(got alpha={self.alpha}, beta={self.beta})"
            )


def sn_two_step(summary: MomentSummary, cfg: SnConfig) -> TestDecision:
    """Two-step self-normalized test on a column summary.

    Selects at size ``cfg.beta``, then applies the one-step formula with the
    tail mass ``(alpha - 2 beta) / k`` where ``k`` is the selected count; an
    empty selection gives critical value 0.  The statistic is always the max
    over *all* columns; selection only sharpens the cutoff.
    """
    if not cfg.use_selection:
        raise ValueError("sn_two_step requires use_selection=True")
    selected = sn_select(summary, cfg.beta)
    k = len(selected)
    if k == 0:
        cv = 0.0
    else:
        cv = _sn_from_tail((cfg.alpha - 2.0 * cfg.beta) / k, summary.n)
    stat = test_statistic(summary)
    value = stat.bound if isinstance(stat, DegenerateStatistic) else stat
    return TestDecision(
        statistic=value,
        critical_value=cv,
        reject=exceeds(summary, cv),
        selected=tuple(sorted(selected)),
        method=CriticalValueSpec(
            method="sn2", alpha=cfg.alpha, beta=cfg.beta
        ),
    )
