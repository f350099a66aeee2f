"""Multiplier and empirical bootstrap critical values for the max statistic.

Both schemes simulate the conditional law of the max of studentized centered
column averages: the multiplier bootstrap (MB) reweights the centered rows
with i.i.d. standard normal multipliers, the empirical bootstrap (EB)
resamples rows with replacement.  Critical values are left-continuous
empirical quantiles (the ``ceil(level * B)``-th order statistic) of ``B``
such draws.

Stream discipline: within one test, selection draws and critical-value draws
come from disjoint substreams (``select`` vs ``crit`` children of the config
stream), so each quantile is computed from fresh randomness and the whole
pipeline is reproducible.  Replication ``b`` consumes the ``b``-th row of the
run's multiplier (or index) block, which makes every draw independent of the
restriction set: restricting to a subset of columns, duplicating a column, or
permuting columns never changes the randomness a replication sees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import (
    CriticalValueSpec,
    DegenerateStatistic,
    MomentSummary,
    TestDecision,
    as_sample_matrix,
    exceeds,
    regularity_diagnostics,
    summarize,
    test_statistic,
)
from .errors import DegenerateColumnError
from .gaussian import SeededStream, open_uniform
from .sn import sn_one_step, sn_select, threshold_select, _sn_from_tail

__all__ = [
    "BootstrapConfig",
    "BootstrapDraws",
    "mb_draws",
    "eb_draws",
    "empirical_quantile",
    "one_step_critical",
    "select_set",
    "two_step_critical",
    "hybrid_critical",
    "run_test",
]

SCHEMES = ("MB", "EB")

# Replication blocks are generated in chunks of roughly this many scalars
# to bound memory at large B; chunking never changes the values drawn.
_CHUNK_SCALARS = 4_000_000

# The draw matrix is multiplied in fixed-width column blocks (zero-padded at
# the tail) so that every matrix product has the same width.  BLAS kernels
# can pick different accumulation orders for different shapes; the fixed
# width makes a column's draw value a function of that column alone, which
# the exact invariants (duplication, permutation, restriction to a subset)
# rely on bit for bit.
_COL_BLOCK = 64


@dataclass(frozen=True)
class BootstrapConfig:
    """Scheme, replication count, stream, and sizes for one bootstrap test."""

    scheme: str
    replications: int
    stream: SeededStream
    alpha: float = 0.05
    beta: float = 0.001

    def __post_init__(self):
        object.__setattr__(self, "scheme", str(self.scheme).upper())
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be MB or EB, got {self.scheme!r}")
        if self.replications < 100:
            raise ValueError(
                "need at least 100 bootstrap replications for a usable quantile"
            )
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha}")


@dataclass(frozen=True)
class BootstrapDraws:
    """Realizations of the bootstrap max statistic over a restricted column set."""

    values: np.ndarray
    restricted_to: frozenset[int]


def _columns_mask(J, p: int) -> np.ndarray:
    """Validate a 1-based column set against ``p`` and return a 0-based index array."""
    if J is None:
        return np.arange(p)
    cols = sorted({int(j) for j in J})
    if cols and (cols[0] < 1 or cols[-1] > p):
        raise ValueError(f"column set {cols} not within 1..{p}")
    return np.asarray(cols, dtype=np.intp) - 1


def _chunk(n: int, B: int) -> int:
    return max(1, min(B, _CHUNK_SCALARS // max(n, 1)))


def _check_nondegenerate(sigma: np.ndarray, cols0: np.ndarray, context: str):
    bad = cols0[sigma[cols0] == 0.0]
    if bad.size:
        raise DegenerateColumnError(bad + 1, context=context)


def _blocked_rowmax(weights: np.ndarray, g: np.ndarray, shift=None) -> np.ndarray:
    """Row max of ``weights @ g`` (minus ``shift``) in fixed-width column blocks."""
    n, c = g.shape
    out = None
    for s in range(0, c, _COL_BLOCK):
        block = g[:, s:s + _COL_BLOCK]
        w = block.shape[1]
        if w < _COL_BLOCK:
            padded = np.zeros((n, _COL_BLOCK))
            padded[:, :w] = block
            block = padded
        prod = (weights @ block)[:, :w]
        if shift is not None:
            prod = prod - shift[s:s + w]
        m = prod.max(axis=1)
        out = m if out is None else np.maximum(out, m)
    return out


def _mb_values(x, mu, sigma, cols0, B, stream) -> np.ndarray:
    n = x.shape[0]
    if cols0.size == 0:
        return np.zeros(B)
    _check_nondegenerate(sigma, cols0, "multiplier bootstrap undefined")
    g = (x[:, cols0] - mu[cols0]) / (math.sqrt(n) * sigma[cols0])
    gen = stream.generator()
    out = np.empty(B)
    step = _chunk(n, B)
    for start in range(0, B, step):
        stop = min(start + step, B)
        eps = ndtri(open_uniform(gen, (stop - start, n)))
        out[start:stop] = _blocked_rowmax(eps, g)
    return out


def _eb_values(x, mu, sigma, cols0, B, stream) -> np.ndarray:
    n = x.shape[0]
    if cols0.size == 0:
        return np.zeros(B)
    _check_nondegenerate(sigma, cols0, "empirical bootstrap undefined")
    h = x[:, cols0] / (math.sqrt(n) * sigma[cols0])
    s0 = math.sqrt(n) * mu[cols0] / sigma[cols0]
    gen = stream.generator()
    out = np.empty(B)
    step = _chunk(n, B)
    for start in range(0, B, step):
        stop = min(start + step, B)
        k = stop - start
        idx = gen.integers(0, n, size=(k, n))
        flat = (idx + (np.arange(k) * n)[:, None]).ravel()
        counts = np.bincount(flat, minlength=k * n).reshape(k, n).astype(np.float64)
        out[start:stop] = _blocked_rowmax(counts, h, shift=s0)
    return out


def _values(scheme, x, mu, sigma, cols0, B, stream) -> np.ndarray:
    if scheme == "MB":
        return _mb_values(x, mu, sigma, cols0, B, stream)
    return _eb_values(x, mu, sigma, cols0, B, stream)


def mb_draws(sample, summary: MomentSummary, J, B: int, stream: SeededStream) -> BootstrapDraws:
    """Multiplier bootstrap draws of the max statistic restricted to ``J``.

    Replication ``b`` multiplies the centered rows by fresh N(0,1) weights
    and records ``max_{j in J} sqrt(n) * mean_i(eps_i (x_ij - mean_j)) / sd_j``.
    An empty ``J`` yields all zeros.  Raises
    :class:`~momentineq.errors.DegenerateColumnError` if ``J`` contains a
    zero-variance column.
    """
    x = as_sample_matrix(sample)
    cols0 = _columns_mask(J, summary.p)
    values = _mb_values(x, summary.means, summary.sds, cols0, int(B), stream)
    return BootstrapDraws(values=values, restricted_to=frozenset(int(c) + 1 for c in cols0))


def eb_draws(sample, summary: MomentSummary, J, B: int, stream: SeededStream) -> BootstrapDraws:
    """Empirical bootstrap draws of the max statistic restricted to ``J``.

    Replication ``b`` draws ``n`` row indices with replacement and records
    ``max_{j in J} sqrt(n) * (resampled mean_j - mean_j) / sd_j``.
    """
    x = as_sample_matrix(sample)
    cols0 = _columns_mask(J, summary.p)
    values = _eb_values(x, summary.means, summary.sds, cols0, int(B), stream)
    return BootstrapDraws(values=values, restricted_to=frozenset(int(c) + 1 for c in cols0))


def _order_statistic_index(level: float, B: int) -> int:
    """1-based index ``ceil(level * B)`` with a half-ulp guard.

    ``level * B`` that is an integer up to rounding must not be pushed to
    the next order statistic by floating-point excess (0.95 * 1000 is a hair
    above 950 in binary).
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {level}")
    t = level * B
    r = round(t)
    if r >= 1 and abs(t - r) <= 1e-9 * max(1.0, t):
        k = int(r)
    else:
        k = math.ceil(t)
    return min(max(k, 1), B)


def _quantile(values: np.ndarray, level: float) -> float:
    k = _order_statistic_index(level, len(values))
    return float(np.partition(values, k - 1)[k - 1])


def empirical_quantile(draws: BootstrapDraws, level: float) -> float:
    """Left-continuous empirical quantile: the ``ceil(level * B)``-th order statistic."""
    return _quantile(np.asarray(draws.values, dtype=np.float64), level)


def _require_clean(summary: MomentSummary, what: str):
    if summary.any_degenerate():
        raise DegenerateColumnError(summary.degenerate_columns(), context=what)


def one_step_critical(sample, cfg: BootstrapConfig) -> float:
    """One-step bootstrap critical value: the ``1 - alpha`` quantile over all columns."""
    x = as_sample_matrix(sample)
    s = summarize(x)
    return _one_step(x, s, cfg)


def _one_step(x, s, cfg: BootstrapConfig) -> float:
    cols0 = np.arange(s.p)
    vals = _values(cfg.scheme, x, s.means, s.sds, cols0, cfg.replications, cfg.stream.child("crit"))
    return _quantile(vals, 1.0 - cfg.alpha)


def select_set(sample, cfg: BootstrapConfig) -> frozenset[int]:
    """Bootstrap inequality selection: columns with score above ``-2 c_boot(beta)``.

    The threshold quantile is computed at size ``cfg.beta`` on a dedicated
    ``select`` substream, disjoint from the critical-value draws.
    """
    x = as_sample_matrix(sample)
    s = summarize(x)
    return _select(x, s, cfg)


def _select(x, s, cfg: BootstrapConfig) -> frozenset[int]:
    if not 0.0 < cfg.beta < cfg.alpha / 2:
        raise ValueError(
            f"two-step selection requires 0 < beta < alpha/2, got beta={cfg.beta}"
        )
    cols0 = np.arange(s.p)
    vals = _values(cfg.scheme, x, s.means, s.sds, cols0, cfg.replications, cfg.stream.child("select"))
    c_beta = _quantile(vals, 1.0 - cfg.beta)
    return threshold_select(s, -2.0 * c_beta)


def two_step_critical(sample, cfg: BootstrapConfig) -> float:
    """Two-step bootstrap critical value.

    Selects columns at size ``cfg.beta``, then takes the
    ``1 - alpha + 2 beta`` quantile of draws restricted to the selected set
    (0 when the selection is empty).
    """
    x = as_sample_matrix(sample)
    s = summarize(x)
    cv, _ = _two_step(x, s, cfg)
    return cv


def _restricted_quantile(x, s, cfg: BootstrapConfig, selected: frozenset[int], level: float) -> float:
    cols0 = np.asarray(sorted(selected), dtype=np.intp) - 1
    vals = _values(cfg.scheme, x, s.means, s.sds, cols0, cfg.replications, cfg.stream.child("crit"))
    return _quantile(vals, level)


def _two_step(x, s, cfg: BootstrapConfig) -> tuple[float, frozenset[int]]:
    selected = _select(x, s, cfg)
    level = 1.0 - cfg.alpha + 2.0 * cfg.beta
    return _restricted_quantile(x, s, cfg, selected, level), selected


def hybrid_critical(sample, cfg: BootstrapConfig, beta: float) -> float:
    """Hybrid critical value: analytic selection, bootstrap quantile.

    Uses the cheap self-normalized rule at size ``beta`` to select columns,
    then the ``1 - alpha + 2 beta`` bootstrap quantile over that set.
    Requires ``beta <= alpha / 3``.
    """
    x = as_sample_matrix(sample)
    s = summarize(x)
    cv, _ = _hybrid(x, s, cfg, beta)
    return cv


def _hybrid(x, s, cfg: BootstrapConfig, beta: float) -> tuple[float, frozenset[int]]:
    if not 0.0 < beta <= cfg.alpha / 3:
        raise ValueError(
            f"hybrid selection requires 0 < beta <= alpha/3, got beta={beta}"
        )
    selected = sn_select(s, beta)
    level = 1.0 - cfg.alpha + 2.0 * beta
    return _restricted_quantile(x, s, cfg, selected, level), selected


def run_test(sample, spec: CriticalValueSpec, *, stream: SeededStream | None = None,
             include_diagnostics: bool = False) -> TestDecision:
    """Run the test selected by ``spec`` and return the full decision record.

    The statistic is always the max studentized score over all columns; the
    critical value and the reported ``selected`` set depend on the method.
    The rejection decision goes through the coordinate-wise rule, so it is
    well-defined even when some column has zero variance (analytic methods
    only; bootstrap methods raise on degenerate columns).

    ``stream`` overrides the default ``SeededStream(spec.seed)``, which lets
    a simulation harness nest the bootstrap randomness under its own
    substream tree.
    """
    x = as_sample_matrix(sample)
    s = summarize(x)
    stat = test_statistic(s)
    value = stat.bound if isinstance(stat, DegenerateStatistic) else stat
    full = frozenset(range(1, s.p + 1))
    alpha, beta = spec.alpha, spec.beta

    if spec.method == "sn1":
        cv, selected = sn_one_step(alpha, s.p, s.n), full
    elif spec.method == "sn2":
        selected = sn_select(s, beta)
        k = len(selected)
        cv = _sn_from_tail((alpha - 2.0 * beta) / k, s.n) if k else 0.0
    else:
        _require_clean(s, f"{spec.method} critical value undefined")
        cfg = BootstrapConfig(
            scheme=spec.scheme,
            replications=spec.replications,
            stream=stream if stream is not None else SeededStream(spec.seed),
            alpha=alpha,
            beta=beta,
        )
        if spec.method in ("mb1", "eb1"):
            cv, selected = _one_step(x, s, cfg), full
        elif spec.method in ("mb2", "eb2"):
            cv, selected = _two_step(x, s, cfg)
        else:
            cv, selected = _hybrid(x, s, cfg, beta)

    diagnostics = None
    if include_diagnostics and not s.any_degenerate():
        diagnostics = regularity_diagnostics(x)
    return TestDecision(
        statistic=value,
        critical_value=float(cv),
        reject=exceeds(s, cv),
        selected=tuple(sorted(selected)),
        method=spec,
        diagnostics=diagnostics,
    )
