"""Three-step testing with gradient-based weak-inequality selection.

For parametric models where column ``j`` of the data is ``g_j`` evaluated at
the tested parameter and ``v[:, j, l]`` holds the gradient coordinate
``l`` of ``g_j``, the three-step procedure additionally drops *weakly
informative* inequalities: those whose moment function is nearly flat in the
parameter, so a violation nearby could only produce a weak signal.  Both the
statistic (max over the kept set) and the critical value (bootstrap quantile
over a second, more generous kept set intersected with the usual selection)
depend on the estimated sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bootstrap import _quantile, _values
from .core import MomentSummary, TestDecision, as_sample_matrix, summarize
from .errors import DegenerateColumnError, InputError
from .gaussian import SeededStream
from .sn import threshold_select

__all__ = [
    "ParametricMomentData",
    "ThreeStepConfig",
    "GradientSummary",
    "gradient_summary",
    "gradient_bootstrap_critical",
    "three_step_sets",
    "three_step_test",
]


@dataclass(frozen=True)
class ParametricMomentData:
    """Moment values ``g`` (n x p) and their parameter gradients ``v`` (n x p x r)."""

    g: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        g = as_sample_matrix(self.g)
        v = np.asarray(self.v, dtype=np.float64)
        if v.ndim != 3:
            raise InputError(f"gradient array must be n x p x r, got shape {v.shape}")
        if v.shape[:2] != g.shape:
            raise InputError(
                f"gradient shape {v.shape} does not match data shape {g.shape}"
            )
        if v.shape[2] < 1:
            raise InputError("parameter dimension r must be at least 1")
        if not np.isfinite(v).all():
            raise InputError("gradient array contains non-finite entries")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def p(self) -> int:
        return self.g.shape[1]

    @property
    def r(self) -> int:
        return self.v.shape[2]


@dataclass(frozen=True)
class ThreeStepConfig:
    """Sizes and bootstrap settings for the three-step test.

    ``phi`` splits the selection size ``beta`` into the two gradient
    thresholds (``beta + phi`` and ``beta - phi``); when omitted it defaults
    to ``min(beta / 2, 1 / log n)``, resolved once ``n`` is known.
    """

    alpha: float
    beta: float = 0.001
    phi: float | None = None
    scheme: str = "MB"
    replications: int = 1000
    stream: SeededStream | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", str(self.scheme).upper())
        if self.scheme not in ("MB", "EB"):
            raise ValueError(f"scheme must be MB or EB, got {self.scheme!r}")
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        # The final quantile level is 1 - alpha + 4*beta, which must stay
        # below 1; that pins beta < alpha/4.
        if not 0.0 < self.beta < self.alpha / 4:
            raise ValueError(
                "three-step requires 0 < beta < alpha/4 "
                f"(got alpha={self.alpha}, beta={self.beta})"
            )
        if self.phi is not None and not 0.0 < self.phi < self.beta:
            raise ValueError(
                f"phi must satisfy 0 < phi < beta, got phi={self.phi}"
            )
        if self.replications < 100:
            raise ValueError(
                "need at least 100 bootstrap replications for a usable quantile"
            )

    def resolve_phi(self, n: int) -> float:
        if self.phi is not None:
            return self.phi
        return min(self.beta / 2.0, 1.0 / math.log(max(n, 3)))

    def resolve_stream(self) -> SeededStream:
        return self.stream if self.stream is not None else SeededStream(self.seed)


@dataclass(frozen=True)
class GradientSummary:
    """Per-(j, l) gradient means and n-divisor standard deviations, shape (p, r)."""

    means: np.ndarray
    sds: np.ndarray
    n: int


def _flat_gradient_summary(data: ParametricMomentData) -> MomentSummary:
    flat = summarize(data.v.reshape(data.n, data.p * data.r))
    if flat.any_degenerate():
        r = data.r
        pairs = ", ".join(
            f"(j={(c - 1) // r + 1}, l={(c - 1) % r + 1})"
            for c in flat.degenerate_columns()
        )
        raise DegenerateColumnError(
            flat.degenerate_columns(),
            context=f"zero-variance gradient column(s) {pairs}",
        )
    return flat


def gradient_summary(data: ParametricMomentData) -> GradientSummary:
    """Means and standard deviations of every gradient coordinate.

    Raises on a zero-variance gradient column, naming the ``(j, l)`` pair;
    the studentized gradient statistics are undefined there.
    """
    flat = _flat_gradient_summary(data)
    shape = (data.p, data.r)
    return GradientSummary(
        means=flat.means.reshape(shape), sds=flat.sds.reshape(shape), n=data.n
    )


def gradient_bootstrap_critical(data: ParametricMomentData, gamma: float,
                                cfg: ThreeStepConfig) -> float:
    """``1 - gamma`` bootstrap quantile of the max studentized gradient average.

    The max runs over all ``p * r`` gradient coordinates jointly; the
    empirical scheme resamples whole observation rows, preserving the
    dependence across coordinates.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    flat = _flat_gradient_summary(data)
    vflat = data.v.reshape(data.n, data.p * data.r)
    vals = _values(
        cfg.scheme, vflat, flat.means, flat.sds, np.arange(flat.p),
        cfg.replications, cfg.resolve_stream().child("grad-crit"),
    )
    return _quantile(vals, 1.0 - gamma)


def _gradient_thresholds(data, flat, cfg, stream, phi):
    """Gradient quantiles at sizes ``beta + phi`` and ``beta - phi`` from shared draws."""
    vflat = data.v.reshape(data.n, data.p * data.r)
    vals = _values(
        cfg.scheme, vflat, flat.means, flat.sds, np.arange(flat.p),
        cfg.replications, stream.child("grad-select"),
    )
    c_plus = _quantile(vals, 1.0 - (cfg.beta + phi))
    c_minus = _quantile(vals, 1.0 - (cfg.beta - phi))
    return c_plus, c_minus


def _sets(data, g_summary, cfg, stream):
    x = data.g
    cols0 = np.arange(g_summary.p)
    g_vals = _values(
        cfg.scheme, x, g_summary.means, g_summary.sds, cols0,
        cfg.replications, stream.child("select"),
    )
    c_beta = _quantile(g_vals, 1.0 - cfg.beta)
    j_hat = threshold_select(g_summary, -2.0 * c_beta)

    flat = _flat_gradient_summary(data)
    phi = cfg.resolve_phi(data.n)
    c_plus, c_minus = _gradient_thresholds(data, flat, cfg, stream, phi)
    scores = (
        math.sqrt(data.n)
        * flat.means.reshape(data.p, data.r)
        / flat.sds.reshape(data.p, data.r)
    )
    j_prime = frozenset(
        int(j) + 1 for j in np.flatnonzero((scores > -c_plus).all(axis=1))
    )
    j_dprime = frozenset(
        int(j) + 1 for j in np.flatnonzero((scores > -3.0 * c_minus).all(axis=1))
    )
    return j_hat, j_prime, j_dprime


def three_step_sets(data: ParametricMomentData, cfg: ThreeStepConfig):
    """The three estimated column sets ``(J, J', J'')``.

    ``J`` keeps columns whose score clears ``-2 c_boot(beta)`` (the usual
    slack-inequality selection on the data itself).  ``J'`` and ``J''`` keep
    columns whose *every* gradient score clears ``-c_grad(beta + phi)`` and
    ``-3 c_grad(beta - phi)`` respectively; both gradient thresholds come
    from one shared set of gradient bootstrap draws.
    """
    g_summary = summarize(data.g)
    return _sets(data, g_summary, cfg, cfg.resolve_stream())


def three_step_test(data: ParametricMomentData, cfg: ThreeStepConfig) -> TestDecision:
    """Three-step bootstrap test.

    The statistic is the max score over ``J'``; the critical value is the
    ``1 - alpha + 4 beta`` bootstrap quantile over ``J`` intersected with
    ``J''``.  An empty ``J'`` sets both the statistic and the critical value
    to 0, so the test never rejects (the comparison is strict).
    """
    g_summary = summarize(data.g)
    if g_summary.any_degenerate():
        raise DegenerateColumnError(
            g_summary.degenerate_columns(), context="three-step test undefined"
        )
    stream = cfg.resolve_stream()
    j_hat, j_prime, j_dprime = _sets(data, g_summary, cfg, stream)
    cv_set = j_hat & j_dprime

    if not j_prime:
        statistic, cv = 0.0, 0.0
    else:
        scores = (
            math.sqrt(data.n) * g_summary.means / g_summary.sds
        )
        keep = np.asarray(sorted(j_prime), dtype=np.intp) - 1
        statistic = float(scores[keep].max())
        cols0 = np.asarray(sorted(cv_set), dtype=np.intp) - 1
        vals = _values(
            cfg.scheme, data.g, g_summary.means, g_summary.sds, cols0,
            cfg.replications, stream.child("crit"),
        )
        cv = _quantile(vals, 1.0 - cfg.alpha + 4.0 * cfg.beta)

    return TestDecision(
        statistic=statistic,
        critical_value=float(cv),
        reject=bool(statistic > cv),
        selected=tuple(sorted(cv_set)),
        method=f"3s-{cfg.scheme.lower()}",
    )
