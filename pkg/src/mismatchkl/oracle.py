"""Independent numerical oracles.

Nothing here knows about the analytic derivative formulas: the
differentiator treats its target as a black box, and the Monte Carlo
posterior estimator only simulates the forward channel.  Random number
generation is numpy's default_rng (PCG64), seeded explicitly, so results
are bit-reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import (
    BinomialChannel,
    Channel,
    DiscretePrior,
    DomainError,
    NegBinomialChannel,
    binomial_loglik,
    kl_divergence,
    negbinomial_logmasses_upto,
    output_pmf,
    output_pmf_negbinomial,
)


class InsufficientConditioningError(RuntimeError):
    """No samples hit the conditioning event {Y = y}."""

    def __init__(self, y: int, hits: int, sample_count: int):
        self.y = y
        self.hits = hits
        self.sample_count = sample_count
        super().__init__(f"{hits} hits on Y={y} after {sample_count} draws")


@dataclass(frozen=True)
class DiffConfig:
    base_step: float = 1e-4  # relative to the evaluation point
    richardson_levels: int = 3
    domain_cap: float | None = None  # maximum absolute step

    def __post_init__(self):
        if not 0 < self.base_step <= 0.1:
            raise DomainError("base_step must lie in (0, 0.1]")
        if self.richardson_levels not in (1, 2, 3, 4):
            raise DomainError("richardson_levels must be in 1..4")
        if self.domain_cap is not None and self.domain_cap <= 0:
            raise DomainError("domain_cap must be strictly positive")


@dataclass(frozen=True)
class MCConfig:
    sample_count: int = 10**6
    seed: int = 0

    def __post_init__(self):
        if self.sample_count < 1:
            raise DomainError("sample_count must be >= 1")


def central_diff(f, x0: float, cfg: DiffConfig = DiffConfig()):
    """Richardson-extrapolated central difference of f at x0.

    Steps are halved per level; the returned error estimate is the last
    extrapolation increment (a crude h^2 bound when there is only one
    level).  f may return a scalar or an ndarray (handled componentwise).
    """
    h = cfg.base_step * (abs(x0) if x0 != 0 else 1.0)
    if cfg.domain_cap is not None:
        h = min(h, cfg.domain_cap)
    levels = cfg.richardson_levels
    table = []
    for k in range(levels):
        hk = h / 2.0**k
        d = (np.asarray(f(x0 + hk)) - np.asarray(f(x0 - hk))) / (2.0 * hk)
        row = [d]
        for j in range(1, k + 1):
            prev = table[k - 1][j - 1]
            row.append(row[j - 1] + (row[j - 1] - prev) / (4.0**j - 1.0))
        table.append(row)
    estimate = table[-1][-1]
    if levels > 1:
        err = float(np.max(np.abs(table[-1][-1] - table[-1][-2])))
    else:
        err = float(np.max(np.abs(estimate))) * h * h + h * h
    if np.ndim(estimate) == 0:
        estimate = float(estimate)
    return estimate, err


def _conditional_pmf_table(prior: DiscretePrior, ch: Channel, eps: float = 1e-12):
    """Per-support-point pmf rows used for inverse-CDF sampling.

    For the negative binomial the rows are truncated at quantile 1 - eps;
    draws beyond the table are clipped to its last column.
    """
    ch.check_compatible(prior)
    if isinstance(ch, BinomialChannel):
        ys = np.arange(ch.n + 1)
        rows = [
            np.exp([binomial_loglik(ch, x, int(y)) for y in ys]) for x in prior.support
        ]
        return np.asarray(rows)
    per_point = []
    width = 0
    for x in prior.support:
        pm = output_pmf_negbinomial(DiscretePrior((x,), (1.0,)), ch, eps)
        per_point.append(pm.array())
        width = max(width, pm.y_max + 1)
    rows = np.zeros((len(per_point), width))
    for i, row in enumerate(per_point):
        rows[i, : row.size] = row
    return rows


def mc_posterior_mean(
    prior: DiscretePrior, ch: Channel, y: int, cfg: MCConfig
) -> tuple[float, float]:
    """Monte Carlo estimate of E[X | Y=y]: sample (X, Y) forward, condition
    on {Y=y}, return the conditioned sample mean and its standard error."""
    ch.check_compatible(prior)
    if y < 0 or (isinstance(ch, BinomialChannel) and y > ch.n):
        raise DomainError(f"y={y} outside the channel outcome range")
    rng = np.random.default_rng(cfg.seed)
    support = np.asarray(prior.support)
    idx = rng.choice(support.size, size=cfg.sample_count, p=np.asarray(prior.weights))
    u = rng.random(cfg.sample_count)
    table = _conditional_pmf_table(prior, ch)
    cdfs = np.cumsum(table, axis=1)
    # inverse CDF per draw, grouped by support point
    ys = np.empty(cfg.sample_count, dtype=np.int64)
    for i in range(support.size):
        sel = idx == i
        ys[sel] = np.searchsorted(cdfs[i], u[sel], side="right")
    ys = np.minimum(ys, table.shape[1] - 1)
    hit = ys == y
    hits = int(np.count_nonzero(hit))
    if hits == 0:
        raise InsufficientConditioningError(y, hits, cfg.sample_count)
    xs = support[idx[hit]]
    est = float(xs.mean())
    se = float(xs.std(ddof=1) / np.sqrt(hits)) if hits > 1 else 0.0
    return est, se


def divergence_curve(
    P_prior: DiscretePrior,
    Q_prior: DiscretePrior,
    channel_template: Channel,
    param_grid,
    eps: float = 1e-12,
) -> list[tuple[float, float]]:
    """Exact output-law divergence at each grid value of the scaling
    parameter, holding n (or r) fixed from the template channel."""
    out = []
    for param in param_grid:
        if isinstance(channel_template, BinomialChannel):
            ch = BinomialChannel(channel_template.n, param)
        else:
            ch = NegBinomialChannel(channel_template.r, param)
        try:
            ch.check_compatible(P_prior)
            ch.check_compatible(Q_prior)
        except DomainError as exc:
            raise DomainError(f"grid value {param} incompatible: {exc}") from exc
        out.append((float(param), divergence_at(P_prior, Q_prior, ch, eps)))
    return out


def divergence_at(
    P_prior: DiscretePrior, Q_prior: DiscretePrior, ch: Channel, eps: float = 1e-12
) -> float:
    """Output-law divergence for one channel instance.

    For the negative binomial the sum is weighted by P's represented range
    and Q's log-masses are evaluated exactly there, so neither Q-side
    truncation nor deep-tail underflow enters the sum.
    """
    P = output_pmf(P_prior, ch, eps)
    if isinstance(ch, BinomialChannel):
        return kl_divergence(P, output_pmf(Q_prior, ch))
    p = P.array()
    lq = negbinomial_logmasses_upto(Q_prior, ch, P.y_max)
    live = p > 0
    return float(np.sum(p[live] * (np.log(p[live]) - lq[live])))
