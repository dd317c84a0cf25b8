"""Analytic sides of the pmf-recursion lemmas and derivative theorems,
plus verification drivers that compare them against the finite-difference
oracle.

The two identities under test, for output laws P_Y, Q_Y induced by priors
P_X, Q_X through the same channel:

  binomial:      d/da D(P_Y || Q_Y) = sum_{y>=1} P_Y(y) (y/a) g(T(y)),
                 T(y) = (E_P[X|Y=y] - a) / (E_Q[X|Y=y] - a)
  neg binomial:  d/db D(P_Y || Q_Y) = sum_{y>=1} P_Y(y) (y/b) g(T(y)),
                 T(y) = (E_P[X|Y=y] + b) / (E_Q[X|Y=y] + b)

and the shared pmf recursion d/dparam P_Y(y) = (y P_Y(y) - (y+1) P_Y(y+1)) / param.
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
    OutputPMF,
    kl_divergence,
    negbinomial_logmasses_upto,
    negbinomial_masses_at,
    negbinomial_masses_upto,
    negbinomial_posterior_means_at,
    output_pmf_binomial,
    output_pmf_negbinomial,
    posterior_mean,
    posterior_means_upto,
)
from .oracle import DiffConfig, central_diff


@dataclass(frozen=True)
class ToleranceSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-6
    fd_step_scale: float = 1e-4
    richardson_levels: int = 3

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.fd_step_scale) <= 0:
            raise DomainError("tolerances and step scale must be strictly positive")
        if self.richardson_levels not in (1, 2, 3, 4):
            raise DomainError("richardson_levels must be in 1..4")

    def point_ok(self, abs_err: float, rel_err: float) -> bool:
        return abs_err <= self.abs_tol or rel_err <= self.rel_tol


@dataclass(frozen=True)
class IdentityReport:
    """Paired analytic/oracle comparison with per-point errors and a verdict."""

    label: str
    per_point: tuple[tuple[float, float, float, float, float], ...]
    # each entry: (key, analytic, oracle, abs_err, rel_err)
    max_abs_error: float
    max_rel_error: float
    passed: bool


def _rel_err(abs_err: float, reference: float) -> float:
    return abs_err / abs(reference) if reference != 0 else np.inf


def _build_report(label, keys, analytic, oracle_vals, tol: ToleranceSpec) -> IdentityReport:
    rows = []
    ok = True
    for k, a_val, o_val in zip(keys, analytic, oracle_vals):
        abs_err = abs(a_val - o_val)
        rel_err = _rel_err(abs_err, o_val)
        ok = ok and tol.point_ok(abs_err, rel_err)
        rows.append((float(k), float(a_val), float(o_val), abs_err, rel_err))
    max_abs = max((r[3] for r in rows), default=0.0)
    max_rel = max((r[4] for r in rows), default=0.0)
    return IdentityReport(label, tuple(rows), max_abs, max_rel, ok)


def lemma_recursion_rhs(P: OutputPMF, param: float, next_mass: float = 0.0) -> np.ndarray:
    """(1/param) * (y P(y) - (y+1) P(y+1)) per represented y.

    `next_mass` stands in for P(y_max+1), which the truncated pmf does not
    carry; it defaults to 0. The same recursion holds for both channel
    families with param = a or b.
    """
    if not param > 0:
        raise DomainError(f"param={param} must be strictly positive")
    m = np.append(P.array(), next_mass)
    y = np.arange(P.y_max + 1)
    return (y * m[:-1] - (y + 1) * m[1:]) / param


def mismatch_ratio_binomial(
    P_prior: DiscretePrior, Q_prior: DiscretePrior, ch: BinomialChannel, y: int
) -> float:
    """T(y) = (E_P[X|Y=y] - a) / (E_Q[X|Y=y] - a)."""
    if y < 1 or y > ch.n:
        raise DomainError(f"mismatch ratio needs 1 <= y <= n, got y={y}")
    return (posterior_mean(P_prior, ch, y) - ch.a) / (posterior_mean(Q_prior, ch, y) - ch.a)


def mismatch_ratio_negbinomial(
    P_prior: DiscretePrior, Q_prior: DiscretePrior, ch: NegBinomialChannel, y: int
) -> float:
    """T(y) = (E_P[X|Y=y] + b) / (E_Q[X|Y=y] + b)."""
    if y < 1:
        raise DomainError(f"mismatch ratio needs y >= 1, got y={y}")
    return (posterior_mean(P_prior, ch, y) + ch.b) / (posterior_mean(Q_prior, ch, y) + ch.b)


def theorem_rhs_binomial(
    P_prior: DiscretePrior, Q_prior: DiscretePrior, ch: BinomialChannel
) -> float:
    """sum_{y=1}^{n} P_Y(y) (y/a) g(T(y)); equals d/da of the output KL."""
    ch.check_compatible(Q_prior)
    P_Y = output_pmf_binomial(P_prior, ch)
    t = (posterior_means_upto(P_prior, ch, ch.n) - ch.a) / (
        posterior_means_upto(Q_prior, ch, ch.n) - ch.a
    )
    y = np.arange(1, ch.n + 1)
    return float(np.sum(P_Y.array()[1:] * (y / ch.a) * (t[1:] - 1.0 - np.log(t[1:]))))


def theorem_rhs_negbinomial(
    P_prior: DiscretePrior,
    Q_prior: DiscretePrior,
    ch: NegBinomialChannel,
    eps: float = 1e-12,
) -> float:
    """sum_{y>=1} P_Y(y) (y/b) g(T(y)), truncated once the remaining tail is
    negligible at scale eps relative to the accumulated sum."""
    ch.check_compatible(Q_prior)
    P_Y = output_pmf_negbinomial(P_prior, ch, eps)

    def block_terms(y_lo: int, y_hi: int, masses=None) -> float:
        ys = np.arange(y_lo, y_hi + 1)
        if masses is None:
            masses = negbinomial_masses_at(P_prior, ch, ys)
        ep = negbinomial_posterior_means_at(P_prior, ch, ys)
        eq = negbinomial_posterior_means_at(Q_prior, ch, ys)
        t = (ep + ch.b) / (eq + ch.b)
        return float(np.sum(masses * (ys / ch.b) * (t - 1.0 - np.log(t))))

    total = block_terms(1, P_Y.y_max, P_Y.array()[1:]) if P_Y.y_max >= 1 else 0.0
    # the pmf budget bounds the tail mass but not the y/b * g weight on it;
    # keep extending until a whole block is negligible against the total
    y_lo = P_Y.y_max + 1
    block = 256
    while True:
        contrib = block_terms(y_lo, y_lo + block - 1)
        total += contrib
        if abs(contrib) <= eps * max(abs(total), 1e-300) / 10.0:
            return total
        y_lo += block
        block = min(block * 2, 8192)


def _fd_config(tol: ToleranceSpec, domain_cap: float | None = None) -> DiffConfig:
    return DiffConfig(
        base_step=tol.fd_step_scale,
        richardson_levels=tol.richardson_levels,
        domain_cap=domain_cap,
    )


def _binomial_step_cap(prior: DiscretePrior, ch: BinomialChannel) -> float:
    # FD probes at a + h must stay compatible with the prior
    return (prior.min_support() - ch.a) / 4.0


def verify_lemma(
    prior: DiscretePrior,
    ch: Channel,
    tol: ToleranceSpec,
    eps: float = 1e-12,
) -> IdentityReport:
    """Compare the pmf recursion against central finite differences of each
    output mass with respect to the scaling parameter."""
    ch.check_compatible(prior)
    if isinstance(ch, BinomialChannel):
        baseline = output_pmf_binomial(prior, ch)
        analytic = lemma_recursion_rhs(baseline, ch.a)

        def masses_at(a):
            return output_pmf_binomial(prior, BinomialChannel(ch.n, a)).array()

        fd, _ = central_diff(masses_at, ch.a, _fd_config(tol, _binomial_step_cap(prior, ch)))
        label = f"lemma-binomial(n={ch.n}, a={ch.a})"
        param = ch.a
    else:
        baseline = output_pmf_negbinomial(prior, ch, eps)
        y_max = baseline.y_max
        # the endpoint term needs the exact mass just past the truncation;
        # dropping it biases the recursion at y_max by (y_max+1) P(y_max+1) / b
        next_mass = float(negbinomial_masses_at(prior, ch, np.array([y_max + 1]))[0])
        analytic = lemma_recursion_rhs(baseline, ch.b, next_mass)

        # fixed y range keeps the probed function smooth in b
        def masses_at(b):
            return negbinomial_masses_upto(prior, NegBinomialChannel(ch.r, b), y_max)

        fd, _ = central_diff(masses_at, ch.b, _fd_config(tol))
        label = f"lemma-negbinomial(r={ch.r}, b={ch.b})"
        param = ch.b

    keys = np.arange(len(analytic))
    return _build_report(label, keys, analytic, np.atleast_1d(fd), tol)


def verify_theorem(
    P_prior: DiscretePrior,
    Q_prior: DiscretePrior,
    ch: Channel,
    tol: ToleranceSpec,
    eps: float = 1e-12,
) -> IdentityReport:
    """Compare the theorem RHS against the finite-difference derivative of
    the output relative entropy in the scaling parameter."""
    ch.check_compatible(P_prior)
    ch.check_compatible(Q_prior)
    if isinstance(ch, BinomialChannel):
        analytic = theorem_rhs_binomial(P_prior, Q_prior, ch)
        cap = min(_binomial_step_cap(P_prior, ch), _binomial_step_cap(Q_prior, ch))

        def kl_at(a):
            c = BinomialChannel(ch.n, a)
            return kl_divergence(output_pmf_binomial(P_prior, c), output_pmf_binomial(Q_prior, c))

        fd, _ = central_diff(kl_at, ch.a, _fd_config(tol, cap))
        label = f"theorem-binomial(n={ch.n}, a={ch.a})"
    else:
        analytic = theorem_rhs_negbinomial(P_prior, Q_prior, ch, eps)
        # common fixed y range so the probed KL is smooth in b
        y_max = max(
            output_pmf_negbinomial(P_prior, ch, eps).y_max,
            output_pmf_negbinomial(Q_prior, ch, eps).y_max,
        )

        # log-domain masses: one law's tail may stay significant long after
        # the other's linear masses underflow, and those y still carry KL mass
        def kl_at(b):
            c = NegBinomialChannel(ch.r, b)
            lp = negbinomial_logmasses_upto(P_prior, c, y_max)
            lq = negbinomial_logmasses_upto(Q_prior, c, y_max)
            return float(np.sum(np.exp(lp) * (lp - lq)))

        fd, _ = central_diff(kl_at, ch.b, _fd_config(tol))
        label = f"theorem-negbinomial(r={ch.r}, b={ch.b})"

    return _build_report(label, [0.0], [analytic], [float(fd)], tol)
