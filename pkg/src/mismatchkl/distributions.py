"""Log-domain-stable priors, channel likelihoods, output pmfs and related scalars.

Everything here is exact finite-sum probability: a finite discrete prior is
pushed through a binomial or negative binomial channel and the resulting
output law, posterior mean and relative entropy are computed in the log
domain (log-sum-exp) so that binomial coefficients never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

# Relative margin required between min(support) and the binomial scaling
# parameter; the mismatch ratio divides by E_Q[X|Y] - a, which degenerates
# as the support approaches a.
COMPAT_MARGIN = 1e-9

NORMALIZATION_TOL = 1e-12


class DomainError(ValueError):
    """Input outside the model's admissible domain."""


class DegenerateConditioningError(DomainError):
    """Conditioning event has zero probability under the mixture."""


@dataclass(frozen=True)
class DiscretePrior:
    """Finite weighted support: P(X = support[i]) = weights[i]."""

    support: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        support = tuple(float(x) for x in self.support)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)
        if len(support) < 1:
            raise DomainError("support must contain at least one point")
        if len(support) != len(weights):
            raise DomainError("support and weights must have equal length")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise DomainError("support must be strictly increasing")
        if any(w <= 0 for w in weights):
            raise DomainError("weights must be strictly positive")
        if abs(math.fsum(weights) - 1.0) > NORMALIZATION_TOL:
            raise DomainError("weights must sum to 1 within 1e-12")

    @property
    def size(self) -> int:
        return len(self.support)

    def min_support(self) -> float:
        return self.support[0]

    def max_support(self) -> float:
        return self.support[-1]


@dataclass(frozen=True)
class BinomialChannel:
    """Y | X=x ~ Binomial(n, a/x); requires x > a so a/x lies in (0,1)."""

    n: int
    a: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a", float(self.a))
        if not self.a > 0:
            raise DomainError("a must be strictly positive")

    def check_compatible(self, prior: DiscretePrior) -> None:
        if prior.min_support() - self.a < COMPAT_MARGIN * self.a:
            raise DomainError(
                f"min(support)={prior.min_support()} too close to a={self.a}: "
                f"requires min(support) - a >= {COMPAT_MARGIN}*a"
            )


@dataclass(frozen=True)
class NegBinomialChannel:
    """Y | X=x counts successes before the r-th failure, success prob b/(b+x)."""

    r: int
    b: float

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise DomainError("r must be an integer >= 1")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "b", float(self.b))
        if not self.b > 0:
            raise DomainError("b must be strictly positive")

    def check_compatible(self, prior: DiscretePrior) -> None:
        if not prior.min_support() > 0:
            raise DomainError("negative binomial channel requires min(support) > 0")


Channel = BinomialChannel | NegBinomialChannel


@dataclass(frozen=True)
class OutputPMF:
    """Output law over y = 0..y_max; tail_mass is the certified truncated mass."""

    masses: tuple[float, ...]
    tail_mass: float
    family_tag: str
    params: tuple[float, ...]  # (n, a) or (r, b)

    def __post_init__(self):
        masses = tuple(float(m) for m in self.masses)
        object.__setattr__(self, "masses", masses)
        if any(m <= 0 for m in masses):
            raise DomainError("every represented output mass must be machine-positive")
        if self.tail_mass < 0:
            raise DomainError("tail_mass must be nonnegative")
        total = math.fsum(masses) + self.tail_mass
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"masses + tail_mass = {total}, not 1 within 1e-12")

    @property
    def y_max(self) -> int:
        return len(self.masses) - 1

    def array(self) -> np.ndarray:
        return np.asarray(self.masses)


def log_binomial_coeff(n: int, k: int) -> float:
    """ln C(n, k) via log-gamma."""
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"require 0 <= k <= n, got n={n}, k={k}")
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def binomial_loglik(ch: BinomialChannel, x: float, y: int) -> float:
    """ln P(Y=y | X=x) for the binomial channel, in nats."""
    if not x > ch.a:
        raise DomainError(f"x={x} must exceed a={ch.a}")
    if y < 0 or y > ch.n:
        raise DomainError(f"y={y} outside {{0..{ch.n}}}")
    p = ch.a / x
    return log_binomial_coeff(ch.n, y) + y * math.log(p) + (ch.n - y) * math.log1p(-p)


def negbinomial_loglik(ch: NegBinomialChannel, x: float, y: int) -> float:
    """ln P(Y=y | X=x) for the negative binomial channel, in nats."""
    if not x > 0:
        raise DomainError(f"x={x} must be strictly positive")
    if y < 0:
        raise DomainError(f"y={y} must be nonnegative")
    return (
        log_binomial_coeff(y + ch.r - 1, y)
        + ch.r * math.log(x / (ch.b + x))
        + y * math.log(ch.b / (ch.b + x))
    )


def _binomial_logmass_matrix(prior: DiscretePrior, ch: BinomialChannel) -> np.ndarray:
    """(n+1, k) matrix of log[w_i * L(y | x_i)]."""
    x = np.asarray(prior.support)
    log_w = np.log(prior.weights)
    y = np.arange(ch.n + 1)[:, None]
    p = ch.a / x[None, :]
    log_coeff = (gammaln(ch.n + 1) - gammaln(y + 1) - gammaln(ch.n - y + 1))
    return log_w[None, :] + log_coeff + y * np.log(p) + (ch.n - y) * np.log1p(-p)


def _negbinomial_logmass_block(
    prior: DiscretePrior, ch: NegBinomialChannel, ys: np.ndarray
) -> np.ndarray:
    """(len(ys), k) matrix of log[w_i * L(y | x_i)] for the given y values."""
    x = np.asarray(prior.support)
    log_w = np.log(prior.weights)
    ys = ys[:, None]
    log_coeff = gammaln(ys + ch.r) - gammaln(ys + 1) - gammaln(ch.r)
    log_pr = ch.r * np.log(x / (ch.b + x))
    log_q = np.log(ch.b / (ch.b + x))
    return log_w[None, :] + log_coeff + log_pr[None, :] + ys * log_q[None, :]


def output_pmf_binomial(prior: DiscretePrior, ch: BinomialChannel) -> OutputPMF:
    """Exact mixture output law over y = 0..n; tail_mass is 0."""
    ch.check_compatible(prior)
    log_m = logsumexp(_binomial_logmass_matrix(prior, ch), axis=1)
    masses = np.exp(log_m)
    return OutputPMF(tuple(masses), 0.0, "binomial", (ch.n, ch.a))


def negbinomial_masses_upto(
    prior: DiscretePrior, ch: NegBinomialChannel, y_max: int
) -> np.ndarray:
    """Exact mixture masses for y = 0..y_max (no truncation bookkeeping)."""
    ch.check_compatible(prior)
    ys = np.arange(y_max + 1)
    return np.exp(logsumexp(_negbinomial_logmass_block(prior, ch, ys), axis=1))


def negbinomial_logmasses_upto(
    prior: DiscretePrior, ch: NegBinomialChannel, y_max: int
) -> np.ndarray:
    """Exact log mixture masses for y = 0..y_max.

    Stays finite far past the point where the linear-domain masses
    underflow, which matters when one output law has a much heavier
    tail than the other.
    """
    ch.check_compatible(prior)
    ys = np.arange(y_max + 1)
    return logsumexp(_negbinomial_logmass_block(prior, ch, ys), axis=1)


def negbinomial_masses_at(
    prior: DiscretePrior, ch: NegBinomialChannel, ys: np.ndarray
) -> np.ndarray:
    """Exact mixture masses at arbitrary y values."""
    ch.check_compatible(prior)
    return np.exp(logsumexp(_negbinomial_logmass_block(prior, ch, np.asarray(ys)), axis=1))


def negbinomial_posterior_means_at(
    prior: DiscretePrior, ch: NegBinomialChannel, ys: np.ndarray
) -> np.ndarray:
    """E[X | Y=y] at arbitrary y values, vectorized."""
    ch.check_compatible(prior)
    log_terms = _negbinomial_logmass_block(prior, ch, np.asarray(ys))
    log_total = logsumexp(log_terms, axis=1, keepdims=True)
    if not np.all(np.isfinite(log_total)):
        raise DegenerateConditioningError("zero mixture mass at some y")
    return np.exp(log_terms - log_total) @ np.asarray(prior.support)


def output_pmf_negbinomial(
    prior: DiscretePrior, ch: NegBinomialChannel, eps: float = 1e-12
) -> OutputPMF:
    """Truncated mixture output law: smallest y_max with cumulative mass >= 1 - eps."""
    ch.check_compatible(prior)
    if not 0 < eps < 1:
        raise DomainError(f"truncation budget eps={eps} must lie in (0,1)")
    # Accumulate in blocks; the mixture tail decays geometrically so this
    # terminates. Cumulative mass is re-summed with fsum so the truncation
    # decision is not polluted by long-cumsum rounding.
    acc: list[float] = []
    start = 0
    block = 256
    cum = 0.0
    while True:
        ys = np.arange(start, start + block)
        masses = np.exp(logsumexp(_negbinomial_logmass_block(prior, ch, ys), axis=1))
        acc.extend(masses.tolist())
        prev = cum
        cum = math.fsum(acc)
        if 1.0 - cum <= eps:
            break
        if cum == prev:
            # budget below the resolution of the computed mixture: the
            # cumulative has stagnated, so the remaining true tail is
            # negligible against accumulated roundoff; stop best-effort
            break
        start += block
        block = min(block * 2, 8192)
    # trim to the smallest y_max still meeting the budget; tail(cut) is
    # reconstructed from the full fsum plus a suffix sum of tiny terms
    arr = np.asarray(acc)
    base_tail = 1.0 - math.fsum(acc)
    suffix = np.concatenate([np.cumsum(arr[::-1])[::-1][1:], [0.0]])
    tails = base_tail + suffix
    hits = np.nonzero(tails <= eps)[0]
    cut = int(hits[0]) + 1 if hits.size else len(acc)
    acc = acc[:cut]
    tail = max(1.0 - math.fsum(acc), 0.0)
    return OutputPMF(tuple(acc), tail, "negbinomial", (ch.r, ch.b))


def output_pmf(prior: DiscretePrior, ch: Channel, eps: float = 1e-12) -> OutputPMF:
    if isinstance(ch, BinomialChannel):
        return output_pmf_binomial(prior, ch)
    return output_pmf_negbinomial(prior, ch, eps)


def _loglik_vector(prior: DiscretePrior, ch: Channel, y: int) -> np.ndarray:
    if isinstance(ch, BinomialChannel):
        if y < 0 or y > ch.n:
            raise DomainError(f"y={y} outside {{0..{ch.n}}}")
        return _binomial_logmass_matrix(prior, ch)[y] - np.log(prior.weights)
    if y < 0:
        raise DomainError(f"y={y} must be nonnegative")
    return _negbinomial_logmass_block(prior, ch, np.array([y]))[0] - np.log(prior.weights)


def posterior_mean(prior: DiscretePrior, ch: Channel, y: int) -> float:
    """E[X | Y=y] under the prior, computed in the log domain."""
    ch.check_compatible(prior)
    log_terms = np.log(prior.weights) + _loglik_vector(prior, ch, y)
    log_total = logsumexp(log_terms)
    if not np.isfinite(log_total):
        raise DegenerateConditioningError(f"zero mixture mass at y={y}")
    post = np.exp(log_terms - log_total)
    return float(np.dot(post, prior.support))


def posterior_means_upto(prior: DiscretePrior, ch: Channel, y_hi: int) -> np.ndarray:
    """E[X | Y=y] for y = 0..y_hi in one vectorized pass."""
    ch.check_compatible(prior)
    if isinstance(ch, BinomialChannel):
        if y_hi > ch.n:
            raise DomainError(f"y_hi={y_hi} exceeds n={ch.n}")
        log_terms = _binomial_logmass_matrix(prior, ch)[: y_hi + 1]
    else:
        log_terms = _negbinomial_logmass_block(prior, ch, np.arange(y_hi + 1))
    log_total = logsumexp(log_terms, axis=1, keepdims=True)
    if not np.all(np.isfinite(log_total)):
        raise DegenerateConditioningError("zero mixture mass at some y")
    post = np.exp(log_terms - log_total)
    return post @ np.asarray(prior.support)


def g(t: float) -> float:
    """t - 1 - ln t: nonnegative, zero iff t = 1."""
    if not t > 0:
        raise DomainError(f"g requires t > 0, got {t}")
    return t - 1.0 - math.log(t)


def kl_divergence(P: OutputPMF, Q: OutputPMF) -> float:
    """Sum_y P(y) ln(P(y)/Q(y)) over the common represented range, in nats.

    Returns math.inf when some represented y has P(y) > 0 and Q(y) = 0;
    both masses zero contributes 0 (the 0*ln(0/0) convention).
    """
    if P.family_tag != Q.family_tag or P.params != Q.params:
        raise DomainError(
            f"family/parameter mismatch: {P.family_tag}{P.params} vs {Q.family_tag}{Q.params}"
        )
    m = min(len(P.masses), len(Q.masses))
    p = P.array()[:m]
    q = Q.array()[:m]
    if np.any((p > 0) & (q == 0)):
        return math.inf
    live = p > 0
    return float(np.sum(p[live] * (np.log(p[live]) - np.log(q[live]))))
