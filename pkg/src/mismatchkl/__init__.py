"""Relative-entropy derivative identities for binomial and negative binomial
channels under mismatched priors, with independent numerical oracles."""

from .distributions import (
    BinomialChannel,
    DegenerateConditioningError,
    DiscretePrior,
    DomainError,
    NegBinomialChannel,
    OutputPMF,
    binomial_loglik,
    g,
    kl_divergence,
    log_binomial_coeff,
    negbinomial_loglik,
    output_pmf,
    output_pmf_binomial,
    output_pmf_negbinomial,
    posterior_mean,
    posterior_means_upto,
)
from .identities import (
    IdentityReport,
    ToleranceSpec,
    lemma_recursion_rhs,
    mismatch_ratio_binomial,
    mismatch_ratio_negbinomial,
    theorem_rhs_binomial,
    theorem_rhs_negbinomial,
    verify_lemma,
    verify_theorem,
)
from .oracle import (
    DiffConfig,
    InsufficientConditioningError,
    MCConfig,
    central_diff,
    divergence_curve,
    mc_posterior_mean,
)

__all__ = [
    "BinomialChannel",
    "DegenerateConditioningError",
    "DiffConfig",
    "DiscretePrior",
    "DomainError",
    "IdentityReport",
    "InsufficientConditioningError",
    "MCConfig",
    "NegBinomialChannel",
    "OutputPMF",
    "ToleranceSpec",
    "binomial_loglik",
    "central_diff",
    "divergence_curve",
    "g",
    "kl_divergence",
    "lemma_recursion_rhs",
    "log_binomial_coeff",
    "mc_posterior_mean",
    "mismatch_ratio_binomial",
    "mismatch_ratio_negbinomial",
    "negbinomial_loglik",
    "output_pmf",
    "output_pmf_binomial",
    "output_pmf_negbinomial",
    "posterior_mean",
    "posterior_means_upto",
    "theorem_rhs_binomial",
    "theorem_rhs_negbinomial",
    "verify_lemma",
    "verify_theorem",
]

__version__ = "0.1.0"
