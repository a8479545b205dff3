#pragma once

#include "abccs/model_spec.hpp"

namespace abccs::models {

/// Equi-correlated q-variate normal, n independent clusters. Working
/// parameterization omega = (mu, tau, kappa) with
///   tau   = log sigma^2
///   kappa = logit({rho (q-1) + 1} / q),
/// which maps the support sigma^2 > 0, rho in (-1/(q-1), 1) onto R^3.
/// Independent N(0, 100) priors on each component.
struct EquicorrSpec {
    std::size_t n = 30;
    std::size_t q = 50;
    double prior_sd = 10.0;
};

/// (mu, tau, kappa) -> (mu, sigma^2, rho).
void eq_natural(const ParamVec& omega, std::size_t q, double& mu, double& sigma2, double& rho);
double eq_kappa_from_rho(double rho, std::size_t q);

struct EqStats {
    double ybar = 0.0;
    double ss_w = 0.0;  // within-cluster sum of squares
    double ss_b = 0.0;  // between-cluster sum of squares of cluster means
    std::size_t n = 0;
    std::size_t q = 0;
};
EqStats eq_stats(const Dataset& y);

/// Pairwise log-likelihood over unordered station pairs, additive constants
/// dropped. Depends on the data only through eq_stats.
double eq_pairwise_loglik(const ParamVec& omega, const Dataset& y);
ParamVec eq_pairwise_score(const ParamVec& omega, const Dataset& y);
double eq_full_loglik(const ParamVec& omega, const Dataset& y);

Dataset eq_simulate(const EquicorrSpec& spec, const ParamVec& omega, RngStream& rng);

/// ABC summary (ybar, sqrt(SS_B), sqrt(SS_W)).
std::vector<double> eq_suffstat(const Dataset& y);

/// Moment-based initialization for solve_mcle (ANOVA estimators mapped to omega).
ParamVec eq_moment_init(const Dataset& y);

ModelSpec make_equicorr(const EquicorrSpec& spec);

}  // namespace abccs::models
