#pragma once

#include <array>
#include <atomic>
#include <memory>

#include "abccs/model_spec.hpp"

namespace abccs::models {

/// Multivariate probit with cluster random effects: latent
/// S_ih = x_i beta + sigma U_i + e_ih, observed Y_ih = 1{S_ih > 0}.
/// Covariates are per-unit rows (constant across the q repeated measures),
/// theta = (beta..., log sigma^2), independent N(0, 100) priors.
struct ProbitSpec {
    std::size_t n = 30;
    std::size_t q = 10;
    Matrix design;  // n x p; column 0 is the intercept
    double prior_sd = 10.0;
    /// Count of pairwise cell probabilities floored at 1e-300.
    std::shared_ptr<std::atomic<std::size_t>> floor_count =
        std::make_shared<std::atomic<std::size_t>>(0);
};

/// Default design: intercept plus one uniform(-1,1) covariate per unit.
Matrix pr_default_design(std::size_t n, RngStream& rng);

Dataset pr_simulate(const ProbitSpec& spec, const ParamVec& theta, RngStream& rng);

/// Pairwise log-likelihood over the q(q-1)/2 within-cluster pairs. With
/// per-unit covariates all pairs in a cluster share the same marginal
/// probit mean, so the sum collapses to concordant/discordant pair counts.
double pr_pairwise_loglik(const ProbitSpec& spec, const ParamVec& theta, const Dataset& y);

/// Joint log-likelihood; defined for q = 2 only, where the single pair is
/// the full joint distribution.
double pr_full_loglik(const ProbitSpec& spec, const ParamVec& theta, const Dataset& y);

/// Counts at each time point h: sum_i y_ih, a q-vector.
std::vector<double> pr_count_summary(const Dataset& y);

/// Latent pair cell probabilities for marginal means gh, gk and latent
/// correlation rho; returned as {P11, P10, P01, P00}, floored at 1e-300.
std::array<double, 4> pr_cell_probs(double gh, double gk, double rho,
                                    std::size_t* floor_count = nullptr);

ParamVec pr_moment_init(const ProbitSpec& spec, const Dataset& y);

ModelSpec make_probit(const ProbitSpec& spec);

}  // namespace abccs::models
