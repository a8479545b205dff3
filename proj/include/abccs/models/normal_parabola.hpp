#pragma once

#include "abccs/model_spec.hpp"

namespace abccs::models {

/// N(theta, theta^2) sample of size n with theta > 0. The "composite"
/// likelihood is the full likelihood; everything is closed form.
struct NormalParabolaSpec {
    std::size_t n = 50;
    double prior_lo = 0.0;
    double prior_hi = 15.0;
};

double np_loglik(double theta, const Dataset& y);
double np_score(double theta, const Dataset& y);
/// Expected information i(theta) = 3n / theta^2.
double np_info(double theta, std::size_t n);
/// Positive root of the score equation.
double np_mle(const Dataset& y);

/// Minimal sufficient statistic t = (sum y, sum y^2).
std::vector<double> np_stat_t(const Dataset& y);
/// One-to-one transform t1 = (mean, sample standard deviation).
std::vector<double> np_stat_t1(const Dataset& y);
/// Rescaled score at the observed MLE: theta_hat * score(theta_hat; y) / sqrt(3n).
std::vector<double> np_stat_eta(const Dataset& y, double theta_hat_obs);

struct DensityTable {
    std::vector<double> grid;
    std::vector<double> density;  // normalized to integrate to 1 by trapezoid
};

/// Exact posterior on a uniform grid over the prior support.
DensityTable np_exact_posterior(const Dataset& y, const NormalParabolaSpec& spec,
                                std::size_t grid_size = 4096);

ModelSpec make_normal_parabola(const NormalParabolaSpec& spec);

}  // namespace abccs::models
