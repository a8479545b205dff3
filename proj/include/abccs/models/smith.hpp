#pragma once

#include <array>
#include <atomic>
#include <memory>

#include "abccs/model_spec.hpp"

namespace abccs::models {

/// Gaussian-storm max-stable process observed as yearly maxima at q stations.
/// Margins are GEV with response surfaces mu_k = X_k b_mu, lambda_k = X_k b_lam,
/// X_k = (1, x_k, y_k), and a common shape xi. Dependence is governed by the
/// 2x2 storm covariance Sigma.
///
/// theta = (s11, s12, s22, b_mu0, b_mu1, b_mu2, b_lam0, b_lam1, b_lam2, xi).
struct SmithSpec {
    std::vector<std::array<double, 2>> stations;
    std::size_t n_years = 60;
    /// Prior box for the dependence parameters; beta components are flat on R
    /// and xi flat on (0, inf), all intersected with Sigma positive definite
    /// and lambda_k > 0 at every station.
    double s11_hi = 1000.0;
    double s12_lo = -300.0, s12_hi = 300.0;
    double s22_hi = 1000.0;
    /// Count of pairwise density terms floored at 1e-300.
    std::shared_ptr<std::atomic<std::size_t>> floor_count =
        std::make_shared<std::atomic<std::size_t>>(0);
};

constexpr std::size_t kSmithDim = 10;

Matrix sm_sigma(const ParamVec& theta);  // 2x2, throws if not positive definite
bool sm_sigma_pd(const ParamVec& theta);

/// a(h) = sqrt(h^T Sigma^{-1} h).
double sm_a(const std::array<double, 2>& h, const Matrix& sigma);

/// Bivariate CDF of the process on unit Frechet margins.
double sm_bvcdf(double z_k, double z_l, const std::array<double, 2>& h, const Matrix& sigma);

/// Extremal coefficient delta(h) = 2 Phi(a(h)/2), in [1, 2].
double sm_extremal_coeff(const std::array<double, 2>& h, const Matrix& sigma);

/// Station-k GEV parameters implied by theta; lambda_k <= 0 makes theta
/// unsupported.
void sm_margins(const SmithSpec& spec, const ParamVec& theta, std::vector<double>& mu,
                std::vector<double>& lambda, double& xi);

/// Pairwise log-likelihood over all station pairs and years on the observed
/// (GEV) scale; returns -inf when the GEV support condition fails at any
/// observation.
double sm_pairwise_loglik(const SmithSpec& spec, const ParamVec& theta, const Dataset& y);

/// Bivariate density on the unit Frechet scale (one pair, one year); exposed
/// for cross-checking against the mixed derivative of sm_bvcdf.
double sm_pair_density_frechet(double z_k, double z_l, const std::array<double, 2>& h,
                               const Matrix& sigma);

/// Exact simulation of the storm process on the station set (unit Frechet
/// margins), then transformed to the GEV margins implied by theta.
Dataset sm_simulate(const SmithSpec& spec, const ParamVec& theta, RngStream& rng);

/// Unit Frechet field only (one year), for simulator validation.
std::vector<double> sm_simulate_frechet(const std::vector<std::array<double, 2>>& stations,
                                        const Matrix& sigma, RngStream& rng);

/// GEV quantile transform of a unit Frechet value; |xi| < 1e-8 uses the
/// Gumbel limit y = mu + lambda log z.
double sm_gev_transform(double z, double mu, double lambda, double xi);

/// Probability-weighted-moment GEV fit of one station's maxima, for
/// initialization. Returns (mu, lambda, xi).
std::array<double, 3> sm_gev_pwm_fit(std::vector<double> sample);

/// Data-driven starting point for solve_mcle: per-station PWM fits, least
/// squares response surfaces, and a dependence fit from empirical extremal
/// coefficients.
ParamVec sm_moment_init(const SmithSpec& spec, const Dataset& y);

ModelSpec make_smith(const SmithSpec& spec);

}  // namespace abccs::models
