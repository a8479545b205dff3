#pragma once

#include <cstddef>

#include "abccs/model_spec.hpp"

namespace abccs {

/// Monte Carlo estimate of the sensitivity matrix H, the variability matrix J,
/// and everything derived from them at a fixed evaluation point theta
/// (normally the observed maximum composite likelihood estimate).
///
///   G   = H J^{-1} H        (Godambe information)
///   V   = G^{-1} = H^{-1} J H^{-1}
///   B_c = cholesky(J), so J = B_c B_c^T
///   omega_bar = trace(J H^{-1}) / d
struct GodambeEstimate {
    ParamVec theta;
    Matrix H;
    Matrix J;
    Matrix G;
    Matrix V;
    Matrix B_c;
    double omega_bar = 0.0;
    std::size_t replications = 0;

    // Per-entry Monte Carlo standard errors, plus a batch-means standard
    // error for omega_bar and for the relative Frobenius gap ||H - J||_F/||J||_F.
    Matrix mc_se_H;
    Matrix mc_se_J;
    double omega_bar_se = 0.0;
    double hj_gap = 0.0;
    double hj_gap_se = 0.0;
};

/// Composite score at theta: the closed form when the likelihood carries one,
/// otherwise central finite differences with per-coordinate step
/// h_j = 1e-5 * max(1, |theta_j|). A non-finite logcl anywhere in the stencil
/// raises EvaluationError naming the offending coordinate.
ParamVec composite_score(const CompositeLikelihood& cl, const ParamVec& theta, const Dataset& y);

/// Step used by the finite-difference stencils.
double fd_step(double theta_j);

struct McleOptions {
    std::size_t max_evaluations = 5000;
    double tol_factor = 1e-6;  // target: ||score||_inf < tol_factor * (1 + ||score(init)||_inf)
    double simplex_step = 0.1;
};

/// Maximum composite likelihood estimate: Nelder-Mead simplex on -logcl,
/// refined by damped Newton steps on the score. Throws ConvergenceError
/// (carrying the best iterate) if the budget runs out first.
ParamVec solve_mcle(const CompositeLikelihood& cl, const Dataset& y, const ParamVec& init,
                    const std::function<bool(const ParamVec&)>& in_support = nullptr,
                    const McleOptions& options = {});

/// Monte Carlo estimate of H and J at theta from R >= 100 simulated datasets:
/// J is the empirical covariance of the simulated scores, H the negated mean
/// of per-replicate finite-difference score Jacobians (symmetrized). Replicate
/// r uses rng.substream(r), so the result is independent of worker scheduling.
GodambeEstimate estimate_HJ(const ModelSpec& model, const CompositeLikelihood& cl,
                            const ParamVec& theta, std::size_t R, const RngStream& rng,
                            std::size_t n_workers = 0);

/// Rescaled composite score eta_c = B_c^{-1} score(theta; y).
ParamVec rescaled_score(const GodambeEstimate& est, const CompositeLikelihood& cl,
                        const Dataset& y);

/// Adjusted score g = H J^{-1} score(theta; y).
ParamVec adjusted_score(const GodambeEstimate& est, const CompositeLikelihood& cl,
                        const Dataset& y);

/// B_g^{-1} g with B_g = H (B_c^T)^{-1}; algebraically equal to eta_c and kept
/// as an explicit second route for verification.
ParamVec rescaled_adjusted_score(const GodambeEstimate& est, const CompositeLikelihood& cl,
                                 const Dataset& y);

/// omega_bar = trace(J H^{-1}) / d.
double calibration_weight(const GodambeEstimate& est);

}  // namespace abccs
