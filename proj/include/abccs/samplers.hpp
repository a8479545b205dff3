#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "abccs/model_spec.hpp"

namespace abccs {

/// Posterior draws with normalized importance weights and the bookkeeping
/// needed to reproduce the run.
struct WeightedSample {
    Matrix draws;                 // m x d
    std::vector<double> weights;  // non-negative, sum to 1
    struct Meta {
        std::uint64_t seed = 0;
        double epsilon = 0.0;
        double alpha = 0.0;
        std::size_t n_proposals = 0;
        double acceptance_rate = 0.0;
        std::size_t n_summary_failures = 0;
    } meta;

    std::size_t size() const { return draws.rows(); }
    std::size_t dim() const { return draws.cols(); }
};

enum class DistanceKind { euclidean, l1 };

/// Distance between summary vectors; euclidean optionally weighted by a
/// symmetric positive definite precision matrix.
struct DistanceSpec {
    DistanceKind kind = DistanceKind::euclidean;
    std::optional<Matrix> precision_matrix;
};

double distance(const std::vector<double>& a, const std::vector<double>& b,
                const DistanceSpec& spec);

/// Lower empirical alpha-quantile of the finite entries: the ceil(alpha*N)-th
/// smallest, N counting finite values only. Throws if no finite value exists.
double select_epsilon(const std::vector<double>& distances, double alpha);

using SummaryFn = std::function<std::vector<double>(const Dataset&)>;
using PriorSampler = std::function<ParamVec(RngStream&)>;
using LogDensity = std::function<double(const ParamVec&)>;

/// ABC accept-reject: propose from the prior, simulate, keep proposals whose
/// summary lands within the alpha-quantile distance of the observed summary.
/// Proposal i uses rng.substream(i); a summary failure on a simulated dataset
/// scores an infinite distance and is counted in meta.
WeightedSample abc_reject(const PriorSampler& prior_sampler, const ModelSpec& model,
                          const SummaryFn& summary, const DistanceSpec& dist,
                          const std::vector<double>& target_obs, std::size_t n_proposals,
                          double alpha, const RngStream& rng, std::size_t n_workers = 0);

struct TProposal {
    unsigned df = 5;
    ParamVec location;
    Matrix scale_matrix;
};

/// ABC with a multivariate-t importance proposal. Out-of-support proposals are
/// zero-weighted and excluded from the epsilon quantile; accepted draws carry
/// weights proportional to prior(theta)/proposal(theta).
WeightedSample abc_importance(const TProposal& proposal, const LogDensity& log_prior,
                              const ModelSpec& model, const SummaryFn& summary,
                              const DistanceSpec& dist, const std::vector<double>& target_obs,
                              std::size_t n_proposals, double alpha, const RngStream& rng,
                              std::size_t n_workers = 0);

/// Multinomial resampling with replacement; output is equal-weight.
WeightedSample resample(const WeightedSample& ws, std::size_t m_out, RngStream& rng);

/// Random-walk Metropolis with Gaussian proposals of covariance
/// proposal_scale. Records the post-burn-in chain with equal weights.
WeightedSample rw_metropolis(const LogDensity& log_target, const ParamVec& init,
                             const Matrix& proposal_scale, std::size_t n_iter,
                             std::size_t burn_in, RngStream& rng);

}  // namespace abccs
