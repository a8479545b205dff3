#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "abccs/models/normal_parabola.hpp"
#include "abccs/samplers.hpp"

namespace abccs {

struct ParamSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double median = 0.0;
    double q975 = 0.0;
};

struct PosteriorSummary {
    std::vector<ParamSummary> params;
    double ess = 0.0;
};

/// Weighted moments and weighted empirical quantiles; ESS = 1/sum(w^2).
PosteriorSummary summarize(const WeightedSample& sample, const std::vector<std::string>& names);

/// Weighted mean of one component and the Monte Carlo standard error of that
/// mean (sqrt(sum w_i^2 (x_i - mean)^2)).
std::pair<double, double> weighted_mean_se(const WeightedSample& sample, std::size_t component);

/// KL(reference || kde(sample[component])) on the reference grid. The sample
/// density is a Gaussian kernel estimate with Silverman's bandwidth computed
/// from the weighted draws, floored at 1e-12 before taking logs.
double kl_divergence_1d(const models::DensityTable& reference, const WeightedSample& sample,
                        std::size_t component = 0);

/// One method inside a study: produces a posterior sample for a given
/// observed dataset. The stream passed in is the method's private block.
using StudyMethod =
    std::function<WeightedSample(const Dataset& y_obs, const RngStream& rng)>;

struct StudyConfig {
    std::string model_name;
    std::vector<std::string> method_names;
    std::vector<StudyMethod> methods;
    std::size_t n_trials = 20;
    ParamVec true_theta;
    std::uint64_t seed = 1;
    std::function<Dataset(const ParamVec&, RngStream&)> simulate;
    std::size_t n_workers = 0;
};

struct StudyResult {
    struct Trial {
        std::uint64_t stream_base = 0;
        /// Posterior mean per method; empty on failure.
        std::vector<ParamVec> method_means;
        std::vector<std::string> errors;  // one per method, empty string = ok
    };
    std::vector<Trial> trials;
    std::vector<std::string> method_names;
    ParamVec true_theta;
    std::uint64_t seed = 0;
};

/// Replicated study: trial t simulates a fresh dataset from true_theta and
/// records each method's posterior mean. Trial t uses stream ids based at
/// t * 10^6; method k gets the sub-block starting at base + 1 + k * 124000.
/// A failing method is recorded with its error message, not fatal.
StudyResult run_study(const StudyConfig& config);

/// Per-method stream block inside one trial.
constexpr std::uint64_t kStudyTrialStride = 1000000;
constexpr std::uint64_t kStudyMethodStride = 124000;

struct ExtremalCurvePoint {
    double distance = 0.0;
    double mean = 0.0;
    double q025 = 0.0;
    double median = 0.0;
    double q975 = 0.0;
};

struct ExtremalCurve {
    std::vector<ExtremalCurvePoint> points;
    std::size_t skipped_draws = 0;  // non-positive-definite Sigma draws
};

/// delta(h) = 2 Phi(sqrt(h^T Sigma^{-1} h)/2) per draw, with pointwise
/// weighted 2.5/50/97.5% bands over the draws.
ExtremalCurve extremal_curve(const std::vector<Matrix>& sigma_draws,
                             const std::vector<double>& weights,
                             const std::vector<std::array<double, 2>>& h_values);

}  // namespace abccs
