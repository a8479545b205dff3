#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abccs/common.hpp"

#include <nlohmann/json_fwd.hpp>

namespace abccs {

enum class ModelKind { normal_parabola, equicorr, probit, smith };
enum class MethodKind {
    abc_cs,
    abc_suffstat,
    abc_counts,
    pairwise_mcmc,
    calibrated_pairwise_mcmc,
    full_mcmc
};

std::string to_string(ModelKind m);
std::string to_string(MethodKind m);

struct SamplerConfig {
    std::string kind = "auto";  // auto | reject | importance
    std::size_t n_proposals = 100000;
    double alpha = 0.001;
    unsigned proposal_df = 5;
    double proposal_scale_multiplier = 5.0;
    std::size_t mcmc_iterations = 30000;
    std::size_t mcmc_burn_in = 5000;
    double mcmc_scale_multiplier = 1.0;  // times (2.38^2/d) V(mcle)
    std::size_t resample_to = 0;         // 0 keeps importance weights
};

struct ParabolaParams {
    std::size_t n = 50;
    double theta_true = 5.0;
    double prior_lo = 0.0;
    double prior_hi = 15.0;
    std::string suffstat = "t1";  // t | t1, used by abc-suffstat
};

struct EquicorrParams {
    std::size_t n = 30;
    std::size_t q = 50;
    ParamVec theta_true{0.0, 0.0, 0.04};  // (mu, tau, kappa)
};

struct ProbitParams {
    std::size_t n = 30;
    std::size_t q = 10;
    ParamVec theta_true{0.5, 1.5, 0.0};  // (beta0, beta1, log sigma2)
};

struct SmithParams {
    // Synthetic grid (used when the CSV paths are empty).
    std::size_t grid_nx = 3;
    std::size_t grid_ny = 3;
    double grid_spacing = 40.0;
    std::size_t n_years = 60;
    ParamVec theta_true{300.0, 70.0, 200.0, 30.0, 0.05, -0.1, 10.0, 0.02, -0.02, 0.15};
    std::string stations_csv;
    std::string maxima_csv;
};

struct RunConfig {
    ModelKind model = ModelKind::normal_parabola;
    MethodKind method = MethodKind::abc_cs;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::size_t godambe_replications = 1000;
    std::size_t workers = 0;

    SamplerConfig sampler;
    ParabolaParams parabola;
    EquicorrParams equicorr;
    ProbitParams probit;
    SmithParams smith;

    /// Normalized snapshot of the parsed configuration.
    std::string snapshot_json;
};

struct StudyConfigFile {
    ModelKind model = ModelKind::normal_parabola;
    std::vector<MethodKind> methods;
    std::size_t n_trials = 20;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::size_t godambe_replications = 300;
    std::size_t workers = 0;
    SamplerConfig sampler;
    ParabolaParams parabola;
    EquicorrParams equicorr;
    ProbitParams probit;
    SmithParams smith;
    ParamVec true_theta;  // defaults to the model's theta_true
    std::string snapshot_json;
};

/// Parse and validate a run configuration. Unknown keys, malformed values and
/// support-inconsistent parameters raise ConfigError with the offending key
/// path.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);

StudyConfigFile parse_study_config(const std::string& path);
StudyConfigFile parse_study_config_json(const nlohmann::json& j);

}  // namespace abccs
