#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "abccs/matrix.hpp"
#include "abccs/rng.hpp"

namespace abccs {

/// A composite log-likelihood with dimension d and an optional closed-form
/// score. When the score is absent, callers fall back to central finite
/// differences of logcl.
struct CompositeLikelihood {
    std::function<double(const ParamVec&, const Dataset&)> logcl;
    std::function<ParamVec(const ParamVec&, const Dataset&)> score;  // optional (empty = none)
    std::size_t dim = 0;
};

/// Everything a sampler needs to know about a model: how to simulate, the
/// prior, the composite likelihood, and (when tractable) the full likelihood.
struct ModelSpec {
    std::string name;
    std::vector<std::string> param_names;

    std::function<Dataset(const ParamVec&, RngStream&)> simulate;
    std::function<bool(const ParamVec&)> in_support;
    /// Log prior density up to a constant; -inf outside support.
    std::function<double(const ParamVec&)> log_prior;
    /// Present only for proper, directly samplable priors.
    std::function<ParamVec(RngStream&)> sample_prior;

    CompositeLikelihood clik;
    /// Present only when the full likelihood is tractable.
    std::function<double(const ParamVec&, const Dataset&)> full_loglik;

    std::size_t dim() const { return param_names.size(); }
};

}  // namespace abccs
