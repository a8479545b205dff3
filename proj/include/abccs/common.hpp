#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace abccs {

/// Dense real parameter vector. Component names live in the owning ModelSpec.
using ParamVec = std::vector<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// Cholesky (or LU) factorization hit a non-positive pivot.
struct DecompositionError : Error {
    DecompositionError(const std::string& msg, std::size_t pivot_index)
        : Error(msg), pivot(pivot_index) {}
    std::size_t pivot;
};

/// A function evaluation produced a non-finite value where a finite one was required.
struct EvaluationError : Error {
    EvaluationError(const std::string& msg, std::size_t coordinate_index)
        : Error(msg), coordinate(coordinate_index) {}
    std::size_t coordinate;
};

/// Iterative solver exhausted its budget; carries the best iterate seen.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, ParamVec best_iterate, double best_score_norm)
        : Error(msg), best(std::move(best_iterate)), score_norm(best_score_norm) {}
    ParamVec best;
    double score_norm;
};

/// Monte Carlo estimation failed (e.g. J not positive definite at this R).
struct EstimationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct EmptySampleError : Error {
    using Error::Error;
};

}  // namespace abccs
