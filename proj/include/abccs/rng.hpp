#pragma once

#include <cstdint>
#include <vector>

#include "abccs/matrix.hpp"

namespace abccs {

/// Reproducible random stream identified by (seed, stream_id). The generator
/// state is derived from both ids by integer mixing only, so a given pair
/// yields the same variate sequence on every platform and under any worker
/// partitioning. Substreams are addressed by offsetting stream_id.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Fresh stream (seed, stream_id + offset) starting from its initial state.
    RngStream substream(std::uint64_t offset) const { return RngStream(seed_, stream_id_ + offset); }

    std::uint64_t next_u64();
    /// Uniform on [0,1).
    double uniform();
    /// Uniform on (0,1]; safe under log().
    double uniform_open();
    /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal();
    /// Chi-squared with integer df >= 1 as a sum of squared normals.
    double chi_squared(unsigned df);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
};

std::vector<double> draw_normal(RngStream& rng, std::size_t n);
std::vector<double> draw_uniform(RngStream& rng, std::size_t n);

/// One multivariate normal draw location + L z, with L = cholesky(scale).
std::vector<double> draw_mv_normal(RngStream& rng, const std::vector<double>& location,
                                   const Matrix& scale_cholesky);

/// One multivariate Student-t draw: location + L z sqrt(df / chi2_df).
/// Integer df only; decomposition failure on scale_matrix propagates.
std::vector<double> draw_student_t(RngStream& rng, unsigned df,
                                   const std::vector<double>& location, const Matrix& scale_matrix);

/// Log density of the multivariate t used by the importance samplers.
double mv_student_t_logpdf(const std::vector<double>& x, unsigned df,
                           const std::vector<double>& location, const Matrix& scale_cholesky);

}  // namespace abccs
