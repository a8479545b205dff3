#include "abccs/rng.hpp"

#include <cmath>
#include <numbers>

#include "abccs/common.hpp"

namespace abccs {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t mix = seed;
    std::uint64_t salt = stream_id ^ 0xD1B54A32D192ED03ULL;
    // Fold the stream id into the seeding sequence so distinct ids give
    // decorrelated xoshiro256++ states.
    s_[0] = splitmix64(mix) ^ splitmix64(salt);
    s_[1] = splitmix64(mix) ^ splitmix64(salt);
    s_[2] = splitmix64(mix) ^ splitmix64(salt);
    s_[3] = splitmix64(mix) ^ splitmix64(salt);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::chi_squared(unsigned df) {
    if (df < 1) throw DomainError("chi_squared: df must be >= 1");
    double acc = 0.0;
    for (unsigned i = 0; i < df; ++i) {
        const double z = normal();
        acc += z * z;
    }
    return acc;
}

std::vector<double> draw_normal(RngStream& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal();
    return out;
}

std::vector<double> draw_uniform(RngStream& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.uniform();
    return out;
}

std::vector<double> draw_mv_normal(RngStream& rng, const std::vector<double>& location,
                                   const Matrix& scale_cholesky) {
    const std::size_t d = location.size();
    std::vector<double> z = draw_normal(rng, d);
    std::vector<double> out = location;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) out[i] += scale_cholesky(i, j) * z[j];
    return out;
}

std::vector<double> draw_student_t(RngStream& rng, unsigned df,
                                   const std::vector<double>& location,
                                   const Matrix& scale_matrix) {
    const Matrix L = cholesky(scale_matrix);
    std::vector<double> x = draw_mv_normal(rng, std::vector<double>(location.size(), 0.0), L);
    const double scale = std::sqrt(static_cast<double>(df) / rng.chi_squared(df));
    std::vector<double> out = location;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * x[i];
    return out;
}

double mv_student_t_logpdf(const std::vector<double>& x, unsigned df,
                           const std::vector<double>& location, const Matrix& scale_cholesky) {
    const std::size_t d = x.size();
    std::vector<double> diff(d);
    for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - location[i];
    const auto u = forward_subst(scale_cholesky, diff);
    double maha = 0.0;
    for (double v : u) maha += v * v;
    double logdet = 0.0;
    for (std::size_t i = 0; i < d; ++i) logdet += std::log(scale_cholesky(i, i));
    const double nu = static_cast<double>(df);
    return std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
           0.5 * d * std::log(nu * std::numbers::pi) - logdet -
           0.5 * (nu + d) * std::log1p(maha / nu);
}

}  // namespace abccs
