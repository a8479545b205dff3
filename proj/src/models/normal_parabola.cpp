#include "abccs/models/normal_parabola.hpp"

#include <cmath>
#include <limits>

namespace abccs::models {

namespace {

void sums(const Dataset& y, double& s1, double& s2) {
    s1 = 0.0;
    s2 = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        s1 += y(i, 0);
        s2 += y(i, 0) * y(i, 0);
    }
}

}  // namespace

double np_loglik(double theta, const Dataset& y) {
    if (!(theta > 0.0)) throw DomainError("normal parabola: theta must be > 0");
    double s1, s2;
    sums(y, s1, s2);
    const double n = static_cast<double>(y.rows());
    return s1 / theta - 0.5 * s2 / (theta * theta) - n * std::log(theta);
}

double np_score(double theta, const Dataset& y) {
    if (!(theta > 0.0)) throw DomainError("normal parabola: theta must be > 0");
    double s1, s2;
    sums(y, s1, s2);
    const double n = static_cast<double>(y.rows());
    return -s1 / (theta * theta) + s2 / (theta * theta * theta) - n / theta;
}

double np_info(double theta, std::size_t n) {
    if (!(theta > 0.0)) throw DomainError("normal parabola: theta must be > 0");
    return 3.0 * static_cast<double>(n) / (theta * theta);
}

double np_mle(const Dataset& y) {
    double s1, s2;
    sums(y, s1, s2);
    const double n = static_cast<double>(y.rows());
    return (-s1 + std::sqrt(s1 * s1 + 4.0 * n * s2)) / (2.0 * n);
}

std::vector<double> np_stat_t(const Dataset& y) {
    double s1, s2;
    sums(y, s1, s2);
    return {s1, s2};
}

std::vector<double> np_stat_t1(const Dataset& y) {
    double s1, s2;
    sums(y, s1, s2);
    const double n = static_cast<double>(y.rows());
    const double mean = s1 / n;
    const double ss = std::max(0.0, s2 - n * mean * mean);
    const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, sd};
}

std::vector<double> np_stat_eta(const Dataset& y, double theta_hat_obs) {
    return {theta_hat_obs * np_score(theta_hat_obs, y) /
            std::sqrt(3.0 * static_cast<double>(y.rows()))};
}

DensityTable np_exact_posterior(const Dataset& y, const NormalParabolaSpec& spec,
                                std::size_t grid_size) {
    DensityTable table;
    table.grid.resize(grid_size);
    table.density.resize(grid_size);
    const double lo = spec.prior_lo, hi = spec.prior_hi;
    const double dx = (hi - lo) / static_cast<double>(grid_size - 1);
    double max_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> ll(grid_size, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double theta = lo + dx * static_cast<double>(i);
        table.grid[i] = theta;
        if (theta > 0.0) {
            ll[i] = np_loglik(theta, y);
            max_ll = std::max(max_ll, ll[i]);
        }
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) {
        table.density[i] = std::isfinite(ll[i]) ? std::exp(ll[i] - max_ll) : 0.0;
        const double w = (i == 0 || i + 1 == grid_size) ? 0.5 : 1.0;
        mass += w * table.density[i] * dx;
    }
    for (double& v : table.density) v /= mass;
    return table;
}

ModelSpec make_normal_parabola(const NormalParabolaSpec& spec) {
    ModelSpec m;
    m.name = "normal-parabola";
    m.param_names = {"theta"};
    m.simulate = [spec](const ParamVec& theta, RngStream& rng) {
        if (!(theta[0] > 0.0)) throw DomainError("normal parabola: theta must be > 0");
        Dataset y(spec.n, 1);
        for (std::size_t i = 0; i < spec.n; ++i) y(i, 0) = theta[0] * (1.0 + rng.normal());
        return y;
    };
    m.in_support = [spec](const ParamVec& theta) {
        return theta[0] > spec.prior_lo && theta[0] < spec.prior_hi && theta[0] > 0.0;
    };
    m.log_prior = [spec, support = m.in_support](const ParamVec& theta) {
        return support(theta) ? -std::log(spec.prior_hi - spec.prior_lo)
                              : -std::numeric_limits<double>::infinity();
    };
    m.sample_prior = [spec](RngStream& rng) {
        return ParamVec{spec.prior_lo + (spec.prior_hi - spec.prior_lo) * rng.uniform()};
    };
    m.clik.dim = 1;
    m.clik.logcl = [](const ParamVec& theta, const Dataset& y) { return np_loglik(theta[0], y); };
    m.clik.score = [](const ParamVec& theta, const Dataset& y) {
        return ParamVec{np_score(theta[0], y)};
    };
    m.full_loglik = m.clik.logcl;
    return m;
}

}  // namespace abccs::models
