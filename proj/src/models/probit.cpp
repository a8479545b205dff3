#include "abccs/models/probit.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "abccs/normal.hpp"

namespace abccs::models {

namespace {

double linear_predictor(const Matrix& design, std::size_t i, const ParamVec& theta) {
    double acc = 0.0;
    for (std::size_t j = 0; j < design.cols(); ++j) acc += design(i, j) * theta[j];
    return acc;
}

void latent_scale(const ParamVec& theta, std::size_t p, double& sigma2, double& rho) {
    sigma2 = std::exp(theta[p]);
    rho = sigma2 / (1.0 + sigma2);
}

}  // namespace

Matrix pr_default_design(std::size_t n, RngStream& rng) {
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = 2.0 * rng.uniform() - 1.0;
    }
    return x;
}

Dataset pr_simulate(const ProbitSpec& spec, const ParamVec& theta, RngStream& rng) {
    const std::size_t p = spec.design.cols();
    const double sigma = std::sqrt(std::exp(theta[p]));
    Dataset y(spec.n, spec.q);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double xb = linear_predictor(spec.design, i, theta);
        const double u = rng.normal();
        for (std::size_t h = 0; h < spec.q; ++h)
            y(i, h) = (xb + sigma * u + rng.normal()) > 0.0 ? 1.0 : 0.0;
    }
    return y;
}

std::array<double, 4> pr_cell_probs(double gh, double gk, double rho, std::size_t* floor_count) {
    const double p11 = bvn_cdf(gh, gk, rho);
    const double ph = std_normal_cdf(gh), pk = std_normal_cdf(gk);
    std::array<double, 4> cells{p11, ph - p11, pk - p11, 1.0 - ph - pk + p11};
    for (auto& c : cells)
        if (c < 1e-300) {
            c = 1e-300;
            if (floor_count) ++*floor_count;
        }
    return cells;
}

double pr_pairwise_loglik(const ProbitSpec& spec, const ParamVec& theta, const Dataset& y) {
    const std::size_t p = spec.design.cols();
    double sigma2, rho;
    latent_scale(theta, p, sigma2, rho);
    const double denom = std::sqrt(1.0 + sigma2);
    const double q = static_cast<double>(spec.q);
    double ll = 0.0;
    std::size_t floors = 0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double g = linear_predictor(spec.design, i, theta) / denom;
        const auto cells = pr_cell_probs(g, g, rho, &floors);
        double c = 0.0;
        for (std::size_t h = 0; h < spec.q; ++h) c += y(i, h);
        // Same marginal mean for every measure in the cluster: the pair sum
        // reduces to counts of concordant and discordant pairs.
        ll += 0.5 * c * (c - 1.0) * std::log(cells[0]) +
              c * (q - c) * std::log(cells[1]) +
              0.5 * (q - c) * (q - c - 1.0) * std::log(cells[3]);
    }
    if (spec.floor_count) *spec.floor_count += floors;
    return ll;
}

double pr_full_loglik(const ProbitSpec& spec, const ParamVec& theta, const Dataset& y) {
    if (spec.q != 2)
        throw DomainError("probit full likelihood is only available for q = 2");
    const std::size_t p = spec.design.cols();
    double sigma2, rho;
    latent_scale(theta, p, sigma2, rho);
    const double denom = std::sqrt(1.0 + sigma2);
    double ll = 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double g = linear_predictor(spec.design, i, theta) / denom;
        const auto cells = pr_cell_probs(g, g, rho);
        const bool a = y(i, 0) > 0.5, b = y(i, 1) > 0.5;
        ll += std::log(cells[a && b ? 0 : (a ? 1 : (b ? 2 : 3))]);
    }
    return ll;
}

std::vector<double> pr_count_summary(const Dataset& y) {
    std::vector<double> counts(y.cols(), 0.0);
    for (std::size_t h = 0; h < y.cols(); ++h)
        for (std::size_t i = 0; i < y.rows(); ++i) counts[h] += y(i, h);
    return counts;
}

ParamVec pr_moment_init(const ProbitSpec& spec, const Dataset& y) {
    double pbar = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t h = 0; h < y.cols(); ++h) pbar += y(i, h);
    pbar /= static_cast<double>(y.rows() * y.cols());
    pbar = std::min(0.99, std::max(0.01, pbar));
    ParamVec init(spec.design.cols() + 1, 0.0);
    init[0] = std::sqrt(2.0) * std_normal_quantile(pbar);
    init[spec.design.cols()] = 0.0;
    return init;
}

ModelSpec make_probit(const ProbitSpec& spec) {
    if (spec.design.rows() != spec.n) throw ConfigError("probit: design rows != n");
    ModelSpec m;
    m.name = "probit";
    m.param_names.resize(spec.design.cols());
    for (std::size_t j = 0; j < spec.design.cols(); ++j)
        m.param_names[j] = "beta" + std::to_string(j);
    m.param_names.push_back("log_sigma2");

    m.simulate = [spec](const ParamVec& theta, RngStream& rng) {
        return pr_simulate(spec, theta, rng);
    };
    m.in_support = [](const ParamVec& theta) {
        for (double v : theta)
            if (!std::isfinite(v)) return false;
        return true;
    };
    const double prior_sd = spec.prior_sd;
    m.log_prior = [prior_sd](const ParamVec& theta) {
        double lp = 0.0;
        for (double v : theta) lp += -0.5 * v * v / (prior_sd * prior_sd);
        return lp;
    };
    m.sample_prior = [prior_sd, d = spec.design.cols() + 1](RngStream& rng) {
        ParamVec theta(d);
        for (auto& v : theta) v = prior_sd * rng.normal();
        return theta;
    };
    m.clik.dim = spec.design.cols() + 1;
    m.clik.logcl = [spec](const ParamVec& theta, const Dataset& y) {
        return pr_pairwise_loglik(spec, theta, y);
    };
    if (spec.q == 2)
        m.full_loglik = [spec](const ParamVec& theta, const Dataset& y) {
            return pr_full_loglik(spec, theta, y);
        };
    return m;
}

}  // namespace abccs::models
