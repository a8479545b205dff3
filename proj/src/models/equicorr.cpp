#include "abccs/models/equicorr.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace abccs::models {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Natural {
    double mu, sigma2, rho;
    double q;  // as double, for the formulas
};

Natural to_natural(const ParamVec& omega, std::size_t q) {
    Natural nat;
    nat.q = static_cast<double>(q);
    nat.mu = omega[0];
    nat.sigma2 = std::exp(omega[1]);
    nat.rho = (nat.q * sigmoid(omega[2]) - 1.0) / (nat.q - 1.0);
    return nat;
}

}  // namespace

void eq_natural(const ParamVec& omega, std::size_t q, double& mu, double& sigma2, double& rho) {
    const Natural nat = to_natural(omega, q);
    mu = nat.mu;
    sigma2 = nat.sigma2;
    rho = nat.rho;
}

double eq_kappa_from_rho(double rho, std::size_t q) {
    const double qd = static_cast<double>(q);
    const double u = (rho * (qd - 1.0) + 1.0) / qd;
    if (!(u > 0.0 && u < 1.0)) throw DomainError("equicorr: rho outside (-1/(q-1), 1)");
    return std::log(u / (1.0 - u));
}

EqStats eq_stats(const Dataset& y) {
    EqStats st;
    st.n = y.rows();
    st.q = y.cols();
    const double n = static_cast<double>(st.n), q = static_cast<double>(st.q);
    std::vector<double> cluster_mean(st.n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < st.n; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < st.q; ++r) s += y(i, r);
        cluster_mean[i] = s / q;
        total += s;
    }
    st.ybar = total / (n * q);
    for (std::size_t i = 0; i < st.n; ++i) {
        for (std::size_t r = 0; r < st.q; ++r) {
            const double d = y(i, r) - cluster_mean[i];
            st.ss_w += d * d;
        }
        const double b = cluster_mean[i] - st.ybar;
        st.ss_b += b * b;
    }
    return st;
}

namespace {

// Pairwise log-likelihood in the natural parameterization, written directly
// in terms of (ybar, SS_B, SS_W):
//   -A log s2 - (A/2) log(1-r^2) - (q-1+r) SS_W / (2 s2 (1-r^2))
//   - {q(q-1) SS_B + 2A (ybar-mu)^2} / (2 s2 (1+r)),    A = n q (q-1)/2.
double pl_natural(const Natural& nat, const EqStats& st) {
    const double n = static_cast<double>(st.n), q = nat.q;
    const double A = n * q * (q - 1.0) / 2.0;
    const double s2 = nat.sigma2, r = nat.rho;
    if (!(s2 > 0.0) || !(r > -1.0 / (q - 1.0) && r < 1.0))
        return -std::numeric_limits<double>::infinity();
    const double K = q * (q - 1.0) * st.ss_b + n * q * (q - 1.0) * (st.ybar - nat.mu) * (st.ybar - nat.mu);
    return -A * std::log(s2) - 0.5 * A * std::log1p(-r * r) -
           (q - 1.0 + r) * st.ss_w / (2.0 * s2 * (1.0 - r * r)) - K / (2.0 * s2 * (1.0 + r));
}

}  // namespace

double eq_pairwise_loglik(const ParamVec& omega, const Dataset& y) {
    return pl_natural(to_natural(omega, y.cols()), eq_stats(y));
}

ParamVec eq_pairwise_score(const ParamVec& omega, const Dataset& y) {
    const EqStats st = eq_stats(y);
    const Natural nat = to_natural(omega, y.cols());
    const double n = static_cast<double>(st.n), q = nat.q;
    const double s2 = nat.sigma2, r = nat.rho;
    const double A = n * q * (q - 1.0) / 2.0;
    const double dm = st.ybar - nat.mu;
    const double K = q * (q - 1.0) * st.ss_b + n * q * (q - 1.0) * dm * dm;
    const double one_m_r2 = (1.0 - r) * (1.0 + r);

    const double d_mu = n * q * (q - 1.0) * dm / (s2 * (1.0 + r));
    const double d_s2 = -A / s2 + (q - 1.0 + r) * st.ss_w / (2.0 * s2 * s2 * one_m_r2) +
                        K / (2.0 * s2 * s2 * (1.0 + r));
    const double d_r = A * r / one_m_r2 -
                       st.ss_w * (1.0 + r * r + 2.0 * r * (q - 1.0)) /
                           (2.0 * s2 * one_m_r2 * one_m_r2) +
                       K / (2.0 * s2 * (1.0 + r) * (1.0 + r));

    // Chain rule to omega = (mu, tau, kappa).
    const double u = sigmoid(omega[2]);
    const double drho_dkappa = q * u * (1.0 - u) / (q - 1.0);
    return {d_mu, s2 * d_s2, drho_dkappa * d_r};
}

double eq_full_loglik(const ParamVec& omega, const Dataset& y) {
    const EqStats st = eq_stats(y);
    const Natural nat = to_natural(omega, y.cols());
    const double n = static_cast<double>(st.n), q = nat.q;
    const double s2 = nat.sigma2, r = nat.rho;
    if (!(s2 > 0.0) || !(r > -1.0 / (q - 1.0) && r < 1.0))
        return -std::numeric_limits<double>::infinity();
    const double T = st.ss_b + n * (st.ybar - nat.mu) * (st.ybar - nat.mu);
    const double tail = 1.0 + (q - 1.0) * r;
    return -0.5 * n * q * std::log(2.0 * std::numbers::pi) -
           0.5 * n * (q * std::log(s2) + std::log(tail) + (q - 1.0) * std::log1p(-r)) -
           st.ss_w / (2.0 * s2 * (1.0 - r)) - q * T / (2.0 * s2 * tail);
}

Dataset eq_simulate(const EquicorrSpec& spec, const ParamVec& omega, RngStream& rng) {
    const Natural nat = to_natural(omega, spec.q);
    const double sigma = std::sqrt(nat.sigma2);
    Dataset y(spec.n, spec.q);
    if (nat.rho >= 0.0) {
        // One-factor representation: Y = mu + sigma (sqrt(rho) W_i + sqrt(1-rho) E_ir).
        const double a = std::sqrt(nat.rho), b = std::sqrt(1.0 - nat.rho);
        for (std::size_t i = 0; i < spec.n; ++i) {
            const double w = rng.normal();
            for (std::size_t r = 0; r < spec.q; ++r)
                y(i, r) = nat.mu + sigma * (a * w + b * rng.normal());
        }
    } else {
        // Negative rho: Cholesky of the full q x q equicorrelation matrix.
        Matrix corr(spec.q, spec.q, nat.rho);
        for (std::size_t r = 0; r < spec.q; ++r) corr(r, r) = 1.0;
        const Matrix L = cholesky(corr);
        std::vector<double> z(spec.q);
        for (std::size_t i = 0; i < spec.n; ++i) {
            for (auto& v : z) v = rng.normal();
            for (std::size_t r = 0; r < spec.q; ++r) {
                double acc = 0.0;
                for (std::size_t k = 0; k <= r; ++k) acc += L(r, k) * z[k];
                y(i, r) = nat.mu + sigma * acc;
            }
        }
    }
    return y;
}

std::vector<double> eq_suffstat(const Dataset& y) {
    const EqStats st = eq_stats(y);
    return {st.ybar, std::sqrt(st.ss_b), std::sqrt(st.ss_w)};
}

ParamVec eq_moment_init(const Dataset& y) {
    const EqStats st = eq_stats(y);
    const double n = static_cast<double>(st.n), q = static_cast<double>(st.q);
    const double ms_w = st.ss_w / (n * (q - 1.0));
    const double ms_b = q * st.ss_b / std::max(1.0, n - 1.0);
    double sigma2 = (ms_b + (q - 1.0) * ms_w) / q;
    if (!(sigma2 > 0.0)) sigma2 = 1.0;
    double rho = (ms_b - ms_w) / (ms_b + (q - 1.0) * ms_w);
    const double lo = -1.0 / (q - 1.0);
    rho = std::min(0.98, std::max(lo + 0.02 * (1.0 - lo), rho));
    return {st.ybar, std::log(sigma2), eq_kappa_from_rho(rho, st.q)};
}

ModelSpec make_equicorr(const EquicorrSpec& spec) {
    ModelSpec m;
    m.name = "equicorr";
    m.param_names = {"mu", "tau", "kappa"};
    m.simulate = [spec](const ParamVec& omega, RngStream& rng) {
        return eq_simulate(spec, omega, rng);
    };
    m.in_support = [](const ParamVec& omega) {
        return std::isfinite(omega[0]) && std::isfinite(omega[1]) && std::isfinite(omega[2]);
    };
    const double prior_sd = spec.prior_sd;
    m.log_prior = [prior_sd](const ParamVec& omega) {
        double lp = 0.0;
        for (double w : omega) lp += -0.5 * w * w / (prior_sd * prior_sd);
        return lp;
    };
    m.sample_prior = [prior_sd](RngStream& rng) {
        ParamVec omega(3);
        for (auto& w : omega) w = prior_sd * rng.normal();
        return omega;
    };
    m.clik.dim = 3;
    m.clik.logcl = eq_pairwise_loglik;
    m.clik.score = eq_pairwise_score;
    m.full_loglik = eq_full_loglik;
    return m;
}

}  // namespace abccs::models
