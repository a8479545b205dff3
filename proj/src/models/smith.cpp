#include "abccs/models/smith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "abccs/normal.hpp"

namespace abccs::models {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Sigma2x2 {
    double s11, s12, s22, det;
    double inv11, inv12, inv22;
    double phi_max;  // density peak 1 / (2 pi sqrt(det))

    explicit Sigma2x2(const ParamVec& theta) {
        s11 = theta[0];
        s12 = theta[1];
        s22 = theta[2];
        det = s11 * s22 - s12 * s12;
        if (!(s11 > 0.0) || !(s22 > 0.0) || !(det > 0.0))
            throw DomainError("smith: Sigma is not positive definite");
        inv11 = s22 / det;
        inv12 = -s12 / det;
        inv22 = s11 / det;
        phi_max = 1.0 / (kTwoPi * std::sqrt(det));
    }

    double quad(double hx, double hy) const {
        return hx * hx * inv11 + 2.0 * hx * hy * inv12 + hy * hy * inv22;
    }

    double density(double dx, double dy) const { return phi_max * std::exp(-0.5 * quad(dx, dy)); }

    double max_eigenvalue() const {
        const double tr = s11 + s22;
        const double disc = std::sqrt((s11 - s22) * (s11 - s22) + 4.0 * s12 * s12);
        return 0.5 * (tr + disc);
    }
};

Matrix to_matrix(const Sigma2x2& s) {
    Matrix m(2, 2);
    m(0, 0) = s.s11;
    m(0, 1) = m(1, 0) = s.s12;
    m(1, 1) = s.s22;
    return m;
}

Sigma2x2 from_matrix(const Matrix& sigma) {
    return Sigma2x2(ParamVec{sigma(0, 0), sigma(0, 1), sigma(1, 1)});
}

double a_of(const Sigma2x2& s, const std::array<double, 2>& h) {
    return std::sqrt(s.quad(h[0], h[1]));
}

}  // namespace

Matrix sm_sigma(const ParamVec& theta) { return to_matrix(Sigma2x2(theta)); }

bool sm_sigma_pd(const ParamVec& theta) {
    return theta[0] > 0.0 && theta[2] > 0.0 && theta[0] * theta[2] - theta[1] * theta[1] > 0.0;
}

double sm_a(const std::array<double, 2>& h, const Matrix& sigma) {
    return a_of(from_matrix(sigma), h);
}

double sm_bvcdf(double z_k, double z_l, const std::array<double, 2>& h, const Matrix& sigma) {
    if (!(z_k > 0.0 && z_l > 0.0)) throw DomainError("smith: Frechet coordinates must be > 0");
    const double a = sm_a(h, sigma);
    if (!(a > 0.0)) throw DomainError("smith: degenerate geometry, a(h) = 0 for distinct stations");
    const double w = 0.5 * a + std::log(z_l / z_k) / a;
    const double v = a - w;
    return std::exp(-std_normal_cdf(w) / z_k - std_normal_cdf(v) / z_l);
}

double sm_extremal_coeff(const std::array<double, 2>& h, const Matrix& sigma) {
    return 2.0 * std_normal_cdf(0.5 * sm_a(h, sigma));
}

double sm_pair_density_frechet(double z_k, double z_l, const std::array<double, 2>& h,
                               const Matrix& sigma) {
    const double a = sm_a(h, sigma);
    const double w = 0.5 * a + std::log(z_l / z_k) / a;
    const double v = a - w;
    const double Pw = std_normal_cdf(w), Pv = std_normal_cdf(v);
    const double pw = std_normal_pdf(w), pv = std_normal_pdf(v);
    const double B = Pw / (z_k * z_k) + pw / (a * z_k * z_k) - pv / (a * z_k * z_l);
    const double C = Pv / (z_l * z_l) + pv / (a * z_l * z_l) - pw / (a * z_k * z_l);
    const double D = v * pw / (a * a * z_k * z_k * z_l) + w * pv / (a * a * z_k * z_l * z_l);
    return std::exp(-Pw / z_k - Pv / z_l) * (B * C + D);
}

void sm_margins(const SmithSpec& spec, const ParamVec& theta, std::vector<double>& mu,
                std::vector<double>& lambda, double& xi) {
    const std::size_t q = spec.stations.size();
    mu.resize(q);
    lambda.resize(q);
    for (std::size_t k = 0; k < q; ++k) {
        const double x = spec.stations[k][0], y = spec.stations[k][1];
        mu[k] = theta[3] + theta[4] * x + theta[5] * y;
        lambda[k] = theta[6] + theta[7] * x + theta[8] * y;
    }
    xi = theta[9];
}

double sm_pairwise_loglik(const SmithSpec& spec, const ParamVec& theta, const Dataset& y) {
    const std::size_t q = spec.stations.size();
    const std::size_t n = y.rows();
    if (y.cols() != q) throw DomainError("smith: dataset has wrong station count");
    if (!sm_sigma_pd(theta)) return kNegInf;
    const Sigma2x2 sig(theta);

    std::vector<double> mu, lambda;
    double xi;
    sm_margins(spec, theta, mu, lambda, xi);
    for (double l : lambda)
        if (!(l > 0.0)) return kNegInf;

    // Unit Frechet transforms z_ik and their logs; GEV support failure at any
    // observation signals -inf rather than throwing.
    const bool gumbel = std::abs(xi) < 1e-8;
    Matrix logz(n, q);
    double log_jacobian = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double g = (y(i, k) - mu[k]) / lambda[k];
            if (gumbel) {
                logz(i, k) = g;
                log_jacobian += g - std::log(lambda[k]);
            } else {
                const double t = 1.0 + xi * g;
                if (!(t > 0.0)) return kNegInf;
                logz(i, k) = std::log(t) / xi;
                log_jacobian += (1.0 / xi - 1.0) * std::log(t) - std::log(lambda[k]);
            }
        }
    }
    // log E summed once per observation per pair: each station appears in
    // q-1 pairs.
    double ll = static_cast<double>(q - 1) * log_jacobian;

    std::size_t floors = 0;
    for (std::size_t k = 0; k < q; ++k) {
        for (std::size_t l = k + 1; l < q; ++l) {
            const std::array<double, 2> h{spec.stations[l][0] - spec.stations[k][0],
                                          spec.stations[l][1] - spec.stations[k][1]};
            const double a = a_of(sig, h);
            if (!(a > 0.0)) throw DomainError("smith: coincident stations " + std::to_string(k) +
                                              " and " + std::to_string(l));
            for (std::size_t i = 0; i < n; ++i) {
                const double zk = std::exp(logz(i, k)), zl = std::exp(logz(i, l));
                const double w = 0.5 * a + (logz(i, l) - logz(i, k)) / a;
                const double v = a - w;
                const double Pw = std_normal_cdf(w), Pv = std_normal_cdf(v);
                const double pw = std_normal_pdf(w), pv = std_normal_pdf(v);
                const double A = -Pw / zk - Pv / zl;
                const double B = Pw / (zk * zk) + pw / (a * zk * zk) - pv / (a * zk * zl);
                const double C = Pv / (zl * zl) + pv / (a * zl * zl) - pw / (a * zk * zl);
                const double D = v * pw / (a * a * zk * zk * zl) + w * pv / (a * a * zk * zl * zl);
                double core = B * C + D;
                if (!(core > 1e-300)) {
                    core = 1e-300;
                    ++floors;
                }
                ll += A + std::log(core);
            }
        }
    }
    if (floors && spec.floor_count) *spec.floor_count += floors;
    return ll;
}

double sm_gev_transform(double z, double mu, double lambda, double xi) {
    if (std::abs(xi) < 1e-8) return mu + lambda * std::log(z);
    return mu + lambda * std::expm1(xi * std::log(z)) / xi;
}

std::vector<double> sm_simulate_frechet(const std::vector<std::array<double, 2>>& stations,
                                        const Matrix& sigma, RngStream& rng) {
    const Sigma2x2 sig = from_matrix(sigma);
    const std::size_t q = stations.size();

    double x_lo = stations[0][0], x_hi = x_lo, y_lo = stations[0][1], y_hi = y_lo;
    for (const auto& s : stations) {
        x_lo = std::min(x_lo, s[0]);
        x_hi = std::max(x_hi, s[0]);
        y_lo = std::min(y_lo, s[1]);
        y_hi = std::max(y_hi, s[1]);
    }
    const double pad = 4.0 * std::sqrt(sig.max_eigenvalue());
    x_lo -= pad;
    x_hi += pad;
    y_lo -= pad;
    y_hi += pad;
    const double area = (x_hi - x_lo) * (y_hi - y_lo);

    std::vector<double> z(q, 0.0);
    double gamma = 0.0;
    while (true) {
        gamma += -std::log(rng.uniform_open());
        const double zeta = area / gamma;
        // No later storm can top the running maximum anywhere once the peak
        // contribution drops below the smallest station value.
        double z_min = z[0];
        for (double v : z) z_min = std::min(z_min, v);
        if (zeta * sig.phi_max <= z_min) break;
        const double ux = x_lo + (x_hi - x_lo) * rng.uniform();
        const double uy = y_lo + (y_hi - y_lo) * rng.uniform();
        for (std::size_t k = 0; k < q; ++k) {
            const double contrib = zeta * sig.density(stations[k][0] - ux, stations[k][1] - uy);
            z[k] = std::max(z[k], contrib);
        }
    }
    return z;
}

Dataset sm_simulate(const SmithSpec& spec, const ParamVec& theta, RngStream& rng) {
    if (!sm_sigma_pd(theta)) throw DomainError("smith: Sigma is not positive definite");
    const Matrix sigma = sm_sigma(theta);
    std::vector<double> mu, lambda;
    double xi;
    sm_margins(spec, theta, mu, lambda, xi);
    for (double l : lambda)
        if (!(l > 0.0)) throw DomainError("smith: lambda <= 0 at a station");

    const std::size_t q = spec.stations.size();
    Dataset y(spec.n_years, q);
    for (std::size_t i = 0; i < spec.n_years; ++i) {
        const auto z = sm_simulate_frechet(spec.stations, sigma, rng);
        for (std::size_t k = 0; k < q; ++k)
            y(i, k) = sm_gev_transform(z[k], mu[k], lambda[k], xi);
    }
    return y;
}

std::array<double, 3> sm_gev_pwm_fit(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    if (sample.size() < 4) throw DomainError("gev fit: need at least 4 observations");
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t j = 1; j <= sample.size(); ++j) {
        const double x = sample[j - 1];
        b0 += x;
        b1 += (j - 1.0) / (n - 1.0) * x;
        b2 += (j - 1.0) * (j - 2.0) / ((n - 1.0) * (n - 2.0)) * x;
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;

    const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
    const double k = 7.8590 * c + 2.9554 * c * c;  // Hosking's shape, k = -xi
    double mu, lambda, xi;
    if (std::abs(k) < 1e-6) {
        lambda = (2.0 * b1 - b0) / std::log(2.0);
        mu = b0 - 0.5772156649015329 * lambda;
        xi = 0.0;
    } else {
        const double g = std::tgamma(1.0 + k);
        lambda = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
        mu = b0 + lambda * (g - 1.0) / k;
        xi = -k;
    }
    return {mu, lambda, xi};
}

namespace {

// Ordinary least squares of v on (1, x_k, y_k).
std::array<double, 3> surface_ols(const std::vector<std::array<double, 2>>& stations,
                                  const std::vector<double>& v) {
    Matrix xtx(3, 3);
    std::vector<double> xtv(3, 0.0);
    for (std::size_t k = 0; k < stations.size(); ++k) {
        const double row[3] = {1.0, stations[k][0], stations[k][1]};
        for (std::size_t a = 0; a < 3; ++a) {
            xtv[a] += row[a] * v[k];
            for (std::size_t b = 0; b < 3; ++b) xtx(a, b) += row[a] * row[b];
        }
    }
    const auto beta = lu_solve(xtx, xtv);
    return {beta[0], beta[1], beta[2]};
}

}  // namespace

ParamVec sm_moment_init(const SmithSpec& spec, const Dataset& y) {
    const std::size_t q = spec.stations.size();
    const std::size_t n = y.rows();
    std::vector<double> mu_hat(q), lam_hat(q), xi_hat(q);
    for (std::size_t k = 0; k < q; ++k) {
        const auto fit = sm_gev_pwm_fit(y.col(k));
        mu_hat[k] = fit[0];
        lam_hat[k] = std::max(fit[1], 1e-3);
        xi_hat[k] = fit[2];
    }
    auto b_mu = surface_ols(spec.stations, mu_hat);
    auto b_lam = surface_ols(spec.stations, lam_hat);

    std::vector<double> xs = xi_hat;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(q / 2), xs.end());
    const double xi = std::min(0.8, std::max(0.02, xs[q / 2]));

    // Shrink the surface toward a flat one until lambda is positive everywhere.
    for (int attempt = 0; attempt < 40; ++attempt) {
        bool ok = true;
        for (const auto& s : spec.stations)
            if (!(b_lam[0] + b_lam[1] * s[0] + b_lam[2] * s[1] > 0.0)) ok = false;
        if (ok) break;
        const double mean_lam =
            std::accumulate(lam_hat.begin(), lam_hat.end(), 0.0) / static_cast<double>(q);
        b_lam[0] = 0.5 * (b_lam[0] + mean_lam);
        b_lam[1] *= 0.5;
        b_lam[2] *= 0.5;
    }

    // Dependence: empirical extremal coefficients from the fitted-margin
    // Frechet transforms, then least squares on a(h)^2 = h^T Sigma^{-1} h.
    Matrix logz(n, q);
    for (std::size_t k = 0; k < q; ++k) {
        const double mk = b_mu[0] + b_mu[1] * spec.stations[k][0] + b_mu[2] * spec.stations[k][1];
        const double lk = b_lam[0] + b_lam[1] * spec.stations[k][0] + b_lam[2] * spec.stations[k][1];
        for (std::size_t i = 0; i < n; ++i) {
            const double t = std::max(1e-6, 1.0 + xi * (y(i, k) - mk) / lk);
            logz(i, k) = std::log(t) / xi;
        }
    }
    Matrix ptp(3, 3);
    std::vector<double> ptb(3, 0.0);
    double asq_sum = 0.0, hsq_sum = 0.0;
    std::size_t n_pairs = 0;
    for (std::size_t k = 0; k < q; ++k)
        for (std::size_t l = k + 1; l < q; ++l) {
            std::size_t joint = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (logz(i, k) <= 0.0 && logz(i, l) <= 0.0) ++joint;
            double p = static_cast<double>(joint) / static_cast<double>(n);
            p = std::min(1.0 - 1.0 / static_cast<double>(n), std::max(1.0 / static_cast<double>(n), p));
            double delta = std::min(1.99, std::max(1.01, -std::log(p)));
            const double a = 2.0 * std_normal_quantile(0.5 * delta);
            const double hx = spec.stations[l][0] - spec.stations[k][0];
            const double hy = spec.stations[l][1] - spec.stations[k][1];
            const double row[3] = {hx * hx, 2.0 * hx * hy, hy * hy};
            for (std::size_t u = 0; u < 3; ++u) {
                ptb[u] += row[u] * a * a;
                for (std::size_t v = 0; v < 3; ++v) ptp(u, v) += row[u] * row[v];
            }
            asq_sum += a * a;
            hsq_sum += hx * hx + hy * hy;
            ++n_pairs;
        }

    double s11, s12, s22;
    bool fitted = false;
    try {
        const auto prec = lu_solve(ptp, ptb);  // (P11, P12, P22) of Sigma^{-1}
        const double det_p = prec[0] * prec[2] - prec[1] * prec[1];
        if (prec[0] > 0.0 && prec[2] > 0.0 && det_p > 0.0) {
            s11 = prec[2] / det_p;
            s12 = -prec[1] / det_p;
            s22 = prec[0] / det_p;
            fitted = true;
        }
    } catch (const Error&) {
    }
    if (!fitted) {
        const double iso = hsq_sum / std::max(1e-12, asq_sum);
        s11 = s22 = iso;
        s12 = 0.0;
    }
    // Keep the start inside the prior box.
    s11 = std::min(spec.s11_hi * 0.9, std::max(1e-3, s11));
    s22 = std::min(spec.s22_hi * 0.9, std::max(1e-3, s22));
    const double cap = 0.95 * std::sqrt(s11 * s22);
    s12 = std::min({spec.s12_hi * 0.9, cap, std::max({spec.s12_lo * 0.9, -cap, s12})});

    return {s11, s12, s22, b_mu[0], b_mu[1], b_mu[2], b_lam[0], b_lam[1], b_lam[2], xi};
}

ModelSpec make_smith(const SmithSpec& spec) {
    if (spec.stations.size() < 2) throw ConfigError("smith: need at least 2 stations");
    for (std::size_t k = 0; k < spec.stations.size(); ++k)
        for (std::size_t l = k + 1; l < spec.stations.size(); ++l)
            if (spec.stations[k] == spec.stations[l])
                throw ConfigError("smith: duplicate station coordinates at indices " +
                                  std::to_string(k) + ", " + std::to_string(l));

    ModelSpec m;
    m.name = "smith";
    m.param_names = {"sigma11", "sigma12", "sigma22", "beta_mu0", "beta_mu1",
                     "beta_mu2", "beta_lam0", "beta_lam1", "beta_lam2", "xi"};
    m.simulate = [spec](const ParamVec& theta, RngStream& rng) {
        return sm_simulate(spec, theta, rng);
    };
    m.in_support = [spec](const ParamVec& theta) {
        if (!(theta[0] > 0.0 && theta[0] < spec.s11_hi)) return false;
        if (!(theta[1] > spec.s12_lo && theta[1] < spec.s12_hi)) return false;
        if (!(theta[2] > 0.0 && theta[2] < spec.s22_hi)) return false;
        if (!sm_sigma_pd(theta)) return false;
        for (std::size_t j = 3; j < 9; ++j)
            if (!std::isfinite(theta[j])) return false;
        if (!(theta[9] > 0.0)) return false;
        std::vector<double> mu, lambda;
        double xi;
        sm_margins(spec, theta, mu, lambda, xi);
        for (double l : lambda)
            if (!(l > 0.0)) return false;
        return true;
    };
    m.log_prior = [support = m.in_support](const ParamVec& theta) {
        return support(theta) ? 0.0 : kNegInf;
    };
    m.clik.dim = kSmithDim;
    m.clik.logcl = [spec](const ParamVec& theta, const Dataset& y) {
        return sm_pairwise_loglik(spec, theta, y);
    };
    return m;
}

}  // namespace abccs::models
