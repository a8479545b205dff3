#include "abccs/normal.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "abccs/common.hpp"

namespace abccs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration
// on the Legendre recurrence.
template <int N>
struct GaussLegendre {
    std::array<double, N> x{};
    std::array<double, N> w{};
    GaussLegendre() {
        for (int i = 0; i < (N + 1) / 2; ++i) {
            double t = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (t * p1 - p0) / (t * t - 1.0);
                const double step = p1 / dp;
                t -= step;
                if (std::abs(step) < 1e-15) break;
            }
            x[i] = -t;
            x[N - 1 - i] = t;
            w[i] = w[N - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const GaussLegendre<64> kGL64;

// Integrand of the correlation-parameter reduction after the r = sin(u)
// substitution, which removes the endpoint singularity at |r| -> 1.
double bvn_panel(double h, double k, double lo, double hi) {
    const double c = 0.5 * (hi - lo);
    const double m = 0.5 * (hi + lo);
    double acc = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double u = m + c * kGL64.x[i];
        const double su = std::sin(u);
        const double cu2 = std::cos(u) * std::cos(u);
        acc += kGL64.w[i] * std::exp(-(h * h + k * k - 2.0 * h * k * su) / (2.0 * cu2));
    }
    return c * acc / kTwoPi;
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
    if (std::isnan(x)) throw DomainError("std_normal_cdf: NaN argument");
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p outside (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double d = std_normal_pdf(x);
        if (d <= 0.0) break;
        x -= (std_normal_cdf(x) - p) / d;
    }
    return x;
}

double bvn_cdf(double h, double k, double rho) {
    if (std::isnan(h) || std::isnan(k) || std::isnan(rho))
        throw DomainError("bvn_cdf: NaN argument");
    if (!(std::abs(rho) < 1.0)) throw DomainError("bvn_cdf: |rho| >= 1");
    const double inf = std::numeric_limits<double>::infinity();
    if (h == -inf || k == -inf) return 0.0;
    if (h == inf) return std_normal_cdf(k);
    if (k == inf) return std_normal_cdf(h);
    const double base = std_normal_cdf(h) * std_normal_cdf(k);
    if (rho == 0.0) return base;

    const double umax = std::asin(rho);
    double correction;
    if (std::abs(rho) <= 0.925) {
        correction = bvn_panel(h, k, 0.0, umax);
    } else {
        const double split = std::copysign(std::asin(0.925), rho);
        correction = bvn_panel(h, k, 0.0, split) + bvn_panel(h, k, split, umax);
    }
    double p = base + correction;
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

}  // namespace abccs
