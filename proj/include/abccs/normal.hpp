#pragma once

namespace abccs {

double std_normal_pdf(double x);

/// Standard normal CDF. Accepts +/-infinity.
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on (0,1); bisection-seeded Newton.
double std_normal_quantile(double p);

/// Bivariate standard normal CDF P(X <= h, Y <= k) with correlation rho,
/// |rho| < 1. Computed by reducing to a one-dimensional integral over the
/// correlation parameter and applying Gauss-Legendre quadrature (64 nodes,
/// split panel for |rho| > 0.925).
double bvn_cdf(double h, double k, double rho);

}  // namespace abccs
