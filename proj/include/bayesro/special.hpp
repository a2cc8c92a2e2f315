#pragma once

// Scalar special functions used across the library. Everything here is
// deterministic and platform-stable (no libm functions with unspecified
// precision beyond erfc/exp/log).

namespace bayesro::special {

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse standard normal CDF. Rational approximation polished by one Newton
/// step on the erfc-based CDF; absolute error well below 1e-12 on (0,1).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a,x). Series for x < a+1, continued
/// fraction otherwise.
double reg_lower_gamma(double a, double x);

/// Q(a,x) = 1 - P(a,x).
double reg_upper_gamma(double a, double x);

double chi_squared_cdf(double x, double dof);

}  // namespace bayesro::special
