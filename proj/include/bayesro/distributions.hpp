#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "bayesro/random.hpp"

namespace bayesro::dist {

/// Scalar distribution with finite support. Values are kept sorted ascending
/// with their probabilities; quantiles resolve by a left-to-right scan over
/// exact cumulative sums.
struct FiniteDiscrete {
  std::vector<double> values;
  std::vector<double> probs;
};

/// Two-outcome asset return parameterized so that the mean is 0 and the
/// variance is 1 for every theta in (0,1): the up move sqrt(theta(1-theta))/theta
/// has probability theta, the down move -sqrt(theta(1-theta))/(1-theta) has
/// probability 1-theta.
struct TwoPointAsset {
  double theta;
  double up() const;
  double down() const;
};

struct Normal {
  double mu;
  double sigma;
};

struct Exponential {
  double mean;
};

struct Poisson {
  double mean;
};

struct Gamma {
  double shape;
  double scale;
};

using ParametricFamily =
    std::variant<FiniteDiscrete, TwoPointAsset, Normal, Exponential, Poisson, Gamma>;

/// Validating constructors. Probabilities must lie in the simplex within 1e-12;
/// scale/shape/mean parameters must be strictly positive.
ParametricFamily make_finite_discrete(std::vector<double> values, std::vector<double> probs);
ParametricFamily make_two_point_asset(double theta);
ParametricFamily make_normal(double mu, double sigma);
ParametricFamily make_exponential(double mean);
ParametricFamily make_poisson(double mean);
ParametricFamily make_gamma(double shape, double scale);

double cdf(const ParametricFamily& fam, double x);

/// Smallest t with CDF(t) >= p (right-continuous generalized inverse).
double quantile(const ParametricFamily& fam, double p);

/// VaR at upper-tail mass eps: the (1-eps)-quantile.
double value_at_risk(const ParametricFamily& fam, double eps);

/// Lower-tail counterpart: the eps-quantile. For discrete families this uses
/// the same inf-definition as quantile and can sit at the bottom of the support.
double lower_value_at_risk(const ParametricFamily& fam, double eps);

/// CVaR at upper-tail mass eps in (0,1]; equals the mean at eps = 1.
double cvar(const ParametricFamily& fam, double eps);

/// Mean of the lower eps-tail, the reflection of cvar; equals the mean at eps = 1.
double lower_cvar(const ParametricFamily& fam, double eps);

/// Closed-form Gamma CVaR (shape a, scale s) at upper-tail mass eps:
/// (s*a/eps) * Qbar_{a+1,s}(q) with q the (1-eps)-quantile of Gamma(a,s).
double gamma_cvar(double shape, double scale, double eps);

double mean(const ParametricFamily& fam);
double variance(const ParametricFamily& fam);
double log_pdf(const ParametricFamily& fam, double x);

std::vector<double> sample(const ParametricFamily& fam, std::size_t n, RandomSource& rng);
double sample_one(const ParametricFamily& fam, RandomSource& rng);

}  // namespace bayesro::dist
