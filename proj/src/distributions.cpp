#include "bayesro/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayesro/errors.hpp"
#include "bayesro/special.hpp"

namespace bayesro::dist {

namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kPmfCutoff = 1e-16;  // Poisson truncation threshold

void check_prob(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(who) + ": p must lie in (0,1)");
}

double poisson_log_pmf(double lambda, long k) {
  return static_cast<double>(k) * std::log(lambda) - lambda -
         std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

double TwoPointAsset::up() const { return std::sqrt(theta * (1.0 - theta)) / theta; }
double TwoPointAsset::down() const { return -std::sqrt(theta * (1.0 - theta)) / (1.0 - theta); }

ParametricFamily make_finite_discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw InputError("finite discrete: values/probs must be nonempty and equal length");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw DomainError("finite discrete: probabilities must be nonnegative");
    total += p;
  }
  if (std::fabs(total - 1.0) > kSimplexTol)
    throw DomainError("finite discrete: probabilities must sum to 1 within 1e-12");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  FiniteDiscrete fd;
  fd.values.reserve(values.size());
  fd.probs.reserve(values.size());
  for (std::size_t i : order) {
    fd.values.push_back(values[i]);
    fd.probs.push_back(probs[i]);
  }
  return fd;
}

ParametricFamily make_two_point_asset(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw DomainError("two-point asset: theta must lie in (0,1)");
  return TwoPointAsset{theta};
}

ParametricFamily make_normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("normal: sigma must be positive");
  return Normal{mu, sigma};
}

ParametricFamily make_exponential(double mean) {
  if (!(mean > 0.0)) throw DomainError("exponential: mean must be positive");
  return Exponential{mean};
}

ParametricFamily make_poisson(double mean) {
  if (!(mean > 0.0)) throw DomainError("poisson: mean must be positive");
  return Poisson{mean};
}

ParametricFamily make_gamma(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0))
    throw DomainError("gamma: shape and scale must be positive");
  return Gamma{shape, scale};
}

double cdf(const ParametricFamily& fam, double x) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double c = 0.0;
          for (std::size_t i = 0; i < f.values.size() && f.values[i] <= x; ++i) c += f.probs[i];
          return std::min(c, 1.0);
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          if (x < f.down()) return 0.0;
          if (x < f.up()) return 1.0 - f.theta;
          return 1.0;
        } else if constexpr (std::is_same_v<T, Normal>) {
          return special::normal_cdf((x - f.mu) / f.sigma);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return x <= 0.0 ? 0.0 : -std::expm1(-x / f.mean);
        } else if constexpr (std::is_same_v<T, Poisson>) {
          if (x < 0.0) return 0.0;
          long kmax = static_cast<long>(std::floor(x));
          double p = std::exp(-f.mean);
          double c = p;
          for (long k = 1; k <= kmax; ++k) {
            p *= f.mean / static_cast<double>(k);
            c += p;
            if (p < kPmfCutoff && static_cast<double>(k) > f.mean) break;
          }
          return std::min(c, 1.0);
        } else {  // Gamma
          if (x <= 0.0) return 0.0;
          return special::reg_lower_gamma(f.shape, x / f.scale);
        }
      },
      fam);
}

double quantile(const ParametricFamily& fam, double p) {
  check_prob(p, "quantile");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double c = 0.0;
          for (std::size_t i = 0; i + 1 < f.values.size(); ++i) {
            c += f.probs[i];
            if (c >= p) return f.values[i];
          }
          return f.values.back();
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          return p <= 1.0 - f.theta ? f.down() : f.up();
        } else if constexpr (std::is_same_v<T, Normal>) {
          return f.mu + f.sigma * special::normal_quantile(p);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -f.mean * std::log1p(-p);
        } else if constexpr (std::is_same_v<T, Poisson>) {
          double q = std::exp(-f.mean);
          double c = q;
          long k = 0;
          while (c < p) {
            ++k;
            q *= f.mean / static_cast<double>(k);
            c += q;
            if (q < kPmfCutoff && static_cast<double>(k) > f.mean) break;
          }
          return static_cast<double>(k);
        } else {  // Gamma: bracketed bisection on the CDF to 1e-10
          double lo = 0.0;
          double hi = std::max(f.shape * f.scale, f.scale);
          while (special::reg_lower_gamma(f.shape, hi / f.scale) < p) {
            hi *= 2.0;
            if (hi > 1e300) throw ConvergenceError("gamma quantile: bracket expansion failed");
          }
          for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
            double mid = 0.5 * (lo + hi);
            if (special::reg_lower_gamma(f.shape, mid / f.scale) >= p)
              hi = mid;
            else
              lo = mid;
          }
          return 0.5 * (lo + hi);
        }
      },
      fam);
}

double value_at_risk(const ParametricFamily& fam, double eps) {
  check_prob(eps, "value_at_risk");
  return quantile(fam, 1.0 - eps);
}

double lower_value_at_risk(const ParametricFamily& fam, double eps) {
  check_prob(eps, "lower_value_at_risk");
  return quantile(fam, eps);
}

namespace {

// E[(X - t)^+]; closed form per family, scan for count families.
double expected_excess(const ParametricFamily& fam, double t) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double s = 0.0;
          for (std::size_t i = 0; i < f.values.size(); ++i)
            if (f.values[i] > t) s += (f.values[i] - t) * f.probs[i];
          return s;
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          double s = 0.0;
          if (f.up() > t) s += (f.up() - t) * f.theta;
          if (f.down() > t) s += (f.down() - t) * (1.0 - f.theta);
          return s;
        } else if constexpr (std::is_same_v<T, Normal>) {
          double z = (t - f.mu) / f.sigma;
          return f.sigma * special::normal_pdf(z) + (f.mu - t) * special::normal_cdf(-z);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (t <= 0.0) return f.mean - t;
          return f.mean * std::exp(-t / f.mean);
        } else if constexpr (std::is_same_v<T, Poisson>) {
          if (t < 0.0) return f.mean - t;
          double s = 0.0;
          long k0 = static_cast<long>(std::floor(t)) + 1;
          long k = std::max<long>(k0, 0);
          double lp = poisson_log_pmf(f.mean, k);
          double p = std::exp(lp);
          for (; k < 1000000; ++k) {
            s += (static_cast<double>(k) - t) * p;
            p *= f.mean / static_cast<double>(k + 1);
            if (p < kPmfCutoff && static_cast<double>(k) > f.mean) break;
          }
          return s;
        } else {  // Gamma: a*s*Qbar_{a+1}(t) - t*Qbar_a(t)
          if (t <= 0.0) return f.shape * f.scale - t;
          double x = t / f.scale;
          return f.shape * f.scale * special::reg_upper_gamma(f.shape + 1.0, x) -
                 t * special::reg_upper_gamma(f.shape, x);
        }
      },
      fam);
}

}  // namespace

double cvar(const ParametricFamily& fam, double eps) {
  if (eps == 1.0) return mean(fam);
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("cvar: eps must lie in (0,1]");
  double t = quantile(fam, 1.0 - eps);
  return t + expected_excess(fam, t) / eps;
}

double lower_cvar(const ParametricFamily& fam, double eps) {
  if (eps == 1.0) return mean(fam);
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("lower_cvar: eps must lie in (0,1]");
  double t = quantile(fam, eps);
  // (t - X)^+ = (X - t)^+ - (X - t)
  double shortfall = expected_excess(fam, t) - (mean(fam) - t);
  return t - shortfall / eps;
}

double gamma_cvar(double shape, double scale, double eps) {
  if (!(shape > 0.0 && scale > 0.0))
    throw DomainError("gamma_cvar: shape and scale must be positive");
  if (eps == 1.0) return shape * scale;
  check_prob(eps, "gamma_cvar");
  ParametricFamily g = make_gamma(shape, scale);
  double q = quantile(g, 1.0 - eps);
  return (scale * shape / eps) * special::reg_upper_gamma(shape + 1.0, q / scale);
}

double mean(const ParametricFamily& fam) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double s = 0.0;
          for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * f.probs[i];
          return s;
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          return f.theta * f.up() + (1.0 - f.theta) * f.down();
        } else if constexpr (std::is_same_v<T, Normal>) {
          return f.mu;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return f.mean;
        } else if constexpr (std::is_same_v<T, Poisson>) {
          return f.mean;
        } else {
          return f.shape * f.scale;
        }
      },
      fam);
}

double variance(const ParametricFamily& fam) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double m = mean(fam);
          double s = 0.0;
          for (std::size_t i = 0; i < f.values.size(); ++i) {
            double d = f.values[i] - m;
            s += d * d * f.probs[i];
          }
          return s;
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          return f.theta * f.up() * f.up() + (1.0 - f.theta) * f.down() * f.down();
        } else if constexpr (std::is_same_v<T, Normal>) {
          return f.sigma * f.sigma;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return f.mean * f.mean;
        } else if constexpr (std::is_same_v<T, Poisson>) {
          return f.mean;
        } else {
          return f.shape * f.scale * f.scale;
        }
      },
      fam);
}

double log_pdf(const ParametricFamily& fam, double x) {
  constexpr double kNegInf = -1e300;
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          for (std::size_t i = 0; i < f.values.size(); ++i)
            if (f.values[i] == x) return std::log(f.probs[i]);
          return kNegInf;
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          if (x == f.up()) return std::log(f.theta);
          if (x == f.down()) return std::log1p(-f.theta);
          return kNegInf;
        } else if constexpr (std::is_same_v<T, Normal>) {
          double z = (x - f.mu) / f.sigma;
          return -0.5 * z * z - std::log(f.sigma) - 0.9189385332046727;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (x < 0.0) return kNegInf;
          return -x / f.mean - std::log(f.mean);
        } else if constexpr (std::is_same_v<T, Poisson>) {
          long k = static_cast<long>(x);
          if (x < 0.0 || static_cast<double>(k) != x) return kNegInf;
          return poisson_log_pmf(f.mean, k);
        } else {  // Gamma
          if (x < 0.0) return kNegInf;
          if (x == 0.0) return f.shape < 1.0 ? 1e300 : (f.shape == 1.0 ? -std::log(f.scale) : kNegInf);
          return (f.shape - 1.0) * std::log(x) - x / f.scale -
                 f.shape * std::log(f.scale) - std::lgamma(f.shape);
        }
      },
      fam);
}

double sample_one(const ParametricFamily& fam, RandomSource& rng) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double u = rng.next_double();
          double c = 0.0;
          for (std::size_t i = 0; i + 1 < f.values.size(); ++i) {
            c += f.probs[i];
            if (u < c) return f.values[i];
          }
          return f.values.back();
        } else if constexpr (std::is_same_v<T, TwoPointAsset>) {
          return rng.next_double() < f.theta ? f.up() : f.down();
        } else if constexpr (std::is_same_v<T, Normal>) {
          return f.mu + f.sigma * rng.normal();
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return rng.exponential(f.mean);
        } else if constexpr (std::is_same_v<T, Poisson>) {
          return static_cast<double>(rng.poisson(f.mean));
        } else {
          return rng.gamma(f.shape, f.scale);
        }
      },
      fam);
}

std::vector<double> sample(const ParametricFamily& fam, std::size_t n, RandomSource& rng) {
  if (n < 1) throw InputError("sample: n must be at least 1");
  std::vector<double> out(n);
  for (auto& x : out) x = sample_one(fam, rng);
  return out;
}

}  // namespace bayesro::dist
