#include "bayesro/bayes.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "bayesro/errors.hpp"
#include "bayesro/special.hpp"

namespace bayesro::bayes {

namespace {

constexpr double kNegInf = -1e300;

double z_for(double two_sided_alpha) {
  return special::normal_quantile(1.0 - 0.5 * two_sided_alpha);
}

}  // namespace

int CredibleRegion::dim() const {
  switch (shape) {
    case Shape::Ellipsoid: return static_cast<int>(center.size());
    case Shape::Box: return static_cast<int>(intervals.size());
    case Shape::Product: {
      int d = 0;
      for (const auto& c : components) d += c.dim();
      return d;
    }
  }
  return 0;
}

bool CredibleRegion::contains(const Eigen::VectorXd& theta) const {
  constexpr double tol = 1e-9;
  switch (shape) {
    case Shape::Ellipsoid: {
      Eigen::LLT<Eigen::MatrixXd> llt(info);
      if (llt.info() != Eigen::Success)
        throw BoundaryModeError("credible region: information matrix not positive definite");
      Eigen::VectorXd w = llt.matrixL().transpose() * (theta - center);
      return w.norm() <= radius + tol;
    }
    case Shape::Box: {
      if (theta.size() != static_cast<Eigen::Index>(intervals.size())) return false;
      double total = 0.0;
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        if (theta[j] < intervals[j].lo - tol || theta[j] > intervals[j].hi + tol) return false;
        total += theta[j];
      }
      if (simplex_side_condition && std::fabs(total - 1.0) > tol) return false;
      return true;
    }
    case Shape::Product: {
      Eigen::Index at = 0;
      for (const auto& c : components) {
        Eigen::Index d = c.dim();
        if (!c.contains(theta.segment(at, d))) return false;
        at += d;
      }
      return at == theta.size();
    }
  }
  return false;
}

double CredibleRegion::diameter() const {
  switch (shape) {
    case Shape::Ellipsoid: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
      double lmin = es.eigenvalues().minCoeff();
      if (lmin <= 0.0)
        throw BoundaryModeError("credible region: information matrix not positive definite");
      return 2.0 * radius / std::sqrt(lmin);
    }
    case Shape::Box: {
      double s = 0.0;
      for (const auto& iv : intervals) s += iv.width() * iv.width();
      return std::sqrt(s);
    }
    case Shape::Product: {
      double s = 0.0;
      for (const auto& c : components) {
        double d = c.diameter();
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

DirichletPosterior posterior_dirichlet(const std::vector<double>& prior,
                                       const std::vector<int>& labels) {
  const int n = static_cast<int>(prior.size());
  std::vector<long> counts(prior.size(), 0);
  for (int lab : labels) {
    if (lab < 1 || lab > n) throw InputError("posterior_dirichlet: label out of range");
    ++counts[static_cast<std::size_t>(lab - 1)];
  }
  return posterior_dirichlet_counts(prior, counts);
}

DirichletPosterior posterior_dirichlet_counts(const std::vector<double>& prior,
                                              const std::vector<long>& counts) {
  if (prior.empty() || prior.size() != counts.size())
    throw InputError("posterior_dirichlet: prior/count length mismatch");
  DirichletPosterior post;
  post.concentration.reserve(prior.size());
  for (std::size_t j = 0; j < prior.size(); ++j) {
    if (!(prior[j] > 0.0)) throw DomainError("posterior_dirichlet: prior must be positive");
    if (counts[j] < 0) throw InputError("posterior_dirichlet: negative count");
    post.concentration.push_back(prior[j] + static_cast<double>(counts[j]));
  }
  return post;
}

PosteriorSummary dirichlet_mode_info(const DirichletPosterior& post) {
  const auto n = post.concentration.size();
  double total = 0.0;
  for (double t : post.concentration) {
    if (!(t > 1.0))
      throw BoundaryModeError("dirichlet_mode_info: no interior mode (some tau <= 1)");
    total += t;
  }
  const double denom = total - static_cast<double>(n);
  PosteriorSummary s;
  s.family = "dirichlet";
  s.mode.resize(static_cast<Eigen::Index>(n));
  s.info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double tj = post.concentration[j];
    double mj = (tj - 1.0) / denom;
    s.mode[static_cast<Eigen::Index>(j)] = mj;
    s.info(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = (tj - 1.0) / (mj * mj);
  }
  return s;
}

namespace {

Eigen::VectorXd numeric_gradient(const LogDensity& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double h = 1e-6 * (1.0 + std::fabs(x[k]));
    xp[k] = x[k] + h;
    double fp = f(xp);
    xp[k] = x[k] - h;
    double fm = f(xp);
    xp[k] = x[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

PosteriorSummary laplace_fit(const LogDensity& log_posterior, Eigen::VectorXd init,
                             const LaplaceOptions& opts, const LogDensityGradient* gradient) {
  const Eigen::Index n = init.size();
  if (n == 0) throw InputError("laplace_fit: empty parameter vector");
  double f0 = log_posterior(init);
  if (!(f0 > kNegInf)) throw InputError("laplace_fit: log-posterior not finite at init");

  auto grad = [&](const Eigen::VectorXd& x) {
    return gradient ? (*gradient)(x) : numeric_gradient(log_posterior, x);
  };

  Eigen::VectorXd x = std::move(init);
  double fx = f0;
  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool converged = g.norm() <= opts.gradient_tol;

  for (int it = 0; it < opts.max_iterations && !converged; ++it) {
    Eigen::VectorXd p = h_inv * g;  // ascent direction
    if (p.dot(g) <= 0.0) {
      h_inv = Eigen::MatrixXd::Identity(n, n);
      p = g;
    }
    double step = 1.0;
    double slope = g.dot(p);
    Eigen::VectorXd xn;
    Eigen::VectorXd gn;
    double fn = kNegInf;
    bool accepted = false;
    bool have_gn = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * p;
      fn = log_posterior(xn);
      if (fn > kNegInf && fn >= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Near the mode the objective differences drown in rounding before the
      // gradient tolerance is met; accept steps that shrink the gradient.
      if (fn > kNegInf && fn >= fx - 1e-10 * (1.0 + std::fabs(fx))) {
        Eigen::VectorXd gtry = grad(xn);
        if (gtry.norm() <= 0.9 * g.norm()) {
          gn = std::move(gtry);
          have_gn = true;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled; convergence is judged on the gradient below

    if (!have_gn) gn = grad(xn);
    Eigen::VectorXd s = xn - x;
    Eigen::VectorXd yv = gn - g;  // gradient change (ascent convention)
    double sy = -s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      // BFGS update of the inverse Hessian of -log posterior.
      Eigen::VectorXd hy = h_inv * (-yv);
      double yhy = (-yv).dot(hy);
      h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
               (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    x = std::move(xn);
    fx = fn;
    g = std::move(gn);
    converged = g.norm() <= opts.gradient_tol;
  }
  if (!converged)
    throw ConvergenceError("laplace_fit: optimizer did not reach gradient tolerance");

  // Observed information by central finite differences, symmetrized.
  PosteriorSummary out;
  out.mode = x;
  out.info.resize(n, n);
  Eigen::VectorXd h(n);
  for (Eigen::Index k = 0; k < n; ++k)
    h[k] = std::max(opts.fd_step, opts.fd_step * std::fabs(x[k]));
  Eigen::VectorXd xt = x;
  for (Eigen::Index k = 0; k < n; ++k) {
    xt[k] = x[k] + h[k];
    double fp = log_posterior(xt);
    xt[k] = x[k] - h[k];
    double fm = log_posterior(xt);
    xt[k] = x[k];
    out.info(k, k) = -(fp - 2.0 * fx + fm) / (h[k] * h[k]);
    for (Eigen::Index l = k + 1; l < n; ++l) {
      xt[k] = x[k] + h[k]; xt[l] = x[l] + h[l];
      double fpp = log_posterior(xt);
      xt[l] = x[l] - h[l];
      double fpm = log_posterior(xt);
      xt[k] = x[k] - h[k]; xt[l] = x[l] + h[l];
      double fmp = log_posterior(xt);
      xt[l] = x[l] - h[l];
      double fmm = log_posterior(xt);
      xt[k] = x[k]; xt[l] = x[l];
      double mixed = -(fpp - fpm - fmp + fmm) / (4.0 * h[k] * h[l]);
      out.info(k, l) = mixed;
      out.info(l, k) = mixed;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.info);
  if (llt.info() != Eigen::Success)
    throw BoundaryModeError("laplace_fit: observed information not positive definite");
  return out;
}

CredibleRegion credible_ellipsoid(const PosteriorSummary& summary, double alpha) {
  if (alpha == 0.0)
    throw DomainError("credible_ellipsoid: alpha must be positive (radius degenerates)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("credible_ellipsoid: alpha must lie in (0,1)");
  Eigen::LLT<Eigen::MatrixXd> llt(summary.info);
  if (llt.info() != Eigen::Success)
    throw BoundaryModeError("credible_ellipsoid: information matrix not positive definite");
  CredibleRegion r;
  r.shape = CredibleRegion::Shape::Ellipsoid;
  r.alpha = alpha;
  r.center = summary.mode;
  r.info = summary.info;
  r.radius = z_for(alpha);
  return r;
}

CredibleRegion credible_box_dirichlet(const DirichletPosterior& post, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("credible_box_dirichlet: alpha must lie in (0,1)");
  PosteriorSummary s = dirichlet_mode_info(post);
  const int n = static_cast<int>(post.concentration.size());
  double alpha_marginal = split_alpha(alpha, n, SplitRule::IndependentProduct);
  double z = z_for(alpha_marginal);
  CredibleRegion r;
  r.shape = CredibleRegion::Shape::Box;
  r.alpha = alpha;
  r.simplex_side_condition = true;
  r.intervals.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double mj = s.mode[j];
    double sd = mj / std::sqrt(post.concentration[static_cast<std::size_t>(j)] - 1.0);
    r.intervals[static_cast<std::size_t>(j)] = {std::max(0.0, mj - z * sd),
                                                std::min(1.0, mj + z * sd)};
  }
  return r;
}

double split_alpha(double alpha, int d, SplitRule rule, int block_count, int block_size) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("split_alpha: alpha must lie in (0,1)");
  if (d < 1) throw DomainError("split_alpha: d must be at least 1");
  switch (rule) {
    case SplitRule::IndependentProduct:
      return 1.0 - std::pow(1.0 - alpha, 1.0 / static_cast<double>(d));
    case SplitRule::Bonferroni:
      return alpha / static_cast<double>(d);
    case SplitRule::BlockProduct: {
      if (block_count < 1 || block_size < 1)
        throw DomainError("split_alpha: block rule needs block_count and block_size");
      double per_block = 1.0 - std::pow(1.0 - alpha, 1.0 / static_cast<double>(block_count));
      return per_block / static_cast<double>(block_size);
    }
  }
  throw DomainError("split_alpha: unknown rule");
}

namespace {

struct SufficientStats {
  double n = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double count_up = 0.0;  // two-point only
};

SufficientStats collect(std::span<const double> samples) {
  SufficientStats s;
  s.n = static_cast<double>(samples.size());
  for (double x : samples) {
    s.sum += x;
    s.sum_sq += x * x;
    if (x > 0.0) s.count_up += 1.0;
  }
  return s;
}

struct FamilyModel {
  LogDensity logpost;
  LogDensityGradient grad;
  Eigen::VectorXd init;
  std::vector<Interval> domain;  // clip targets per parameter
  std::string name;
};

FamilyModel make_model(MarginalFamily family, const SufficientStats& s,
                       const MarginalOptions& opts) {
  constexpr double kTiny = 1e-12;
  FamilyModel m;
  switch (family) {
    case MarginalFamily::TwoPointAsset: {
      const double a = opts.beta_prior_a, b = opts.beta_prior_b;
      const double k = s.count_up, n = s.n;
      m.name = "two_point_asset";
      m.logpost = [k, n, a, b](const Eigen::VectorXd& t) {
        double th = t[0];
        if (!(th > 0.0 && th < 1.0)) return kNegInf;
        return (k + a - 1.0) * std::log(th) + (n - k + b - 1.0) * std::log1p(-th);
      };
      m.grad = [k, n, a, b](const Eigen::VectorXd& t) {
        Eigen::VectorXd g(1);
        g[0] = (k + a - 1.0) / t[0] - (n - k + b - 1.0) / (1.0 - t[0]);
        return g;
      };
      m.init.resize(1);
      m.init[0] = std::min(1.0 - 1e-3, std::max(1e-3, (k + a - 1.0) / (n + a + b - 2.0)));
      m.domain = {{1e-6, 1.0 - 1e-6}};
      break;
    }
    case MarginalFamily::Exponential: {
      const double sum = s.sum, n = s.n;
      m.name = "exponential";
      m.logpost = [sum, n](const Eigen::VectorXd& t) {
        double mean = t[0];
        if (!(mean > 0.0)) return kNegInf;
        return -n * std::log(mean) - sum / mean;
      };
      m.grad = [sum, n](const Eigen::VectorXd& t) {
        Eigen::VectorXd g(1);
        g[0] = -n / t[0] + sum / (t[0] * t[0]);
        return g;
      };
      m.init.resize(1);
      m.init[0] = std::max(kTiny, s.sum / s.n);
      m.domain = {{kTiny, 1e12}};
      break;
    }
    case MarginalFamily::Poisson: {
      const double sum = s.sum, n = s.n;
      m.name = "poisson";
      m.logpost = [sum, n](const Eigen::VectorXd& t) {
        double lam = t[0];
        if (!(lam > 0.0)) return kNegInf;
        return sum * std::log(lam) - n * lam;
      };
      m.grad = [sum, n](const Eigen::VectorXd& t) {
        Eigen::VectorXd g(1);
        g[0] = sum / t[0] - n;
        return g;
      };
      m.init.resize(1);
      m.init[0] = std::max(kTiny, s.sum / s.n);
      m.domain = {{kTiny, 1e12}};
      break;
    }
    case MarginalFamily::Normal: {
      const double sum = s.sum, sum_sq = s.sum_sq, n = s.n;
      m.name = "normal";
      m.logpost = [sum, sum_sq, n](const Eigen::VectorXd& t) {
        double mu = t[0], sg = t[1];
        if (!(sg > 0.0)) return kNegInf;
        double ss = sum_sq - 2.0 * mu * sum + n * mu * mu;
        return -n * std::log(sg) - 0.5 * ss / (sg * sg);
      };
      m.grad = [sum, sum_sq, n](const Eigen::VectorXd& t) {
        double mu = t[0], sg = t[1];
        double ss = sum_sq - 2.0 * mu * sum + n * mu * mu;
        Eigen::VectorXd g(2);
        g[0] = (sum - n * mu) / (sg * sg);
        g[1] = -n / sg + ss / (sg * sg * sg);
        return g;
      };
      double mean = s.sum / s.n;
      double var = std::max(kTiny, s.sum_sq / s.n - mean * mean);
      m.init.resize(2);
      m.init[0] = mean;
      m.init[1] = std::sqrt(var);
      m.domain = {{-1e12, 1e12}, {kTiny, 1e12}};
      break;
    }
    case MarginalFamily::NormalFixedSigma: {
      const double sum = s.sum, n = s.n;
      const double sg = opts.fixed_sigma;
      if (!(sg > 0.0)) throw DomainError("marginal fit: fixed sigma must be positive");
      m.name = "normal_fixed_sigma";
      m.logpost = [sum, n, sg](const Eigen::VectorXd& t) {
        double mu = t[0];
        return -(n * mu * mu - 2.0 * mu * sum) / (2.0 * sg * sg);
      };
      m.grad = [sum, n, sg](const Eigen::VectorXd& t) {
        Eigen::VectorXd g(1);
        g[0] = (sum - n * t[0]) / (sg * sg);
        return g;
      };
      m.init.resize(1);
      m.init[0] = s.sum / s.n;
      m.domain = {{-1e12, 1e12}};
      break;
    }
  }
  return m;
}

}  // namespace

MarginalFit marginal_credible_interval(MarginalFamily family,
                                       std::span<const double> samples,
                                       double alpha_marginal, const MarginalOptions& opts) {
  if (samples.size() < 2) throw InputError("marginal_credible_interval: need at least 2 samples");
  if (!(alpha_marginal > 0.0 && alpha_marginal < 1.0))
    throw DomainError("marginal_credible_interval: level must lie in (0,1)");
  SufficientStats stats = collect(samples);
  FamilyModel model = make_model(family, stats, opts);
  PosteriorSummary summary = laplace_fit(model.logpost, model.init, {}, &model.grad);
  summary.family = model.name;
  summary.sample_count = samples.size();

  const double z = z_for(alpha_marginal);
  Eigen::MatrixXd cov = summary.info.inverse();
  MarginalFit fit;
  fit.summary = summary;
  fit.intervals.resize(static_cast<std::size_t>(summary.mode.size()));
  for (Eigen::Index k = 0; k < summary.mode.size(); ++k) {
    double half = z * std::sqrt(std::max(0.0, cov(k, k)));
    Interval dom = model.domain[static_cast<std::size_t>(k)];
    fit.intervals[static_cast<std::size_t>(k)] = {
        std::max(dom.lo, summary.mode[k] - half), std::min(dom.hi, summary.mode[k] + half)};
  }
  return fit;
}

}  // namespace bayesro::bayes
