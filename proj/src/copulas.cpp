#include "bayesro/copulas.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "bayesro/errors.hpp"
#include "bayesro/special.hpp"

namespace bayesro::copula {

struct CopulaSpec::Impl {
  Kind kind;
  int dim;
  Eigen::MatrixXd correlation;
  std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks;
};

namespace {

void check_dim(int d) {
  if (d < 1) throw InputError("copula: dimension must be at least 1");
}

void check_unit_cube(std::span<const double> u) {
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("copula: point must lie in [0,1]^d");
}

double frechet_lower(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x;
  return std::max(0.0, s - static_cast<double>(u.size()) + 1.0);
}

double frechet_upper(std::span<const double> u) {
  double m = 1.0;
  for (double x : u) m = std::min(m, x);
  return m;
}

/// P(Z1 <= x, Z2 <= y) for standard bivariate normal with correlation rho,
/// via Phi(x)Phi(y) + integral of the bivariate density over correlations
/// [0, rho] (Gauss-Legendre, 64 nodes).
double bivariate_normal_cdf(double x, double y, double rho) {
  rho = std::clamp(rho, -1.0, 1.0);
  if (rho >= 1.0 - 1e-12) return special::normal_cdf(std::min(x, y));
  if (rho <= -1.0 + 1e-12)
    return std::max(0.0, special::normal_cdf(x) + special::normal_cdf(y) - 1.0);
  static const int kn = 32;
  // 32-point Gauss-Legendre nodes/weights on [0,1] built once by Newton.
  static std::vector<double> nodes, weights;
  if (nodes.empty()) {
    nodes.resize(kn);
    weights.resize(kn);
    for (int i = 0; i < kn; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (kn + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < kn; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        double dp = kn * (t * p0 - p1) / (t * t - 1.0);
        double step = p0 / dp;
        t -= step;
        if (std::fabs(step) < 1e-15) break;
      }
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < kn; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      double dp = kn * (t * p0 - p1) / (t * t - 1.0);
      nodes[i] = 0.5 * (1.0 + t);
      weights[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
  }
  double acc = 0.0;
  for (int i = 0; i < kn; ++i) {
    double r = rho * nodes[i];
    double om = 1.0 - r * r;
    double dens = std::exp(-(x * x + y * y - 2.0 * r * x * y) / (2.0 * om)) /
                  (2.0 * M_PI * std::sqrt(om));
    acc += weights[i] * dens;
  }
  return special::normal_cdf(x) * special::normal_cdf(y) + rho * acc;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& r) {
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10)
    throw DomainError("gaussian copula: correlation matrix is not positive semidefinite");
  Eigen::VectorXd sq = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * sq.asDiagonal();
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

double gaussian_cdf_qmc(const Eigen::MatrixXd& r, std::span<const double> z) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const int d = static_cast<int>(z.size());
  if (d > 16) throw InputError("gaussian copula: QMC evaluation supports d <= 16");
  Eigen::MatrixXd l = psd_factor(r);
  const std::uint64_t kn = 1ULL << 16;
  Eigen::VectorXd w(d);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 1; i <= kn; ++i) {
    for (int k = 0; k < d; ++k) {
      double u = halton(i, primes[k]);
      u = std::min(1.0 - 1e-12, std::max(1e-12, u));
      w[k] = special::normal_quantile(u);
    }
    Eigen::VectorXd zz = l * w;
    bool inside = true;
    for (int k = 0; k < d; ++k)
      if (zz[k] > z[k]) { inside = false; break; }
    if (inside) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(kn);
}

}  // namespace

namespace {
CopulaSpec::Impl make_impl(CopulaSpec::Kind kind, int dim, Eigen::MatrixXd corr = {},
                           std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks = {}) {
  return CopulaSpec::Impl{kind, dim, std::move(corr), std::move(blocks)};
}
}  // namespace

CopulaSpec CopulaSpec::independence(int dim) {
  check_dim(dim);
  return wrap(Kind::Independence, dim);
}

CopulaSpec CopulaSpec::upper_frechet(int dim) {
  check_dim(dim);
  return wrap(Kind::UpperFrechet, dim);
}

CopulaSpec CopulaSpec::lower_frechet(int dim) {
  check_dim(dim);
  return wrap(Kind::LowerFrechet, dim);
}

CopulaSpec CopulaSpec::gaussian(Eigen::MatrixXd correlation) {
  int d = static_cast<int>(correlation.rows());
  check_dim(d);
  if (correlation.cols() != d) throw InputError("gaussian copula: matrix must be square");
  for (int i = 0; i < d; ++i) {
    if (std::fabs(correlation(i, i) - 1.0) > 1e-10)
      throw InputError("gaussian copula: diagonal must be 1");
    for (int j = 0; j < i; ++j)
      if (std::fabs(correlation(i, j) - correlation(j, i)) > 1e-10)
        throw InputError("gaussian copula: matrix must be symmetric");
  }
  psd_factor(correlation);  // validate PSD up front
  return wrap(Kind::Gaussian, d, std::move(correlation));
}

CopulaSpec CopulaSpec::block_product(
    int dim, std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks) {
  check_dim(dim);
  std::vector<bool> seen(static_cast<std::size_t>(dim), false);
  for (const auto& [members, sub] : blocks) {
    if (static_cast<int>(members.size()) != sub.dim())
      throw InputError("block copula: member count must match sub-copula dimension");
    for (int m : members) {
      if (m < 0 || m >= dim || seen[static_cast<std::size_t>(m)])
        throw InputError("block copula: blocks must partition the coordinates");
      seen[static_cast<std::size_t>(m)] = true;
    }
  }
  for (bool s : seen)
    if (!s) throw InputError("block copula: blocks must partition the coordinates");
  return wrap(Kind::BlockProduct, dim, {}, std::move(blocks));
}

CopulaSpec::Kind CopulaSpec::kind() const { return impl_->kind; }
int CopulaSpec::dim() const { return impl_->dim; }
const Eigen::MatrixXd& CopulaSpec::correlation() const { return impl_->correlation; }
const std::vector<std::pair<std::vector<int>, CopulaSpec>>& CopulaSpec::blocks() const {
  return impl_->blocks;
}

double eval(const CopulaSpec& c, std::span<const double> u) {
  if (static_cast<int>(u.size()) != c.dim()) throw InputError("copula eval: dimension mismatch");
  check_unit_cube(u);
  switch (c.kind()) {
    case CopulaSpec::Kind::Independence: {
      double p = 1.0;
      for (double x : u) p *= x;
      return p;
    }
    case CopulaSpec::Kind::UpperFrechet:
      return frechet_upper(u);
    case CopulaSpec::Kind::LowerFrechet:
      return frechet_lower(u);
    case CopulaSpec::Kind::Gaussian: {
      const int d = c.dim();
      std::vector<double> z(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0) return 0.0;
        z[i] = u[i] >= 1.0 ? 1e100 : special::normal_quantile(u[i]);
      }
      if (d == 1) return u[0];
      if (d == 2) return bivariate_normal_cdf(z[0], z[1], c.correlation()(0, 1));
      return gaussian_cdf_qmc(c.correlation(), z);
    }
    case CopulaSpec::Kind::BlockProduct: {
      double p = 1.0;
      for (const auto& [members, sub] : c.blocks()) {
        std::vector<double> v;
        v.reserve(members.size());
        for (int m : members) v.push_back(u[static_cast<std::size_t>(m)]);
        p *= eval(sub, v);
      }
      return p;
    }
  }
  throw InputError("copula eval: unknown kind");
}

double diagonal(const CopulaSpec& c, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("copula diagonal: u must lie in [0,1]");
  std::vector<double> point(static_cast<std::size_t>(c.dim()), u);
  return eval(c, point);
}

double diagonal_inverse(const CopulaSpec& c, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw InputError("diagonal_inverse: y must lie in [0,1]");
  if (diagonal(c, 1.0) < y)
    throw DomainError("diagonal_inverse: target above diagonal range");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (diagonal(c, mid) >= y)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double tail_bound(const std::vector<std::vector<double>>& grid, const CopulaSpec& lower,
                  std::span<const double> u) {
  if (grid.empty()) throw InputError("tail_bound: certification grid must be nonempty");
  check_unit_cube(u);
  double best = frechet_lower(u);
  for (const auto& a : grid) {
    if (a.size() != u.size()) throw InputError("tail_bound: grid point dimension mismatch");
    double penalty = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) penalty += std::max(0.0, a[i] - u[i]);
    best = std::max(best, eval(lower, a) - penalty);
  }
  return best;
}

Eigen::MatrixXd sample_gaussian_copula(const Eigen::MatrixXd& correlation,
                                       const std::vector<dist::ParametricFamily>& marginals,
                                       std::size_t n, RandomSource& rng) {
  const int d = static_cast<int>(correlation.rows());
  if (correlation.cols() != d || static_cast<int>(marginals.size()) != d)
    throw InputError("sample_gaussian_copula: dimension mismatch");
  Eigen::MatrixXd l = psd_factor(correlation);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd w(d);
  for (std::size_t row = 0; row < n; ++row) {
    for (int k = 0; k < d; ++k) w[k] = rng.normal();
    Eigen::VectorXd z = l * w;
    for (int k = 0; k < d; ++k) {
      double u = special::normal_cdf(z[k]);
      u = std::min(1.0 - 1e-15, std::max(1e-15, u));
      out(static_cast<Eigen::Index>(row), k) = dist::quantile(marginals[static_cast<std::size_t>(k)], u);
    }
  }
  return out;
}

DependenceRegime DependenceRegime::independent() { return {Tag::Independent, std::nullopt, 0.0}; }

DependenceRegime DependenceRegime::tail_positive(CopulaSpec lower, double beta) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw DomainError("tail_positive: beta must lie in [0,1)");
  return {Tag::TailPositive, std::move(lower), beta};
}

DependenceRegime DependenceRegime::central_domain() {
  return {Tag::CentralDomain, std::nullopt, 0.0};
}

DependenceRegime DependenceRegime::no_assumption() {
  return {Tag::NoAssumption, std::nullopt, 0.0};
}

}  // namespace bayesro::copula
