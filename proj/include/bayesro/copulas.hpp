#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bayesro/distributions.hpp"
#include "bayesro/random.hpp"

namespace bayesro::copula {

/// Copula on [0,1]^d. Built-ins: independence (product), the upper and lower
/// Frechet bounds, the Gaussian copula, and block products of sub-copulas over
/// a partition of the coordinates.
class CopulaSpec {
 public:
  enum class Kind { Independence, UpperFrechet, LowerFrechet, Gaussian, BlockProduct };

  static CopulaSpec independence(int dim);
  static CopulaSpec upper_frechet(int dim);
  static CopulaSpec lower_frechet(int dim);
  static CopulaSpec gaussian(Eigen::MatrixXd correlation);
  /// Blocks must partition {0..dim-1}; each block evaluates its own copula.
  static CopulaSpec block_product(int dim,
                                  std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks);

  Kind kind() const;
  int dim() const;
  const Eigen::MatrixXd& correlation() const;
  const std::vector<std::pair<std::vector<int>, CopulaSpec>>& blocks() const;

 private:
  struct Impl;
  explicit CopulaSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Copula CDF at u. The Gaussian case uses the closed bivariate normal CDF for
/// d <= 2 and quasi-Monte Carlo with 2^16 points beyond (tolerance ~1e-3; only
/// exercised in data generation and tests).
double eval(const CopulaSpec& c, std::span<const double> u);

/// Diagonal section delta(u) = C(u,...,u); nondecreasing on [0,1].
double diagonal(const CopulaSpec& c, double u);

/// Smallest u with delta(u) >= y, by bisection (60 iterations).
double diagonal_inverse(const CopulaSpec& c, double y);

/// Improved lower bound from a finite certification grid S:
/// max(W(u), max_{a in S} { C_l(a) - sum_i (a_i - u_i)^+ }).
double tail_bound(const std::vector<std::vector<double>>& grid, const CopulaSpec& lower,
                  std::span<const double> u);

/// Rows are i.i.d. draws of (F_1^{-1}(Phi(z_1)), ..., F_d^{-1}(Phi(z_d))) with
/// z ~ N(0, R). R must be positive semidefinite (singular R is handled by an
/// eigenvalue factorization).
Eigen::MatrixXd sample_gaussian_copula(const Eigen::MatrixXd& correlation,
                                       const std::vector<dist::ParametricFamily>& marginals,
                                       std::size_t n, RandomSource& rng);

/// Dependence assumption attached to a coordinate-box construction.
struct DependenceRegime {
  enum class Tag { Independent, TailPositive, CentralDomain, NoAssumption };
  Tag tag = Tag::Independent;
  std::optional<CopulaSpec> lower_copula;  // TailPositive only
  double beta = 0.0;                       // certification orthant [beta,1]^d

  static DependenceRegime independent();
  static DependenceRegime tail_positive(CopulaSpec lower, double beta);
  static DependenceRegime central_domain();
  static DependenceRegime no_assumption();
};

}  // namespace bayesro::copula
