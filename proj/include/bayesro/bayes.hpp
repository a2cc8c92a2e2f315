#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bayesro::bayes {

/// Posterior mode and observed information (negative Hessian of the
/// log-posterior at the mode; positive definite when the mode is interior).
struct PosteriorSummary {
  Eigen::VectorXd mode;
  Eigen::MatrixXd info;
  std::string family;
  std::size_t sample_count = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// (1-alpha) credible region for a parameter vector: an ellipsoid
/// ||info^{1/2}(theta - center)||_2 <= radius, a coordinate box (optionally
/// carrying the simplex side condition e.theta = 1), or a Cartesian product
/// of per-marginal regions.
struct CredibleRegion {
  enum class Shape { Ellipsoid, Box, Product };
  Shape shape = Shape::Box;
  double alpha = 0.0;

  Eigen::VectorXd center;
  Eigen::MatrixXd info;
  double radius = 0.0;

  std::vector<Interval> intervals;
  bool simplex_side_condition = false;

  std::vector<CredibleRegion> components;

  int dim() const;
  bool contains(const Eigen::VectorXd& theta) const;
  double diameter() const;
};

struct DirichletPosterior {
  std::vector<double> concentration;
};

/// Conjugate update: concentration[j] = prior[j] + count of label j.
/// Labels are 1-based in {1..n}.
DirichletPosterior posterior_dirichlet(const std::vector<double>& prior,
                                       const std::vector<int>& labels);
DirichletPosterior posterior_dirichlet_counts(const std::vector<double>& prior,
                                              const std::vector<long>& counts);

/// Interior mode (tau_j - 1)/(sum tau - n) with diagonal observed information
/// (tau_j - 1)/mode_j^2. Requires every tau_j > 1.
PosteriorSummary dirichlet_mode_info(const DirichletPosterior& post);

struct LaplaceOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-8;
  double fd_step = 1e-5;  // Hessian step: max(fd_step, fd_step * |theta_k|)
};

using LogDensity = std::function<double(const Eigen::VectorXd&)>;
using LogDensityGradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Quasi-Newton (BFGS with backtracking) maximization of the log-posterior,
/// followed by a central-finite-difference Hessian at the mode. Out-of-domain
/// points may be signalled by returning a large negative value.
PosteriorSummary laplace_fit(const LogDensity& log_posterior, Eigen::VectorXd init,
                             const LaplaceOptions& opts = {},
                             const LogDensityGradient* gradient = nullptr);

CredibleRegion credible_ellipsoid(const PosteriorSummary& summary, double alpha);

/// Per-coordinate intervals mode_j +- z_{1-alpha'/2} * mode_j / sqrt(tau_j-1),
/// alpha' = 1 - (1-alpha)^{1/n}, intersected with [0,1]; carries the simplex
/// side condition for consumption by the discrete set builder.
CredibleRegion credible_box_dirichlet(const DirichletPosterior& post, double alpha);

enum class SplitRule { IndependentProduct, Bonferroni, BlockProduct };

/// Per-marginal level: IndependentProduct 1-(1-alpha)^{1/d}; Bonferroni
/// alpha/d; BlockProduct (1-(1-alpha)^{1/K})/d_k for a marginal in a block of
/// size d_k (pass block_count = K and block_size = d_k).
double split_alpha(double alpha, int d, SplitRule rule, int block_count = 0,
                   int block_size = 0);

enum class MarginalFamily { TwoPointAsset, Exponential, Poisson, Normal, NormalFixedSigma };

struct MarginalOptions {
  // Beta prior for the two-point asset probability; (1,1) is flat.
  double beta_prior_a = 1.0;
  double beta_prior_b = 1.0;
  // Known sigma for MarginalFamily::NormalFixedSigma.
  double fixed_sigma = 1.0;
};

struct MarginalFit {
  PosteriorSummary summary;
  std::vector<Interval> intervals;  // one per scalar parameter, domain-clipped
};

/// Laplace credible interval(s) for one marginal family at the (already
/// split) level alpha_marginal: mode_k +- z_{1-alpha'/2} * sqrt((I^{-1})_kk),
/// clipped to the family's valid parameter domain.
MarginalFit marginal_credible_interval(MarginalFamily family,
                                       std::span<const double> samples,
                                       double alpha_marginal,
                                       const MarginalOptions& opts = {});

}  // namespace bayesro::bayes
