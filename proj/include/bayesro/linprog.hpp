#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bayesro::lp {

enum class Sense { LE, EQ, GE };
enum class Direction { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded };

/// Dense LP: optimize objective . x subject to row senses against rhs and
/// per-variable bounds (use +-infinity for unbounded sides).
struct LinearProgram {
  Direction direction = Direction::Minimize;
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;  // m x n
  std::vector<Sense> senses;    // length m
  Eigen::VectorXd rhs;          // length m
  Eigen::VectorXd lower;        // length n
  Eigen::VectorXd upper;        // length n

  static LinearProgram make(Direction dir, Eigen::VectorXd c);
  void add_row(const Eigen::VectorXd& coeffs, Sense sense, double b);
};

struct LpSolution {
  Status status = Status::Optimal;
  Eigen::VectorXd primal;
  /// Duals of the original rows, signed so that for an Optimal solution the
  /// objective value equals the dual bound (complementary slackness and the
  /// duality gap are certified internally to 1e-8 before returning).
  Eigen::VectorXd dual;
  double value = 0.0;
};

/// Two-phase primal simplex with Dantzig pricing and a Bland anti-cycling
/// fallback; dense basis inverse refactorized every 50 pivots. Throws
/// SolverError if certification fails after the fallback.
LpSolution solve_lp(const LinearProgram& prob);

}  // namespace bayesro::lp
