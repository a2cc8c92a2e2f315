#include "bayesro/linprog.hpp"

#include <cmath>
#include <limits>

#include "bayesro/errors.hpp"

namespace bayesro::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr double kZeroRatioTol = 1e-12;

// Standard-form problem: min c.y, A y = b, y >= 0, b >= 0.
struct StandardForm {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double objective_shift = 0.0;
  // Mapping back to the original variables: x_j = shift_j + sign_j * y_col
  // (two columns when the variable is free).
  struct VarMap {
    int pos_col = -1;
    int neg_col = -1;
    double shift = 0.0;
    double sign = 1.0;
  };
  std::vector<VarMap> vars;
  std::vector<double> row_sign;  // original row i scaled by row_sign[i]
  int n_original_rows = 0;
  std::vector<int> slack_col;  // per standard row, -1 if none
};

StandardForm build_standard_form(const LinearProgram& prob) {
  const int n = static_cast<int>(prob.objective.size());
  const int m = static_cast<int>(prob.rhs.size());
  if (prob.constraints.rows() != m || (m > 0 && prob.constraints.cols() != n) ||
      static_cast<int>(prob.senses.size()) != m || prob.lower.size() != n ||
      prob.upper.size() != n)
    throw InputError("solve_lp: inconsistent problem dimensions");
  for (int j = 0; j < n; ++j)
    if (prob.lower[j] > prob.upper[j]) throw InputError("solve_lp: lower bound above upper");
  if (!prob.objective.allFinite()) throw InputError("solve_lp: objective must be finite");
  if (m > 0 && (!prob.constraints.allFinite() || !prob.rhs.allFinite()))
    throw InputError("solve_lp: constraint data must be finite");

  const double dir = prob.direction == Direction::Maximize ? -1.0 : 1.0;

  StandardForm sf;
  sf.vars.resize(n);
  // Variable substitutions, counting extra upper-bound rows as we go.
  int cols = 0;
  int extra_rows = 0;
  for (int j = 0; j < n; ++j) {
    auto& vm = sf.vars[j];
    const double lo = prob.lower[j];
    const double hi = prob.upper[j];
    if (std::isfinite(lo)) {
      vm.shift = lo;
      vm.sign = 1.0;
      vm.pos_col = cols++;
      if (std::isfinite(hi)) ++extra_rows;  // y_j <= hi - lo
    } else if (std::isfinite(hi)) {
      vm.shift = hi;
      vm.sign = -1.0;
      vm.pos_col = cols++;
    } else {
      vm.pos_col = cols++;
      vm.neg_col = cols++;
    }
  }
  const int m_std = m + extra_rows;
  // Columns: structural, then one slack per row that needs one.
  int slack_count = 0;
  for (int i = 0; i < m; ++i)
    if (prob.senses[i] != Sense::EQ) ++slack_count;
  slack_count += extra_rows;  // bound rows are <=

  sf.a = Eigen::MatrixXd::Zero(m_std, cols + slack_count);
  sf.b = Eigen::VectorXd::Zero(m_std);
  sf.c = Eigen::VectorXd::Zero(cols + slack_count);
  sf.row_sign.assign(m_std, 1.0);
  sf.slack_col.assign(m_std, -1);
  sf.n_original_rows = m;

  for (int j = 0; j < n; ++j) {
    const auto& vm = sf.vars[j];
    double cj = dir * prob.objective[j];
    sf.c[vm.pos_col] = cj * vm.sign;
    if (vm.neg_col >= 0) sf.c[vm.neg_col] = -cj;
    sf.objective_shift += cj * vm.shift;
  }

  int slack_next = cols;
  for (int i = 0; i < m; ++i) {
    double bi = prob.rhs[i];
    for (int j = 0; j < n; ++j) {
      const auto& vm = sf.vars[j];
      double aij = prob.constraints(i, j);
      if (aij == 0.0) continue;
      sf.a(i, vm.pos_col) += aij * vm.sign;
      if (vm.neg_col >= 0) sf.a(i, vm.neg_col) -= aij;
      bi -= aij * vm.shift;
    }
    sf.b[i] = bi;
    if (prob.senses[i] == Sense::LE) {
      sf.a(i, slack_next) = 1.0;
      sf.slack_col[i] = slack_next++;
    } else if (prob.senses[i] == Sense::GE) {
      sf.a(i, slack_next) = -1.0;
      sf.slack_col[i] = slack_next++;
    }
  }
  int row = m;
  for (int j = 0; j < n; ++j) {
    const auto& vm = sf.vars[j];
    if (vm.neg_col >= 0 || !std::isfinite(prob.lower[j]) || !std::isfinite(prob.upper[j]))
      continue;
    sf.a(row, vm.pos_col) = 1.0;
    sf.b[row] = prob.upper[j] - prob.lower[j];
    sf.a(row, slack_next) = 1.0;
    sf.slack_col[row] = slack_next++;
    ++row;
  }
  // Make b nonnegative.
  for (int i = 0; i < m_std; ++i) {
    if (sf.b[i] < 0.0) {
      sf.a.row(i) = -sf.a.row(i);
      sf.b[i] = -sf.b[i];
      sf.row_sign[i] = -1.0;
    }
  }
  return sf;
}

class Simplex {
 public:
  Simplex(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
        m_(static_cast<int>(a_.rows())), n_(static_cast<int>(a_.cols())) {}

  // Returns Optimal/Infeasible/Unbounded for min c.y, A y = b, y >= 0.
  Status run() {
    if (m_ == 0) {
      y_dual_.resize(0);
      primal_ = Eigen::VectorXd::Zero(n_);
      for (int j = 0; j < n_; ++j)
        if (c_[j] < -kPivotTol) return Status::Unbounded;
      return Status::Optimal;
    }
    setup_phase1();
    Status s1 = iterate(/*phase1=*/true);
    if (s1 != Status::Optimal) return Status::Infeasible;  // phase 1 cannot be unbounded
    if (phase_obj() > 1e-7) return Status::Infeasible;
    purge_artificials();
    Status s2 = iterate(/*phase1=*/false);
    if (s2 != Status::Optimal) return s2;
    finish();
    return Status::Optimal;
  }

  const Eigen::VectorXd& primal() const { return primal_; }
  const Eigen::VectorXd& duals() const { return y_dual_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_, c_;
  int m_, n_;
  int n_total_ = 0;
  std::vector<int> basis_;
  std::vector<bool> artificial_, blocked_;
  Eigen::MatrixXd b_inv_;
  Eigen::VectorXd x_basic_;
  Eigen::VectorXd cost_;  // phase-dependent cost over all columns
  Eigen::VectorXd primal_, y_dual_;
  int pivots_since_refactor_ = 0;
  long degenerate_pivots_ = 0;
  bool bland_ = false;

  Eigen::VectorXd column(int j) const {
    if (j < n_) return a_.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e[j - n_] = 1.0;
    return e;
  }

  void setup_phase1() {
    n_total_ = n_ + m_;
    basis_.resize(m_);
    artificial_.assign(n_total_, false);
    blocked_.assign(n_total_, false);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      artificial_[n_ + i] = true;
    }
    b_inv_ = Eigen::MatrixXd::Identity(m_, m_);
    x_basic_ = b_;
    cost_ = Eigen::VectorXd::Zero(n_total_);
    for (int j = n_; j < n_total_; ++j) cost_[j] = 1.0;
  }

  double phase_obj() const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += cost_[basis_[i]] * x_basic_[i];
    return v;
  }

  void refactor() {
    Eigen::MatrixXd bmat(m_, m_);
    for (int i = 0; i < m_; ++i) bmat.col(i) = column(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    b_inv_ = lu.inverse();
    x_basic_ = b_inv_ * b_;
    pivots_since_refactor_ = 0;
  }

  Status iterate(bool phase1) {
    const long max_pivots = 20000;
    for (long it = 0; it < max_pivots; ++it) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
      for (int i = 0; i < m_; ++i)
        if (cost_[basis_[i]] != 0.0) y += cost_[basis_[i]] * b_inv_.row(i).transpose();

      int enter = -1;
      double best = -kPivotTol;
      for (int j = 0; j < n_total_; ++j) {
        if (blocked_[j]) continue;
        if (!phase1 && artificial_[j]) continue;
        bool basic = false;
        for (int i = 0; i < m_; ++i)
          if (basis_[i] == j) { basic = true; break; }
        if (basic) continue;
        double red = cost_[j] - y.dot(column(j));
        if (bland_) {
          if (red < -kPivotTol) { enter = j; break; }
        } else if (red < best) {
          best = red;
          enter = j;
        }
      }
      if (enter < 0) {
        y_dual_ = y;
        return Status::Optimal;
      }

      Eigen::VectorXd w = b_inv_ * column(enter);
      int leave = -1;
      double best_ratio = kInf;
      for (int i = 0; i < m_; ++i) {
        if (w[i] > kPivotTol) {
          double ratio = x_basic_[i] / w[i];
          if (ratio < best_ratio - kZeroRatioTol ||
              (ratio < best_ratio + kZeroRatioTol && leave >= 0 &&
               basis_[i] < basis_[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        if (phase1) throw SolverError("solve_lp: phase-1 ratio test failed");
        return Status::Unbounded;
      }
      if (best_ratio < kZeroRatioTol) {
        if (++degenerate_pivots_ > 10L * (m_ + n_)) bland_ = true;
      }

      // Eta update of the basis inverse and the basic solution.
      double piv = w[leave];
      Eigen::RowVectorXd pivot_row = b_inv_.row(leave) / piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave) continue;
        if (w[i] != 0.0) {
          b_inv_.row(i) -= w[i] * pivot_row;
          x_basic_[i] -= w[i] * best_ratio;
          if (x_basic_[i] < 0.0 && x_basic_[i] > -kFeasTol) x_basic_[i] = 0.0;
        }
      }
      b_inv_.row(leave) = pivot_row;
      x_basic_[leave] = best_ratio;
      basis_[leave] = enter;

      if (++pivots_since_refactor_ >= 50) refactor();
    }
    throw SolverError("solve_lp: pivot budget exhausted");
  }

  void purge_artificials() {
    // Pivot basic artificials out where possible; block the rest (they stay
    // basic at level zero on redundant rows).
    for (int i = 0; i < m_; ++i) {
      if (!artificial_[basis_[i]]) continue;
      Eigen::RowVectorXd row = b_inv_.row(i) * a_;
      int repl = -1;
      for (int j = 0; j < n_; ++j) {
        bool basic = false;
        for (int k = 0; k < m_; ++k)
          if (basis_[k] == j) { basic = true; break; }
        if (!basic && std::fabs(row[j]) > 1e-8) { repl = j; break; }
      }
      if (repl >= 0) {
        Eigen::VectorXd w = b_inv_ * column(repl);
        double piv = w[i];
        Eigen::RowVectorXd pivot_row = b_inv_.row(i) / piv;
        for (int k = 0; k < m_; ++k) {
          if (k == i) continue;
          if (w[k] != 0.0) b_inv_.row(k) -= w[k] * pivot_row;
        }
        b_inv_.row(i) = pivot_row;
        basis_[i] = repl;
        x_basic_ = b_inv_ * b_;
      }
    }
    for (int j = 0; j < n_total_; ++j)
      if (artificial_[j]) blocked_[j] = true;
    cost_.setZero();
    cost_.head(n_) = c_;
    refactor();
  }

  void finish() {
    primal_ = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) primal_[basis_[i]] = x_basic_[i];
  }
};

}  // namespace

LinearProgram LinearProgram::make(Direction dir, Eigen::VectorXd c) {
  LinearProgram p;
  p.direction = dir;
  const auto n = c.size();
  p.objective = std::move(c);
  p.constraints.resize(0, n);
  p.rhs.resize(0);
  p.lower = Eigen::VectorXd::Constant(n, 0.0);
  p.upper = Eigen::VectorXd::Constant(n, kInf);
  return p;
}

void LinearProgram::add_row(const Eigen::VectorXd& coeffs, Sense sense, double b) {
  if (coeffs.size() != objective.size())
    throw InputError("LinearProgram::add_row: coefficient length mismatch");
  constraints.conservativeResize(constraints.rows() + 1, objective.size());
  constraints.row(constraints.rows() - 1) = coeffs.transpose();
  senses.push_back(sense);
  rhs.conservativeResize(rhs.size() + 1);
  rhs[rhs.size() - 1] = b;
}

LpSolution solve_lp(const LinearProgram& prob) {
  StandardForm sf = build_standard_form(prob);
  Simplex simplex(sf.a, sf.b, sf.c);
  LpSolution sol;
  sol.status = simplex.run();
  if (sol.status != Status::Optimal) return sol;

  const int n = static_cast<int>(prob.objective.size());
  const int m = static_cast<int>(prob.rhs.size());
  const Eigen::VectorXd& y = simplex.primal();
  sol.primal.resize(n);
  for (int j = 0; j < n; ++j) {
    const auto& vm = sf.vars[j];
    double v = vm.shift + vm.sign * y[vm.pos_col];
    if (vm.neg_col >= 0) v -= y[vm.neg_col];
    sol.primal[j] = v;
  }
  sol.value = prob.objective.dot(sol.primal);

  const double dir = prob.direction == Direction::Maximize ? -1.0 : 1.0;
  sol.dual.resize(m);
  double dual_obj = sf.objective_shift;
  const Eigen::VectorXd& yd = simplex.duals();
  for (int i = 0; i < static_cast<int>(sf.b.size()); ++i) dual_obj += yd[i] * sf.b[i];
  for (int i = 0; i < m; ++i) sol.dual[i] = dir * sf.row_sign[i] * yd[i];

  // Certify: primal feasibility, duality gap, complementary slackness.
  const double scale = 1.0 + sol.primal.cwiseAbs().maxCoeff();
  for (int i = 0; i < m; ++i) {
    double lhs = prob.constraints.row(i).dot(sol.primal);
    double viol = 0.0;
    if (prob.senses[i] == Sense::LE) viol = lhs - prob.rhs[i];
    else if (prob.senses[i] == Sense::GE) viol = prob.rhs[i] - lhs;
    else viol = std::fabs(lhs - prob.rhs[i]);
    if (viol > 1e-8 * scale) throw SolverError("solve_lp: primal residual above tolerance");
    double slack = prob.rhs[i] - lhs;
    if (std::fabs(sol.dual[i] * slack) > 1e-8 * scale * (1.0 + std::fabs(sol.dual[i])))
      throw SolverError("solve_lp: complementary slackness violated");
  }
  for (int j = 0; j < n; ++j) {
    if (sol.primal[j] < prob.lower[j] - 1e-8 * scale ||
        sol.primal[j] > prob.upper[j] + 1e-8 * scale)
      throw SolverError("solve_lp: bound violated");
  }
  double gap = std::fabs(dir * sol.value - dual_obj);
  if (gap > 1e-8 * (1.0 + std::fabs(sol.value)))
    throw SolverError("solve_lp: duality gap above tolerance");
  return sol;
}

}  // namespace bayesro::lp
