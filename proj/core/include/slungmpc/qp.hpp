#pragma once

#include <vector>

#include "slungmpc/types.hpp"

namespace slungmpc {

/// Convex constraint |z[indices] - center| <= radius, handled by supporting-hyperplane cuts.
struct BallConstraint {
  std::vector<int> indices;
  Eigen::VectorXd center;
  double radius = 0.0;  // negative means empty
};

/// minimize 1/2 z'Hz + g'z  s.t.  A_eq z = b_eq,  A_in z >= b_in,  lb <= z <= ub,  balls.
/// Empty lb/ub mean unbounded; individual entries may be +-infinity.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  std::vector<BallConstraint> balls;

  int num_variables() const { return static_cast<int>(g.size()); }
  /// Throws std::invalid_argument on inconsistent dimensions, asymmetric H or non-finite data.
  void validate() const;
  double objective(const Eigen::VectorXd& z) const { return 0.5 * z.dot(H * z) + g.dot(z); }
};

struct QpSettings {
  double kkt_tol = 1e-8;
  double feasibility_tol = 1e-9;
  int max_iterations = 200;
  int max_cut_rounds = 60;
  double ball_tol = 1e-6;  // accepted ball excess, relative to max(1, radius)
};

struct KktReport {
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double complementarity = 0.0;

  double max() const;
};

/// Linearized ball cut -normal.z[indices] >= rhs accumulated while enforcing a BallConstraint.
struct BallCut {
  int ball = 0;
  Eigen::VectorXd normal;
  double rhs = 0.0;
};

/// Indices into the combined inequality list: [0, m_in) rows of A_in, then n lower bounds,
/// then n upper bounds, then generated ball cuts.
struct QpWarmStart {
  std::vector<int> active;
};

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd mu_in;
  Eigen::VectorXd mu_lb;
  Eigen::VectorXd mu_ub;
  std::vector<BallCut> cuts;
  Eigen::VectorXd mu_cuts;
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  int cut_rounds = 0;
  double regularization = 0.0;  // sigma added to the Hessian diagonal
  double objective = 0.0;
  KktReport kkt;
  std::vector<int> active;  // final active inequality set, usable as a warm start
  /// Farkas ray over the combined inequality list when status is Infeasible.
  Eigen::VectorXd certificate;
};

/// Dual active-set (Goldfarb-Idnani) solver with Givens-updated factorizations. Ties among
/// equally violated or equally blocking constraints go to the lowest index.
QpSolution solve(const QpProblem& problem, const QpWarmStart* warm_start = nullptr,
                 const QpSettings& settings = {});

/// Residuals of a candidate primal-dual pair. Cuts, if present, are treated as inequalities.
KktReport check_kkt(const QpProblem& problem, const QpSolution& solution);

/// Normalized Farkas test: max(|sum y_i n_i|) / (sum y_i b_i); small positive means certified.
double certificate_quality(const QpProblem& problem, const QpSolution& solution);

}  // namespace slungmpc
