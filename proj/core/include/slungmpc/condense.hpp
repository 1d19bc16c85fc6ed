#pragma once

#include <vector>

#include "slungmpc/qp.hpp"

namespace slungmpc {

/// Affine rows C dx_k + D du_k + E s >= e attached to one shooting node.
/// D is ignored at the terminal node.
struct StageRows {
  Eigen::Matrix<double, Eigen::Dynamic, kStateDim> C;
  Eigen::Matrix<double, Eigen::Dynamic, kInputDim> D;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;

  int size() const { return static_cast<int>(e.size()); }
  void resize(int rows, int extra);
};

/// Ball |du_k - center| <= radius on one input.
struct InputBall {
  int node = 0;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Multiple-shooting QP in deviation variables dx_0..dx_N, du_0..du_{N-1} and extra variables s:
///   min  sum_k 1/2 dx'Q_k dx + q_k'dx + sum_k 1/2 du'R_k du + r_k'du + 1/2 s'diag(w_s)s + l_s's
///   s.t. dx_0 given,  dx_{k+1} = A_k dx_k + B_k du_k + d_k,  stage rows, input boxes, balls,
///        s_lb <= s <= s_ub.
struct StagedQp {
  int N = 0;
  std::vector<StateMatrix> A;
  std::vector<InputMatrix> B;
  std::vector<StateVector> d;
  StateVector dx0 = StateVector::Zero();
  std::vector<StateMatrix> Q;  // N + 1
  std::vector<StateVector> q;  // N + 1
  std::vector<Mat3> R;
  std::vector<Vec3> r;
  std::vector<Vec3> du_lb;
  std::vector<Vec3> du_ub;
  Eigen::VectorXd extra_weight;
  Eigen::VectorXd extra_linear;
  Eigen::VectorXd extra_lb;
  Eigen::VectorXd extra_ub;
  std::vector<StageRows> rows;  // N + 1
  std::vector<InputBall> balls;

  int num_extra() const { return static_cast<int>(extra_weight.size()); }
  /// Allocates every container for horizon n and n_extra extra variables with zero data.
  void resize(int n, int n_extra);
};

/// Index of a condensed inequality row in terms of the staged rows.
struct RowOrigin {
  int node = 0;
  int row = 0;
};

/// Eliminates the states. Decision vector z = [du_0, ..., du_{N-1}, s]; A_in rows are the stage
/// rows in node order; bounds cover the input boxes and extra variable bounds.
QpProblem condense(const StagedQp& staged, std::vector<RowOrigin>* origins = nullptr);

struct StagedSolution {
  std::vector<StateVector> dx;
  std::vector<Vec3> du;
  Eigen::VectorXd extra;
};

/// Recovers states from a condensed solution by the linear recursion.
StagedSolution expand(const StagedQp& staged, const Eigen::VectorXd& z);

}  // namespace slungmpc
