#include "slungmpc/condense.hpp"

#include <limits>

namespace slungmpc {

void StageRows::resize(int rows, int extra) {
  C.setZero(rows, kStateDim);
  D.setZero(rows, kInputDim);
  E.setZero(rows, extra);
  e.setZero(rows);
}

void StagedQp::resize(int n, int n_extra) {
  N = n;
  const auto sn = static_cast<std::size_t>(n);
  A.assign(sn, StateMatrix::Zero());
  B.assign(sn, InputMatrix::Zero());
  d.assign(sn, StateVector::Zero());
  dx0.setZero();
  Q.assign(sn + 1, StateMatrix::Zero());
  q.assign(sn + 1, StateVector::Zero());
  R.assign(sn, Mat3::Zero());
  r.assign(sn, Vec3::Zero());
  const double inf = std::numeric_limits<double>::infinity();
  du_lb.assign(sn, Vec3::Constant(-inf));
  du_ub.assign(sn, Vec3::Constant(inf));
  extra_weight.setZero(n_extra);
  extra_linear.setZero(n_extra);
  extra_lb.setConstant(n_extra, -inf);
  extra_ub.setConstant(n_extra, inf);
  rows.assign(sn + 1, StageRows{});
  for (auto& rw : rows) rw.resize(0, n_extra);
  balls.clear();
}

QpProblem condense(const StagedQp& sq, std::vector<RowOrigin>* origins) {
  const int N = sq.N;
  const int nu = kInputDim;
  const int ns = sq.num_extra();
  const int n = N * nu + ns;

  // Free response c_k and cost-to-go curvature W_k.
  std::vector<StateVector> c(static_cast<std::size_t>(N) + 1);
  c[0] = sq.dx0;
  for (int k = 0; k < N; ++k) c[k + 1] = sq.A[k] * c[k] + sq.d[k];

  std::vector<StateMatrix> W(static_cast<std::size_t>(N) + 1);
  W[N] = sq.Q[N];
  for (int k = N - 1; k >= 1; --k) W[k] = sq.Q[k] + sq.A[k].transpose() * W[k + 1] * sq.A[k];

  QpProblem qp;
  qp.H.setZero(n, n);
  qp.g.setZero(n);

  std::vector<Eigen::Matrix<double, kInputDim, kStateDim>> BW(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) BW[i].noalias() = sq.B[i].transpose() * W[i + 1];
  for (int j = 0; j < N; ++j) {
    InputMatrix G = sq.B[j];
    qp.H.block<3, 3>(j * nu, j * nu) = sq.R[j] + BW[j] * G;
    for (int i = j + 1; i < N; ++i) {
      G = (sq.A[i] * G).eval();
      const Mat3 Hij = BW[i] * G;
      qp.H.block<3, 3>(i * nu, j * nu) = Hij;
      qp.H.block<3, 3>(j * nu, i * nu) = Hij.transpose();
    }
  }

  // Adjoint of the free response gives the gradient.
  StateVector lambda = sq.Q[N] * c[N] + sq.q[N];
  for (int j = N - 1; j >= 0; --j) {
    qp.g.segment<3>(j * nu) = sq.r[j] + sq.B[j].transpose() * lambda;
    lambda = sq.Q[j] * c[j] + sq.q[j] + sq.A[j].transpose() * lambda;
  }

  if (ns > 0) {
    qp.H.bottomRightCorner(ns, ns) = sq.extra_weight.asDiagonal();
    qp.g.tail(ns) = sq.extra_linear;
  }

  int m = 0;
  for (const StageRows& rw : sq.rows) m += rw.size();
  qp.A_in.setZero(m, n);
  qp.b_in.setZero(m);
  if (origins) origins->clear();
  // S = d dx_k / d [du_0 .. du_{k-1}], rolled forward node by node.
  Eigen::Matrix<double, kStateDim, Eigen::Dynamic> S =
      Eigen::Matrix<double, kStateDim, Eigen::Dynamic>::Zero(kStateDim, N * nu);
  Eigen::Matrix<double, kStateDim, Eigen::Dynamic> tmp(kStateDim, N * nu);
  int row = 0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) {
      const int cols = (k - 1) * nu;
      if (cols > 0) {
        tmp.leftCols(cols).noalias() = sq.A[k - 1] * S.leftCols(cols);
        S.leftCols(cols) = tmp.leftCols(cols);
      }
      S.middleCols(cols, nu) = sq.B[k - 1];
    }
    const StageRows& rw = sq.rows[k];
    if (rw.size() == 0) continue;
    const int rk = rw.size();
    qp.b_in.segment(row, rk) = rw.e - rw.C * c[k];
    if (k > 0) qp.A_in.block(row, 0, rk, k * nu).noalias() = rw.C * S.leftCols(k * nu);
    if (k < N) qp.A_in.block(row, k * nu, rk, nu) = rw.D;
    if (ns > 0 && rw.E.cols() == ns) qp.A_in.block(row, N * nu, rk, ns) = rw.E;
    if (origins) {
      for (int i = 0; i < rk; ++i) origins->push_back({k, i});
    }
    row += rk;
  }

  qp.lb.resize(n);
  qp.ub.resize(n);
  for (int k = 0; k < N; ++k) {
    qp.lb.segment<3>(k * nu) = sq.du_lb[k];
    qp.ub.segment<3>(k * nu) = sq.du_ub[k];
  }
  if (ns > 0) {
    qp.lb.tail(ns) = sq.extra_lb;
    qp.ub.tail(ns) = sq.extra_ub;
  }

  for (const InputBall& b : sq.balls) {
    BallConstraint ball;
    ball.indices = {b.node * nu, b.node * nu + 1, b.node * nu + 2};
    ball.center = b.center;
    ball.radius = b.radius;
    qp.balls.push_back(std::move(ball));
  }
  return qp;
}

StagedSolution expand(const StagedQp& sq, const Eigen::VectorXd& z) {
  StagedSolution out;
  const int N = sq.N;
  out.du.resize(static_cast<std::size_t>(N));
  out.dx.resize(static_cast<std::size_t>(N) + 1);
  out.dx[0] = sq.dx0;
  for (int k = 0; k < N; ++k) {
    out.du[k] = z.segment<3>(k * kInputDim);
    out.dx[k + 1] = sq.A[k] * out.dx[k] + sq.B[k] * out.du[k] + sq.d[k];
  }
  out.extra = z.tail(sq.num_extra());
  return out;
}

}  // namespace slungmpc
