#pragma once

#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "slungmpc/qp.hpp"

namespace slungmpc::testing {

/// Every inequality of a QpProblem as a row n.z >= c: A_in, then finite lower bounds, then
/// finite upper bounds. `source` keeps (kind, index) so multipliers can be mapped back.
struct RowList {
  Eigen::MatrixXd N;
  Eigen::VectorXd c;
  std::vector<std::pair<int, int>> source;  // kind 0 = A_in, 1 = lb, 2 = ub
};

inline RowList gather_rows(const QpProblem& p) {
  const int n = p.num_variables();
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  RowList out;
  for (Eigen::Index i = 0; i < p.b_in.size(); ++i) {
    rows.push_back(p.A_in.row(i));
    rhs.push_back(p.b_in(i));
    out.source.emplace_back(0, static_cast<int>(i));
  }
  for (int kind = 1; kind <= 2; ++kind) {
    const Eigen::VectorXd& bound = kind == 1 ? p.lb : p.ub;
    for (Eigen::Index j = 0; j < bound.size(); ++j) {
      if (!std::isfinite(bound(j))) continue;
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
      r(j) = kind == 1 ? 1.0 : -1.0;
      rows.push_back(r);
      rhs.push_back(kind == 1 ? bound(j) : -bound(j));
      out.source.emplace_back(kind, static_cast<int>(j));
    }
  }
  out.N.resize(static_cast<Eigen::Index>(rows.size()), n);
  out.c.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.N.row(static_cast<Eigen::Index>(i)) = rows[i];
    out.c(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  return out;
}

struct OracleResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd mu;  // one per gathered row
  double objective = 0.0;
};

/// Exhaustive active-set enumeration for a strictly convex QP: solve the equality-constrained
/// KKT system of every subset and keep the one that is primal and dual feasible.
/// Returns nullopt when no subset is primal feasible.
inline std::optional<OracleResult> enumerate_active_sets(const QpProblem& p) {
  const int n = p.num_variables();
  const int me = static_cast<int>(p.b_eq.size());
  const RowList rows = gather_rows(p);
  const int m = static_cast<int>(rows.c.size());

  std::optional<OracleResult> best;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    const int k = std::popcount(mask) + me;
    if (k > n) continue;
    Eigen::MatrixXd Ak(k, n);
    Eigen::VectorXd bk(k);
    std::vector<int> idx;
    int r = 0;
    for (int e = 0; e < me; ++e, ++r) {
      Ak.row(r) = p.A_eq.row(e);
      bk(r) = p.b_eq(e);
    }
    for (int i = 0; i < m; ++i) {
      if (!(mask >> i & 1u)) continue;
      Ak.row(r) = rows.N.row(i);
      bk(r++) = rows.c(i);
      idx.push_back(i);
    }
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    K.topLeftCorner(n, n) = p.H;
    K.topRightCorner(n, k) = -Ak.transpose();
    K.bottomLeftCorner(k, n) = Ak;
    Eigen::VectorXd rhs(n + k);
    rhs << -p.g, bk;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + k) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd z = sol.head(n);
    const Eigen::VectorXd nu = sol.tail(k);

    if (m > 0 && ((rows.N * z - rows.c).array() < -1e-9).any()) continue;
    bool dual_ok = true;
    for (int j = me; j < k; ++j) dual_ok = dual_ok && nu(j) >= -1e-9;
    if (!dual_ok) continue;

    OracleResult res;
    res.z = z;
    res.lambda_eq = nu.head(me);
    res.mu = Eigen::VectorXd::Zero(m);
    for (std::size_t j = 0; j < idx.size(); ++j)
      res.mu(idx[j]) = nu(me + static_cast<Eigen::Index>(j));
    res.objective = p.objective(z);
    if (!best || res.objective < best->objective) best = res;
  }
  return best;
}

/// Whether any point satisfies the constraints: the projection of the origin exists iff the
/// set is non-empty.
inline bool feasible(const QpProblem& p) {
  QpProblem q = p;
  q.H = Eigen::MatrixXd::Identity(p.num_variables(), p.num_variables());
  q.g = Eigen::VectorXd::Zero(p.num_variables());
  return enumerate_active_sets(q).has_value();
}

/// Solver multipliers in the gathered row order.
inline Eigen::VectorXd gathered_multipliers(const QpProblem& p, const QpSolution& s) {
  const RowList rows = gather_rows(p);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(rows.source.size()));
  for (std::size_t i = 0; i < rows.source.size(); ++i) {
    const auto [kind, j] = rows.source[i];
    const Eigen::VectorXd& v = kind == 0 ? s.mu_in : kind == 1 ? s.mu_lb : s.mu_ub;
    mu(static_cast<Eigen::Index>(i)) = v.size() ? v(j) : 0.0;
  }
  return mu;
}

/// Random strictly convex QP with n <= 6 variables and at most 8 inequalities (general rows
/// plus finite bounds) and up to two equalities.
inline QpProblem random_small_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 6);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = dim(rng);
  const int m_total = std::uniform_int_distribution<int>(1, 8)(rng);
  const int n_bounds = std::uniform_int_distribution<int>(0, std::min(m_total, n))(rng);
  const int m_in = m_total - n_bounds;
  const int me = std::uniform_int_distribution<int>(0, std::min(2, n - 1))(rng);

  QpProblem p;
  Eigen::MatrixXd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L(i, j) = normal(rng);
  p.H = L * L.transpose() + 0.05 * Eigen::MatrixXd::Identity(n, n);
  p.g.resize(n);
  for (int i = 0; i < n; ++i) p.g(i) = 3.0 * normal(rng);

  p.A_in.resize(m_in, n);
  p.b_in.resize(m_in);
  for (int i = 0; i < m_in; ++i) {
    for (int j = 0; j < n; ++j) p.A_in(i, j) = normal(rng);
    p.b_in(i) = normal(rng);
  }
  p.A_eq.resize(me, n);
  p.b_eq.resize(me);
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < n; ++j) p.A_eq(i, j) = normal(rng);
    p.b_eq(i) = normal(rng);
  }
  if (n_bounds > 0) {
    const double inf = std::numeric_limits<double>::infinity();
    p.lb = Eigen::VectorXd::Constant(n, -inf);
    p.ub = Eigen::VectorXd::Constant(n, inf);
    for (int b = 0; b < n_bounds; ++b) {
      const int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
      if (unit(rng) < 0.5 && !std::isfinite(p.lb(j)))
        p.lb(j) = -0.5 - unit(rng);
      else if (!std::isfinite(p.ub(j)))
        p.ub(j) = 0.5 + unit(rng);
      else
        p.lb(j) = -0.5 - unit(rng);
    }
  }
  return p;
}

}  // namespace slungmpc::testing
