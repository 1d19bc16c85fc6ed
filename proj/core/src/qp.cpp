#include "slungmpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slungmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Combined inequality list n_i.z >= b_i: general rows, lower bounds, upper bounds, cuts.
class Constraints {
 public:
  Constraints(const QpProblem& p, const std::vector<BallCut>& cuts)
      : p_(p), cuts_(cuts), n_(p.num_variables()), m_in_(static_cast<int>(p.b_in.size())) {}

  int count() const { return m_in_ + 2 * n_ + static_cast<int>(cuts_.size()); }
  int equalities() const { return static_cast<int>(p_.b_eq.size()); }

  bool present(int i) const {
    if (i < m_in_) return true;
    if (i < m_in_ + n_) return p_.lb.size() > 0 && std::isfinite(p_.lb(i - m_in_));
    if (i < m_in_ + 2 * n_) return p_.ub.size() > 0 && std::isfinite(p_.ub(i - m_in_ - n_));
    return i < count();
  }

  double rhs(int i) const {
    if (i < m_in_) return p_.b_in(i);
    if (i < m_in_ + n_) return p_.lb(i - m_in_);
    if (i < m_in_ + 2 * n_) return -p_.ub(i - m_in_ - n_);
    return cuts_[static_cast<std::size_t>(i - m_in_ - 2 * n_)].rhs;
  }

  double dot(int i, const Eigen::VectorXd& z) const {
    if (i < m_in_) return p_.A_in.row(i).dot(z);
    if (i < m_in_ + n_) return z(i - m_in_);
    if (i < m_in_ + 2 * n_) return -z(i - m_in_ - n_);
    const BallCut& c = cut(i);
    const auto& idx = p_.balls[static_cast<std::size_t>(c.ball)].indices;
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s -= c.normal(static_cast<Eigen::Index>(k)) * z(idx[k]);
    return s;
  }

  /// d = J' n_i
  void project(int i, const Eigen::MatrixXd& J, Eigen::VectorXd& d) const {
    if (i < m_in_) {
      d.noalias() = J.transpose() * p_.A_in.row(i).transpose();
    } else if (i < m_in_ + n_) {
      d = J.row(i - m_in_).transpose();
    } else if (i < m_in_ + 2 * n_) {
      d = -J.row(i - m_in_ - n_).transpose();
    } else {
      const BallCut& c = cut(i);
      const auto& idx = p_.balls[static_cast<std::size_t>(c.ball)].indices;
      d.setZero(J.cols());
      for (std::size_t k = 0; k < idx.size(); ++k) {
        d -= c.normal(static_cast<Eigen::Index>(k)) * J.row(idx[k]).transpose();
      }
    }
  }

  /// n_i.z - b_i for the whole list.
  void slacks(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
    out.resize(count());
    if (m_in_ > 0) out.head(m_in_).noalias() = p_.A_in * z - p_.b_in;
    if (p_.lb.size() > 0) out.segment(m_in_, n_) = z - p_.lb;
    else out.segment(m_in_, n_).setZero();
    if (p_.ub.size() > 0) out.segment(m_in_ + n_, n_) = p_.ub - z;
    else out.segment(m_in_ + n_, n_).setZero();
    for (int i = m_in_ + 2 * n_; i < count(); ++i) out(i) = dot(i, z) - rhs(i);
  }

  double norm(int i) const {
    if (i < m_in_) return p_.A_in.row(i).norm();
    if (i < m_in_ + 2 * n_) return 1.0;
    return cut(i).normal.norm();
  }

  /// acc += w * n_i
  void accumulate(int i, double w, Eigen::VectorXd& acc) const {
    if (i < m_in_) {
      acc += w * p_.A_in.row(i).transpose();
    } else if (i < m_in_ + n_) {
      acc(i - m_in_) += w;
    } else if (i < m_in_ + 2 * n_) {
      acc(i - m_in_ - n_) -= w;
    } else {
      const BallCut& c = cut(i);
      const auto& idx = p_.balls[static_cast<std::size_t>(c.ball)].indices;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        acc(idx[k]) -= w * c.normal(static_cast<Eigen::Index>(k));
      }
    }
  }

 private:
  const BallCut& cut(int i) const { return cuts_[static_cast<std::size_t>(i - m_in_ - 2 * n_)]; }

  const QpProblem& p_;
  const std::vector<BallCut>& cuts_;
  int n_;
  int m_in_;
};

struct ActiveEntry {
  int id;          // inequality index, or -(k + 1) for equality k
  bool equality;
};

struct GiResult {
  Eigen::VectorXd x;
  std::vector<ActiveEntry> active;
  Eigen::VectorXd u;
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  Eigen::VectorXd certificate;  // inequalities then equalities
};

void givens(double a, double b, double& c, double& s, double& h) {
  h = std::hypot(a, b);
  if (h == 0.0) {
    c = 1.0;
    s = 0.0;
  } else {
    c = a / h;
    s = b / h;
  }
}

// Dual active-set method of Goldfarb and Idnani on one fixed set of linear constraints.
class GoldfarbIdnani {
 public:
  GoldfarbIdnani(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Linv_t, const QpProblem& p,
                 const Constraints& cons, const QpSettings& settings)
      : H_(H), p_(p), cons_(cons), settings_(settings), n_(static_cast<int>(H.rows())) {
    J_ = Linv_t;
    R_.setZero(n_, n_);
    d_.resize(n_);
    z_.resize(n_);
    r_.resize(n_);
    u_.setZero(n_ + 1);
  }

  /// Factorizes equalities and the warm-start guess. False if the equalities are dependent.
  bool start(const std::vector<int>& warm) {
    const int m_eq = cons_.equalities();

    // Equalities first, then the warm-start guess, factorized without moving x.
    for (int k = 0; k < m_eq; ++k) {
      d_.noalias() = J_.transpose() * p_.A_eq.row(k).transpose();
      if (d_.tail(n_ - q_).norm() <= 1e-12 * std::max(1.0, p_.A_eq.row(k).norm())) {
        x_ = -J_ * (J_.transpose() * p_.g);
        return false;
      }
      add_to_factorization();
      active_.push_back({-(k + 1), true});
    }
    std::vector<int> guess = warm;
    std::sort(guess.begin(), guess.end());
    guess.erase(std::unique(guess.begin(), guess.end()), guess.end());
    for (int id : guess) {
      if (q_ >= n_ || id < 0 || id >= cons_.count() || !cons_.present(id)) continue;
      cons_.project(id, J_, d_);
      if (d_.tail(n_ - q_).norm() <= 1e-9 * cons_.norm(id)) continue;
      add_to_factorization();
      active_.push_back({id, false});
    }
    subspace_solution();
    // Restore dual feasibility of the guess.
    for (;;) {
      int worst = -1;
      double worst_u = -1e-12;
      for (int j = 0; j < q_; ++j) {
        if (active_[static_cast<std::size_t>(j)].equality) continue;
        if (u_(j) < worst_u) {
          worst_u = u_(j);
          worst = j;
        }
      }
      if (worst < 0) break;
      drop_from_factorization(worst);
      ++iterations_;
      subspace_solution();
    }
    for (int j = 0; j < q_; ++j) {
      if (!active_[static_cast<std::size_t>(j)].equality) u_(j) = std::max(u_(j), 0.0);
    }
    return true;
  }

  /// Runs dual iterations until every constraint currently in the list holds. May be called
  /// again after constraints are appended.
  GiResult iterate() {
    GiResult res;
    std::vector<char> is_active(static_cast<std::size_t>(cons_.count()), 0);
    for (const ActiveEntry& a : active_) {
      if (!a.equality) is_active[static_cast<std::size_t>(a.id)] = 1;
    }

    for (;;) {
      // Most violated inactive constraint, lowest index on ties.
      int p = -1;
      double s_p = -settings_.feasibility_tol;
      cons_.slacks(x_, slack_);
      for (int i = 0; i < cons_.count(); ++i) {
        if (is_active[static_cast<std::size_t>(i)] || !cons_.present(i)) continue;
        const double s = slack_(i);
        if (s < s_p) {
          s_p = s;
          p = i;
        }
      }
      if (p < 0) break;

      double u_plus = 0.0;
      for (;;) {
        if (iterations_ >= settings_.max_iterations) {
          return finish(res, SolveStatus::MaxIterations);
        }
        cons_.project(p, J_, d_);
        z_.noalias() = J_.rightCols(n_ - q_) * d_.tail(n_ - q_);
        for (int i = q_ - 1; i >= 0; --i) {
          double sum = d_(i);
          for (int j = i + 1; j < q_; ++j) sum -= R_(i, j) * r_(j);
          r_(i) = sum / R_(i, i);
        }

        // Dual step length: first active inequality whose multiplier reaches zero.
        double t1 = kInf;
        int l = -1;
        for (int j = 0; j < q_; ++j) {
          const ActiveEntry& a = active_[static_cast<std::size_t>(j)];
          if (a.equality || !(r_(j) > 0.0)) continue;
          const double ratio = u_(j) / r_(j);
          if (ratio < t1 || (ratio == t1 && l >= 0 && a.id < active_[static_cast<std::size_t>(l)].id)) {
            t1 = ratio;
            l = j;
          }
        }
        // Primal step length.
        const double zn = cons_.dot(p, z_);
        const double t2 =
            std::abs(zn) > 1e-14 * std::max(1.0, cons_.norm(p) * cons_.norm(p)) ? -s_p / zn : kInf;
        const double t = std::min(t1, t2);

        if (!std::isfinite(t)) {
          res.certificate.setZero(cons_.count() + cons_.equalities());
          res.certificate(p) = 1.0;
          for (int j = 0; j < q_; ++j) {
            const ActiveEntry& a = active_[static_cast<std::size_t>(j)];
            const int slot = a.equality ? cons_.count() + (-a.id - 1) : a.id;
            res.certificate(slot) = -r_(j);
          }
          return finish(res, SolveStatus::Infeasible);
        }

        if (!std::isfinite(t2)) {
          // Pure dual step.
          for (int j = 0; j < q_; ++j) u_(j) -= t * r_(j);
          u_plus += t;
          is_active[static_cast<std::size_t>(active_[static_cast<std::size_t>(l)].id)] = 0;
          drop_from_factorization(l);
          ++iterations_;
          continue;
        }

        x_ += t * z_;
        for (int j = 0; j < q_; ++j) u_(j) -= t * r_(j);
        u_plus += t;

        if (t == t2) {
          cons_.project(p, J_, d_);
          add_to_factorization();
          active_.push_back({p, false});
          u_(q_ - 1) = u_plus;
          is_active[static_cast<std::size_t>(p)] = 1;
          ++iterations_;
          break;
        }
        is_active[static_cast<std::size_t>(active_[static_cast<std::size_t>(l)].id)] = 0;
        drop_from_factorization(l);
        ++iterations_;
        s_p = cons_.dot(p, x_) - cons_.rhs(p);
        if (s_p >= 0.0) break;
      }
    }
    refine();
    return finish(res, SolveStatus::Optimal);
  }

  GiResult failed() {
    GiResult res;
    return finish(res, SolveStatus::IllConditioned);
  }

 private:
  GiResult finish(GiResult& res, SolveStatus status) {
    res.status = status;
    res.x = x_;
    res.active = active_;
    res.u = u_.head(q_);
    res.iterations = iterations_;
    return res;
  }

  // Minimizer on the manifold of the current active set and its multipliers.
  void subspace_solution() {
    Eigen::VectorXd b(q_);
    for (int j = 0; j < q_; ++j) {
      const ActiveEntry& a = active_[static_cast<std::size_t>(j)];
      b(j) = a.equality ? p_.b_eq(-a.id - 1) : cons_.rhs(a.id);
    }
    subspace_step(p_.g, b, x_, u_);
  }

  // x = J1 R^-T b - J2 J2' g and u = R^-1 (R^-T b + J1' g) solve H x + g = N u, N' x = b.
  void subspace_step(const Eigen::VectorXd& g, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                     Eigen::VectorXd& u) const {
    const auto Rq = R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>();
    const Eigen::VectorXd w = Rq.transpose().solve(b);
    const Eigen::VectorXd J1g = J_.leftCols(q_).transpose() * g;
    const Eigen::VectorXd J2g = J_.rightCols(n_ - q_).transpose() * g;
    x = J_.leftCols(q_) * w - J_.rightCols(n_ - q_) * J2g;
    u.head(q_) = Rq.solve(w + J1g);
  }

  // One step of iterative refinement on the final active set. The factors drift over many
  // updates; correcting against the true residuals recovers the lost digits.
  void refine() {
    Eigen::VectorXd rg = H_ * x_ + p_.g;
    Eigen::VectorXd rp(q_);
    for (int j = 0; j < q_; ++j) {
      const ActiveEntry& a = active_[static_cast<std::size_t>(j)];
      if (a.equality) {
        const int k = -a.id - 1;
        rg -= u_(j) * p_.A_eq.row(k).transpose();
        rp(j) = p_.b_eq(k) - p_.A_eq.row(k).dot(x_);
      } else {
        cons_.accumulate(a.id, -u_(j), rg);
        rp(j) = cons_.rhs(a.id) - cons_.dot(a.id, x_);
      }
    }
    Eigen::VectorXd dx, du(q_);
    subspace_step(rg, rp, dx, du);
    x_ += dx;
    for (int j = 0; j < q_; ++j) {
      u_(j) += du(j);
      if (!active_[static_cast<std::size_t>(j)].equality) u_(j) = std::max(u_(j), 0.0);
    }
  }

  // Reflects d = J'n so its tail vanishes and appends it as a new column of R.
  void add_to_factorization() {
    const int len = n_ - q_;
    if (len > 1) {
      auto tail = d_.segment(q_, len);
      double tau = 0.0, beta = 0.0;
      tail.makeHouseholderInPlace(tau, beta);
      work_.resize(n_);
      J_.rightCols(len).applyHouseholderOnTheRight(tail.tail(len - 1), tau, work_.data());
      d_(q_) = beta;
    }
    R_.col(q_).head(q_ + 1) = d_.head(q_ + 1);
    ++q_;
  }

  void drop_from_factorization(int l) {
    for (int j = l; j < q_ - 1; ++j) {
      R_.col(j).head(q_) = R_.col(j + 1).head(q_);
      active_[static_cast<std::size_t>(j)] = active_[static_cast<std::size_t>(j + 1)];
      u_(j) = u_(j + 1);
    }
    active_.pop_back();
    R_.col(q_ - 1).setZero();
    --q_;
    // R is now upper Hessenberg from column l on; restore the triangle.
    for (int j = l; j < q_; ++j) {
      double c, s, h;
      givens(R_(j, j), R_(j + 1, j), c, s, h);
      if (s == 0.0) continue;
      for (int k = j; k < q_; ++k) {
        const double a = R_(j, k), b = R_(j + 1, k);
        R_(j, k) = c * a + s * b;
        R_(j + 1, k) = -s * a + c * b;
      }
      R_(j + 1, j) = 0.0;
      for (int k = 0; k < n_; ++k) {
        const double a = J_(k, j), b = J_(k, j + 1);
        J_(k, j) = c * a + s * b;
        J_(k, j + 1) = -s * a + c * b;
      }
    }
  }

  const Eigen::MatrixXd& H_;
  const QpProblem& p_;
  const Constraints& cons_;
  const QpSettings& settings_;
  int n_;
  int q_ = 0;
  int iterations_ = 0;
  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  Eigen::VectorXd x_;
  Eigen::VectorXd d_, z_, r_, u_, slack_, work_;
  std::vector<ActiveEntry> active_;
};

}  // namespace

void QpProblem::validate() const {
  const Eigen::Index n = g.size();
  if (H.rows() != n || H.cols() != n) throw std::invalid_argument("qp: H must be n x n");
  if (A_eq.rows() != b_eq.size() || (A_eq.rows() > 0 && A_eq.cols() != n)) {
    throw std::invalid_argument("qp: A_eq/b_eq dimensions");
  }
  if (A_in.rows() != b_in.size() || (A_in.rows() > 0 && A_in.cols() != n)) {
    throw std::invalid_argument("qp: A_in/b_in dimensions");
  }
  if ((lb.size() != 0 && lb.size() != n) || (ub.size() != 0 && ub.size() != n)) {
    throw std::invalid_argument("qp: bound dimensions");
  }
  if (!H.allFinite() || !g.allFinite() || !A_eq.allFinite() || !b_eq.allFinite() ||
      !A_in.allFinite() || !b_in.allFinite()) {
    throw std::invalid_argument("qp: non-finite problem data");
  }
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("qp: H must be symmetric");
  }
  for (const BallConstraint& b : balls) {
    if (b.center.size() != static_cast<Eigen::Index>(b.indices.size())) {
      throw std::invalid_argument("qp: ball center dimension");
    }
    for (int i : b.indices) {
      if (i < 0 || i >= n) throw std::invalid_argument("qp: ball index out of range");
    }
  }
}

double KktReport::max() const {
  return std::max({stationarity, primal_feasibility, dual_feasibility, complementarity});
}

QpSolution solve(const QpProblem& problem, const QpWarmStart* warm_start,
                 const QpSettings& settings) {
  problem.validate();
  const int n = problem.num_variables();
  const int m_in = static_cast<int>(problem.b_in.size());

  QpSolution sol;
  sol.z = Eigen::VectorXd::Zero(n);
  sol.lambda_eq = Eigen::VectorXd::Zero(problem.b_eq.size());
  sol.mu_in = Eigen::VectorXd::Zero(m_in);
  sol.mu_lb = Eigen::VectorXd::Zero(n);
  sol.mu_ub = Eigen::VectorXd::Zero(n);

  for (const BallConstraint& b : problem.balls) {
    if (b.radius < 0.0) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }

  // Regularize only when the Hessian is not safely positive definite.
  Eigen::MatrixXd H = problem.H;
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  bool ok = llt.info() == Eigen::Success &&
            llt.matrixLLT().diagonal().minCoeff() > std::sqrt(1e-9) * 1e-3;
  if (!ok) {
    const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                  H, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    sol.regularization = std::max(0.0, 1e-9 - lambda_min);
    H.diagonal().array() += sol.regularization;
    llt.compute(H);
    if (llt.info() != Eigen::Success) {
      sol.status = SolveStatus::IllConditioned;
      return sol;
    }
  }
  const Eigen::MatrixXd Linv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd Linv_t = Linv.transpose();

  const std::vector<int> warm = warm_start ? warm_start->active : std::vector<int>{};
  const Constraints cons(problem, sol.cuts);
  GoldfarbIdnani solver(H, Linv_t, problem, cons, settings);
  GiResult gi = solver.start(warm) ? solver.iterate() : solver.failed();
  for (int round = 0; gi.status == SolveStatus::Optimal; ++round) {
    bool added = false;
    for (std::size_t b = 0; b < problem.balls.size(); ++b) {
      const BallConstraint& ball = problem.balls[b];
      Eigen::VectorXd w(static_cast<Eigen::Index>(ball.indices.size()));
      for (std::size_t k = 0; k < ball.indices.size(); ++k) {
        w(static_cast<Eigen::Index>(k)) = gi.x(ball.indices[k]) - ball.center(static_cast<Eigen::Index>(k));
      }
      const double dist = w.norm();
      if (dist <= ball.radius + settings.ball_tol * std::max(1.0, ball.radius)) continue;
      // Supporting hyperplane at the boundary point nearest to the iterate.
      BallCut cut;
      cut.ball = static_cast<int>(b);
      cut.normal = w / dist;
      cut.rhs = -(ball.radius + cut.normal.dot(ball.center));
      sol.cuts.push_back(std::move(cut));
      added = true;
    }
    if (!added) break;
    if (round >= settings.max_cut_rounds) {
      gi.status = SolveStatus::MaxIterations;
      break;
    }
    sol.cut_rounds = round + 1;
    gi = solver.iterate();
  }
  sol.iterations = gi.iterations;

  sol.status = gi.status;
  sol.z = gi.x;
  sol.mu_cuts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sol.cuts.size()));
  for (std::size_t j = 0; j < gi.active.size(); ++j) {
    const ActiveEntry& a = gi.active[j];
    const double u = j < static_cast<std::size_t>(gi.u.size()) ? gi.u(static_cast<Eigen::Index>(j)) : 0.0;
    if (a.equality) {
      sol.lambda_eq(-a.id - 1) = u;
    } else {
      sol.active.push_back(a.id);
      if (a.id < m_in) sol.mu_in(a.id) = u;
      else if (a.id < m_in + n) sol.mu_lb(a.id - m_in) = u;
      else if (a.id < m_in + 2 * n) sol.mu_ub(a.id - m_in - n) = u;
      else sol.mu_cuts(a.id - m_in - 2 * n) = u;
    }
  }
  std::sort(sol.active.begin(), sol.active.end());
  sol.certificate = gi.certificate;
  sol.objective = problem.objective(sol.z);
  sol.kkt = check_kkt(problem, sol);
  if (sol.status == SolveStatus::Optimal && sol.kkt.max() > settings.kkt_tol) {
    sol.status = SolveStatus::IllConditioned;
  }
  return sol;
}

KktReport check_kkt(const QpProblem& problem, const QpSolution& solution) {
  const int n = problem.num_variables();
  const Constraints cons(problem, solution.cuts);
  const int m_in = static_cast<int>(problem.b_in.size());
  const Eigen::VectorXd& z = solution.z;

  auto mu_of = [&](int i) -> double {
    if (i < m_in) return solution.mu_in.size() ? solution.mu_in(i) : 0.0;
    if (i < m_in + n) return solution.mu_lb.size() ? solution.mu_lb(i - m_in) : 0.0;
    if (i < m_in + 2 * n) return solution.mu_ub.size() ? solution.mu_ub(i - m_in - n) : 0.0;
    const Eigen::Index k = i - m_in - 2 * n;
    return k < solution.mu_cuts.size() ? solution.mu_cuts(k) : 0.0;
  };

  KktReport rep;
  Eigen::VectorXd grad = problem.H * z + problem.g;
  if (problem.b_eq.size() > 0) {
    grad -= problem.A_eq.transpose() * solution.lambda_eq;
    rep.primal_feasibility = (problem.A_eq * z - problem.b_eq).cwiseAbs().maxCoeff();
  }
  for (int i = 0; i < cons.count(); ++i) {
    if (!cons.present(i)) continue;
    const double mu = mu_of(i);
    const double s = cons.dot(i, z) - cons.rhs(i);
    if (mu != 0.0) cons.accumulate(i, -mu, grad);
    rep.primal_feasibility = std::max(rep.primal_feasibility, -s);
    rep.dual_feasibility = std::max(rep.dual_feasibility, -mu);
    rep.complementarity = std::max(rep.complementarity, std::abs(mu * s));
  }
  rep.stationarity = n > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  rep.primal_feasibility = std::max(rep.primal_feasibility, 0.0);
  return rep;
}

double certificate_quality(const QpProblem& problem, const QpSolution& solution) {
  if (solution.certificate.size() == 0) return kInf;
  const Constraints cons(problem, solution.cuts);
  Eigen::VectorXd combo = Eigen::VectorXd::Zero(problem.num_variables());
  double rhs = 0.0;
  for (int i = 0; i < cons.count(); ++i) {
    const double y = solution.certificate(i);
    if (y == 0.0) continue;
    cons.accumulate(i, y, combo);
    rhs += y * cons.rhs(i);
  }
  for (int k = 0; k < cons.equalities(); ++k) {
    const double y = solution.certificate(cons.count() + k);
    combo += y * problem.A_eq.row(k).transpose();
    rhs += y * problem.b_eq(k);
  }
  if (!(rhs > 0.0)) return kInf;
  return combo.cwiseAbs().maxCoeff() / rhs;
}

}  // namespace slungmpc
