#include "slungmpc/ocp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace slungmpc {

const char* to_string(CbfMode m) {
  switch (m) {
    case CbfMode::None: return "none";
    case CbfMode::StateConstraint: return "state_constraint";
    case CbfMode::FirstOrder: return "first_order";
    case CbfMode::HighOrder: return "high_order";
  }
  return "unknown";
}

const char* to_string(PassivityMode m) {
  switch (m) {
    case PassivityMode::Linearized: return "linearized";
    case PassivityMode::FirstNodeExact: return "first_node_exact";
    case PassivityMode::Exact: return "exact";
  }
  return "unknown";
}

const char* to_string(RowKind k) {
  switch (k) {
    case RowKind::Hocbf: return "hocbf";
    case RowKind::FirstOrderCbf: return "first_order_cbf";
    case RowKind::StateConstraint: return "state_constraint";
    case RowKind::Passivity: return "passivity";
    case RowKind::Swing: return "swing";
  }
  return "unknown";
}

namespace {

bool symmetric_psd(const Eigen::MatrixXd& M, bool strict) {
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) {
    return false;
  }
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();
  return strict ? lmin > 0.0 : lmin >= -1e-12;
}

}  // namespace

void OcpConfig::validate() const {
  if (!(T > 0.0)) throw ConfigError("controller.horizon: must be positive");
  if (N < 1) throw ConfigError("controller.nodes: must be at least 1");
  if (!symmetric_psd(Q, false)) throw ConfigError("controller.q_weight: must be symmetric PSD");
  if (!symmetric_psd(R, true)) throw ConfigError("controller.r_weight: must be symmetric PD");
  if (!symmetric_psd(terminal_weight(), false)) {
    throw ConfigError("controller.terminal_weight: must be symmetric PSD");
  }
  if (!(input_bound > 0.0)) throw ConfigError("controller.input_bound: must be positive");
  if (!(swing_weight >= 0.0) || !(swing_weight_quadratic > 0.0)) {
    throw ConfigError("controller.swing_weight: weights must be positive");
  }
  if (!(cbf_margin >= 0.0)) throw ConfigError("controller.cbf_margin: must be non-negative");
  if (sqp_iterations < 1) throw ConfigError("controller.sqp_iterations: must be at least 1");
  if (!(fd_step > 0.0)) throw ConfigError("controller.fd_step: must be positive");
}

void NmpcParams::validate() const {
  ocp.validate();
  model.validate();
  energy.validate();
  safety.validate();
}

StateVector shooting_step(const StateVector& x, const Vec3& u_a, const Vec3& xi_d, double h,
                          const NmpcParams& p) {
  const SystemState s = SystemState::from_vector(x);
  const Vec3 force = u_a + shaping_offset(s, xi_d, p.energy, p.model);
  return rk4_step(x, force, h, p.model);
}

OcpWarmStart cold_start(const SystemState& state, const OcpConfig& config) {
  OcpWarmStart w;
  const StateVector hold = SystemState::hover_at(state.xi).vector();
  w.x.assign(static_cast<std::size_t>(config.N) + 1, hold);
  w.x[0] = state.vector();
  w.u_a.assign(static_cast<std::size_t>(config.N), Vec3::Zero());
  return w;
}

namespace {

// Barrier values of one node for every (obstacle, body) pair, in stacking order.
struct BarrierValues {
  std::vector<double> h;
  std::vector<double> psi1;
  std::vector<double> psi2;  // at the given input
  std::vector<Vec3> a;
};

BarrierValues barrier_values(const StateVector& x, const Vec3& u_a, const Vec3& xi_d,
                             std::span<const ObstacleState> obstacles, bool need_input,
                             const SafetyParams& safety, const NmpcParams& p) {
  BarrierValues out;
  const SystemState s = SystemState::from_vector(x);
  const std::size_t pairs = 2 * obstacles.size();
  out.h.reserve(pairs);
  out.psi1.reserve(pairs);
  if (need_input) {
    const AccelerationSplit acc = acceleration_affine(s, p.model);
    const Vec3 offset = shaping_offset(s, xi_d, p.energy, p.model);
    for (const ObstacleState& o : obstacles) {
      for (Body body : {Body::Quadrotor, Body::Payload}) {
        const HocbfRow row = hocbf_row(s, acc, body, o, safety, p.model, offset);
        out.h.push_back(row.h);
        out.psi1.push_back(row.psi1);
        out.psi2.push_back(row.psi2(u_a));
        out.a.push_back(row.a);
      }
    }
  } else {
    for (const ObstacleState& o : obstacles) {
      for (Body body : {Body::Quadrotor, Body::Payload}) {
        const Vec3 pos = body == Body::Quadrotor ? s.xi : payload_position(s, p.model);
        const Vec3 vel = body == Body::Quadrotor ? s.xi_dot : payload_velocity(s, p.model);
        Vec3 r = clearance_offset(pos, o);
        Vec3 rv = vel - o.velocity;
        if (o.planar) rv.z() = 0.0;
        const double h = clearance(pos, o, body, safety);
        out.h.push_back(h);
        out.psi1.push_back(2.0 * r.dot(rv) + safety.kappa1 * h);
      }
    }
  }
  return out;
}

}  // namespace

Transcription transcribe(const SystemState& state, const Vec3& xi_d,
                         std::span<const ObstacleState> obstacles, const OcpWarmStart& warm,
                         const NmpcParams& p) {
  const OcpConfig& cfg = p.ocp;
  const int N = cfg.N;
  const double h = cfg.step();
  const double fd = cfg.fd_step;
  if (static_cast<int>(warm.x.size()) != N + 1 || static_cast<int>(warm.u_a.size()) != N) {
    throw std::invalid_argument("transcribe: warm start does not match the horizon");
  }

  SafetyParams safety = p.safety;
  safety.delta += cfg.cbf_margin;

  Transcription tr;
  tr.x_bar = warm.x;
  tr.x_bar[0] = state.vector();
  tr.u_bar = warm.u_a;

  const int n_pairs = static_cast<int>(2 * obstacles.size());
  const bool use_cbf = cfg.cbf != CbfMode::None && n_pairs > 0;
  // Extra variables: one slack shared by all swing rows, then the optional global slack.
  const int n_extra = cfg.global_slack ? 2 : 1;
  const int global = 1;

  StagedQp& sq = tr.staged;
  sq.resize(N, n_extra);

  StateVector x_ref = StateVector::Zero();
  x_ref.head<3>() = xi_d;

  for (int k = 0; k < N; ++k) {
    const StateVector& xb = tr.x_bar[k];
    const Vec3& ub = tr.u_bar[k];
    const StateVector f0 = shooting_step(xb, ub, xi_d, h, p);
    for (int i = 0; i < kStateDim; ++i) {
      StateVector xp = xb, xm = xb;
      xp(i) += fd;
      xm(i) -= fd;
      sq.A[k].col(i) = (shooting_step(xp, ub, xi_d, h, p) - shooting_step(xm, ub, xi_d, h, p)) / (2 * fd);
    }
    for (int i = 0; i < kInputDim; ++i) {
      Vec3 up = ub, um = ub;
      up(i) += fd;
      um(i) -= fd;
      sq.B[k].col(i) = (shooting_step(xb, up, xi_d, h, p) - shooting_step(xb, um, xi_d, h, p)) / (2 * fd);
    }
    sq.d[k] = f0 - tr.x_bar[k + 1];
  }

  for (int k = 0; k <= N; ++k) {
    sq.Q[k] = k == N ? cfg.terminal_weight() : cfg.Q;
    sq.q[k] = sq.Q[k] * (tr.x_bar[k] - x_ref);
  }
  for (int k = 0; k < N; ++k) {
    sq.R[k] = cfg.R;
    sq.r[k] = cfg.R * tr.u_bar[k];
    sq.du_lb[k] = Vec3::Constant(-cfg.input_bound) - tr.u_bar[k];
    sq.du_ub[k] = Vec3::Constant(cfg.input_bound) - tr.u_bar[k];
  }
  sq.extra_weight(0) = cfg.swing_weight_quadratic;
  sq.extra_linear(0) = cfg.swing_weight;
  sq.extra_lb(0) = 0.0;
  if (cfg.global_slack) {
    sq.extra_weight(global) = 1.0;
    sq.extra_linear(global) = cfg.global_slack_weight;
    sq.extra_lb(global) = 0.0;
  }
  tr.counts.input_bounds = 2 * kInputDim * N;

  std::vector<std::vector<RowTag>> node_tags(static_cast<std::size_t>(N) + 1);

  for (int k = 0; k <= N; ++k) {
    const StateVector& xb = tr.x_bar[k];
    const bool has_input = k < N;
    const Vec3 ub = has_input ? tr.u_bar[k] : Vec3::Zero();

    std::vector<ObstacleState> obs;
    obs.reserve(obstacles.size());
    for (const ObstacleState& o : obstacles) obs.push_back(o.extrapolate(k * h));

    // Barrier rows at nodes 0..N-1 in every mode. At node 0 the first-order and state rows
    // carry no input coefficient: they only test the measured state.
    RowKind cbf_kind = RowKind::Hocbf;
    const bool cbf_here = use_cbf && has_input;
    if (cfg.cbf == CbfMode::FirstOrder) cbf_kind = RowKind::FirstOrderCbf;
    if (cfg.cbf == CbfMode::StateConstraint) cbf_kind = RowKind::StateConstraint;
    const bool passivity_here = cfg.passivity && has_input;
    const bool swing_here = k >= 1;

    const int rows = (cbf_here ? n_pairs : 0) + (passivity_here ? 1 : 0) + (swing_here ? 4 : 0);
    StageRows& rw = sq.rows[k];
    rw.resize(rows, n_extra);
    auto& tags = node_tags[k];
    int r = 0;

    if (cbf_here) {
      const bool hocbf = cbf_kind == RowKind::Hocbf;
      const BarrierValues nominal = barrier_values(xb, ub, xi_d, obs, hocbf, safety, p);
      const auto& value = [&](const BarrierValues& bv, int j) {
        switch (cbf_kind) {
          case RowKind::Hocbf: return bv.psi2[j];
          case RowKind::FirstOrderCbf: return bv.psi1[j];
          default: return bv.h[j];
        }
      };
      if (k > 0) {
        for (int i = 0; i < kStateDim; ++i) {
          StateVector xp = xb, xm = xb;
          xp(i) += fd;
          xm(i) -= fd;
          const BarrierValues bp = barrier_values(xp, ub, xi_d, obs, hocbf, safety, p);
          const BarrierValues bm = barrier_values(xm, ub, xi_d, obs, hocbf, safety, p);
          for (int j = 0; j < n_pairs; ++j) {
            rw.C(r + j, i) = (value(bp, j) - value(bm, j)) / (2 * fd);
          }
        }
      }
      for (int j = 0; j < n_pairs; ++j) {
        if (hocbf) rw.D.row(r + j) = nominal.a[j].transpose();
        rw.e(r + j) = -value(nominal, j);
        if (cfg.global_slack) rw.E(r + j, global) = 1.0;
        tags.push_back({cbf_kind, k, obs[j / 2].id, j % 2 == 0 ? Body::Quadrotor : Body::Payload});
      }
      r += n_pairs;
      switch (cbf_kind) {
        case RowKind::Hocbf: tr.counts.hocbf += n_pairs; break;
        case RowKind::FirstOrderCbf: tr.counts.first_order += n_pairs; break;
        default: tr.counts.state_constraint += n_pairs; break;
      }
    }

    if (passivity_here) {
      const Vec3 v = xb.segment<3>(5);
      const PassivityRow row = passivity_row(ub, v, p.energy);
      // -coeffs.du - dv-sensitivity.dx >= coeffs.ub - rhs
      rw.D.row(r) = -row.coeffs.transpose();
      if (k > 0 && cfg.passivity_mode != PassivityMode::Exact) {
        rw.C.block<1, 3>(r, 5) = -(ub + 2.0 * p.energy.rho * v).transpose();
      }
      rw.e(r) = row.coeffs.dot(ub) - row.rhs;
      if (cfg.global_slack) rw.E(r, global) = 1.0;
      tags.push_back({RowKind::Passivity, k, -1, Body::Quadrotor});
      ++r;
      ++tr.counts.passivity;

      const bool ball = cfg.passivity_mode == PassivityMode::Exact ||
                        (cfg.passivity_mode == PassivityMode::FirstNodeExact && k == 0);
      if (ball && !cfg.global_slack) {
        const PassivityBall pb = passivity_ball(v, p.energy);
        sq.balls.push_back({k, pb.center - ub, pb.radius_squared < 0.0 ? -1.0 : pb.radius()});
        ++tr.counts.balls;
      }
    }

    if (swing_here) {
      const int s = 0;
      for (int a = 0; a < 2; ++a) {
        const double ang = xb(3 + a);
        rw.C(r, 3 + a) = -1.0;
        rw.E(r, s) = 1.0;
        rw.e(r) = ang - p.model.swing_max;
        tags.push_back({RowKind::Swing, k, -1, Body::Quadrotor});
        ++r;
        rw.C(r, 3 + a) = 1.0;
        rw.E(r, s) = 1.0;
        rw.e(r) = -p.model.swing_max - ang;
        tags.push_back({RowKind::Swing, k, -1, Body::Quadrotor});
        ++r;
      }
      tr.counts.swing += 4;
    }
  }

  tr.qp = condense(sq);
  for (auto& tags : node_tags) {
    tr.tags.insert(tr.tags.end(), tags.begin(), tags.end());
  }
  return tr;
}

namespace {

// Degenerate passivity balls (zero velocity) pin the input; handle them as equalities so the
// cutting-plane loop is not asked to converge onto a single point.
void pin_degenerate_balls(QpProblem& qp) {
  std::vector<BallConstraint> kept;
  std::vector<std::pair<int, double>> pins;
  for (BallConstraint& b : qp.balls) {
    if (b.radius > 1e-9 || b.radius < 0.0) {
      kept.push_back(std::move(b));
      continue;
    }
    for (std::size_t i = 0; i < b.indices.size(); ++i) {
      pins.emplace_back(b.indices[i], b.center(static_cast<Eigen::Index>(i)));
    }
  }
  qp.balls = std::move(kept);
  if (pins.empty()) return;
  const Eigen::Index n = qp.g.size();
  const Eigen::Index m0 = qp.b_eq.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m0 + static_cast<Eigen::Index>(pins.size()), n);
  Eigen::VectorXd b(A.rows());
  if (m0 > 0) {
    A.topRows(m0) = qp.A_eq;
    b.head(m0) = qp.b_eq;
  }
  for (std::size_t i = 0; i < pins.size(); ++i) {
    const Eigen::Index row = m0 + static_cast<Eigen::Index>(i);
    A(row, pins[i].first) = 1.0;
    b(row) = pins[i].second;
  }
  qp.A_eq = std::move(A);
  qp.b_eq = std::move(b);
}

}  // namespace

OcpSolution rti_step(const SystemState& state, const Vec3& xi_d,
                     std::span<const ObstacleState> obstacles, const OcpWarmStart& warm,
                     const NmpcParams& p) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const int N = p.ocp.N;

  OcpSolution sol;
  sol.t = warm.t;
  sol.step = p.ocp.step();
  sol.x = warm.x;
  sol.x[0] = state.vector();
  sol.u_a = warm.u_a;
  sol.status = SolveStatus::Optimal;

  OcpWarmStart lin = warm;
  for (int it = 0; it < p.ocp.sqp_iterations; ++it) {
    Transcription tr;
    try {
      tr = transcribe(state, xi_d, obstacles, lin, p);
    } catch (const DomainError&) {
      sol.status = SolveStatus::IllConditioned;
      break;
    }
    pin_degenerate_balls(tr.qp);
    QpWarmStart qws{lin.active};
    if (qws.active.empty()) {
      // The soft swing bound is almost always inactive: start with its slack at zero.
      qws.active.push_back(static_cast<int>(tr.qp.b_in.size()) + N * kInputDim);
    }
    const QpSolution qs = solve(tr.qp, &qws, p.ocp.qp);
    sol.qp_iterations += qs.iterations;
    sol.cut_rounds += qs.cut_rounds;
    sol.kkt_residual = qs.kkt.max();
    sol.sqp_iterations = it + 1;
    if (qs.status != SolveStatus::Optimal) {
      sol.status = qs.status;
      break;
    }
    const StagedSolution ex = expand(tr.staged, qs.z);
    double step_norm = 0.0;
    for (int k = 0; k < N; ++k) {
      lin.u_a[k] = tr.u_bar[k] + ex.du[k];
      step_norm = std::max(step_norm, ex.du[k].cwiseAbs().maxCoeff());
    }
    for (int k = 0; k <= N; ++k) lin.x[k] = tr.x_bar[k] + ex.dx[k];
    lin.active = qs.active;

    sol.active = qs.active;
    sol.active_counts = RowCounts{};
    const int m_in = static_cast<int>(tr.qp.b_in.size());
    for (int id : qs.active) {
      if (id < m_in) {
        switch (tr.tags[static_cast<std::size_t>(id)].kind) {
          case RowKind::Hocbf: ++sol.active_counts.hocbf; break;
          case RowKind::FirstOrderCbf: ++sol.active_counts.first_order; break;
          case RowKind::StateConstraint: ++sol.active_counts.state_constraint; break;
          case RowKind::Passivity: ++sol.active_counts.passivity; break;
          case RowKind::Swing: ++sol.active_counts.swing; break;
        }
      } else if (id < m_in + 2 * (tr.qp.num_variables())) {
        ++sol.active_counts.input_bounds;
      } else {
        ++sol.active_counts.balls;
      }
    }
    sol.x = lin.x;
    sol.u_a = lin.u_a;
    if (step_norm < p.ocp.sqp_tolerance) break;
  }

  sol.force = sol.u_a[0] + shaping_offset(state, xi_d, p.energy, p.model);
  sol.solve_time = std::chrono::duration<double>(clock::now() - start).count();
  return sol;
}

OcpWarmStart shift_warm_start(const OcpSolution& prev, double shift_nodes) {
  OcpWarmStart w;
  const int N = static_cast<int>(prev.u_a.size());
  w.x.resize(prev.x.size());
  w.u_a.resize(prev.u_a.size());
  for (int k = 0; k <= N; ++k) {
    const double pos = std::min(k + shift_nodes, static_cast<double>(N));
    const int i = static_cast<int>(std::floor(pos));
    const double f = pos - i;
    w.x[k] = i >= N ? prev.x[N] : ((1.0 - f) * prev.x[i] + f * prev.x[i + 1]).eval();
  }
  for (int k = 0; k < N; ++k) {
    const double pos = std::min(k + shift_nodes, static_cast<double>(N - 1));
    const int i = static_cast<int>(std::floor(pos));
    const double f = pos - i;
    w.u_a[k] = i >= N - 1 ? prev.u_a[N - 1] : ((1.0 - f) * prev.u_a[i] + f * prev.u_a[i + 1]).eval();
  }
  w.active = prev.active;
  w.t = prev.t + shift_nodes * prev.step;
  return w;
}

NmpcController::NmpcController(NmpcParams params, double dt_ctrl)
    : params_(std::move(params)), dt_ctrl_(dt_ctrl) {
  params_.validate();
}

void NmpcController::reset() { last_.reset(); }

ControlOutput NmpcController::compute(const ControlRequest& req) {
  OcpWarmStart warm;
  if (last_) {
    warm = shift_warm_start(*last_, dt_ctrl_ / params_.ocp.step());
  } else {
    warm = cold_start(req.state, params_.ocp);
  }
  warm.t = req.t;
  OcpSolution sol = rti_step(req.state, req.xi_d, req.obstacles, warm, params_);

  ControlOutput out;
  out.status = sol.status;
  out.solve_time = sol.solve_time;
  out.qp_iterations = sol.qp_iterations;
  out.kkt_residual = sol.kkt_residual;
  out.u_a = sol.u_a[0];
  out.force = sol.force;
  last_ = std::move(sol);
  return out;
}

}  // namespace slungmpc
