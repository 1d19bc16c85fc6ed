#include "slungmpc/sim.hpp"

#include <algorithm>
#include <cmath>

namespace slungmpc {

ObstacleState ObstacleState::extrapolate(double tau) const {
  ObstacleState out = *this;
  out.position = position + velocity * tau + 0.5 * acceleration * tau * tau;
  out.velocity = velocity + acceleration * tau;
  return out;
}

void Obstacle::validate() const {
  if (!(radius > 0.0)) {
    throw ConfigError("obstacles." + std::to_string(id) + ": radius must be positive");
  }
  if (!center0.allFinite() || !velocity.allFinite() || !acceleration.allFinite()) {
    throw ConfigError("obstacles." + std::to_string(id) + ": non-finite motion parameters");
  }
}

ObstacleState obstacle_position(const Obstacle& obstacle, double t) {
  ObstacleState s;
  s.id = obstacle.id;
  s.radius = obstacle.radius;
  s.planar = obstacle.planar;
  s.position = obstacle.center0 + obstacle.velocity * t + 0.5 * obstacle.acceleration * t * t;
  s.velocity = obstacle.velocity + obstacle.acceleration * t;
  s.acceleration = obstacle.acceleration;
  return s;
}

std::vector<ObstacleState> obstacle_states(std::span<const Obstacle> obstacles, double t) {
  std::vector<ObstacleState> out;
  out.reserve(obstacles.size());
  for (const Obstacle& o : obstacles) out.push_back(obstacle_position(o, t));
  return out;
}

int SimConfig::substeps() const {
  const double ratio = dt_ctrl / dt_sim;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw ConfigError("sim.dt_ctrl must be an integer multiple of sim.dt_sim");
  }
  return static_cast<int>(rounded);
}

void SimConfig::validate() const {
  if (!(dt_sim > 0.0)) throw ConfigError("sim.dt_sim must be positive");
  if (!(dt_ctrl > 0.0)) throw ConfigError("sim.dt_ctrl must be positive");
  if (!(duration >= 0.0)) throw ConfigError("sim.duration must be non-negative");
  substeps();
}

StateVector rk4_step(const StateVector& x, const Vec3& force, double dt, const ModelParams& p) {
  const StateVector k1 = state_derivative(x, force, p);
  const StateVector k2 = state_derivative(x + 0.5 * dt * k1, force, p);
  const StateVector k3 = state_derivative(x + 0.5 * dt * k2, force, p);
  const StateVector k4 = state_derivative(x + dt * k3, force, p);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SystemState rk4_step(const SystemState& s, const Vec3& force, double dt, const ModelParams& p) {
  return SystemState::from_vector(rk4_step(s.vector(), force, dt, p));
}

int TrajectoryLog::longest_failure_streak() const {
  int best = 0, run = 0;
  for (const LogSample& s : samples) {
    run = s.status == SolveStatus::Optimal ? 0 : run + 1;
    best = std::max(best, run);
  }
  return best;
}

namespace {

// Roll, pitch and thrust magnitude actually produced by the airframe under the attitude lag.
struct LagState {
  double roll = 0.0;
  double pitch = 0.0;
  double thrust = 0.0;
};

Vec3 lag_force(const LagState& lag, double yaw) {
  return lag.thrust * rotation_from_euler(lag.roll, lag.pitch, yaw).col(2);
}

}  // namespace

TrajectoryLog run_closed_loop(const ClosedLoopSetup& setup, Controller& controller) {
  setup.sim.validate();
  const int substeps = setup.sim.substeps();
  const double dt_sim = setup.sim.dt_ctrl / substeps;
  const auto ticks = static_cast<long>(std::floor(setup.sim.duration / setup.sim.dt_ctrl + 1e-9));
  const ModelParams& model = setup.model;

  TrajectoryLog log;
  for (const Obstacle& o : setup.obstacles) {
    log.pair_names.push_back("h_" + std::to_string(o.id) + "_Q");
    log.pair_names.push_back("h_" + std::to_string(o.id) + "_L");
  }
  log.samples.reserve(static_cast<std::size_t>(ticks + 1));

  controller.reset();
  SystemState state = setup.initial;
  std::size_t waypoint = 0;
  double dwell = 0.0;
  const Vec3 hover(0.0, 0.0, model.hover_thrust());
  Vec3 last_good_force = hover;
  int failures = 0;

  LagState lag;
  if (setup.attitude.enabled) {
    const AttitudeCommand c = attitude_command(hover, setup.attitude.yaw);
    lag = {c.roll, c.pitch, c.thrust};
  }

  for (long k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) * setup.sim.dt_ctrl;

    Vec3 xi_d = state.xi;
    if (!setup.waypoints.empty()) {
      if (waypoint + 1 < setup.waypoints.size() &&
          (state.xi - setup.waypoints[waypoint].position).norm() < setup.switch_radius) {
        if (dwell >= setup.waypoints[waypoint].hold - 1e-12) {
          ++waypoint;
          dwell = 0.0;
        } else {
          dwell += setup.sim.dt_ctrl;
        }
      }
      xi_d = setup.waypoints[waypoint].position;
    }

    const std::vector<ObstacleState> obstacles = obstacle_states(setup.obstacles, t);
    ControlRequest request{t, state, xi_d, obstacles};
    const ControlOutput out = controller.compute(request);

    Vec3 force = out.force;
    bool fallback = false;
    if (out.status == SolveStatus::Optimal && out.force.allFinite()) {
      failures = 0;
      last_good_force = force;
    } else {
      ++failures;
      fallback = true;
      force = failures <= setup.fallback_hold_ticks ? last_good_force : hover;
    }

    LogSample sample;
    sample.t = t;
    sample.state = state;
    sample.force = force;
    sample.u_a = shaped_from_force(force, state, xi_d, setup.energy, model);
    sample.storage = storage(state, xi_d, setup.energy, model);
    sample.status = out.status;
    sample.fallback = fallback;
    sample.solve_ms = out.solve_time * 1e3;
    sample.qp_iterations = out.qp_iterations;
    sample.waypoint = static_cast<int>(waypoint);
    sample.xi_d = xi_d;
    const Vec3 p_l = payload_position(state, model);
    for (const ObstacleState& o : obstacles) {
      sample.h.push_back(clearance(state.xi, o, Body::Quadrotor, setup.safety));
      sample.h.push_back(clearance(p_l, o, Body::Payload, setup.safety));
    }
    log.samples.push_back(std::move(sample));

    if (k == ticks) break;

    try {
      for (int i = 0; i < substeps; ++i) {
        Vec3 applied = force;
        if (setup.attitude.enabled) {
          const AttitudeCommand c = attitude_command(force, setup.attitude.yaw);
          const double a = 1.0 - std::exp(-dt_sim / setup.attitude.time_constant);
          lag.roll += a * (c.roll - lag.roll);
          lag.pitch += a * (c.pitch - lag.pitch);
          lag.thrust += a * (c.thrust - lag.thrust);
          applied = lag_force(lag, setup.attitude.yaw);
        }
        state = rk4_step(state, applied, dt_sim, model);
      }
    } catch (const DomainError& e) {
      log.valid = false;
      log.note = e.what();
      break;
    }
    if (!state.finite()) {
      log.aborted = true;
      log.note = "non-finite state";
      break;
    }
    if (std::abs(state.gamma(0)) > kSwingValidityLimit ||
        std::abs(state.gamma(1)) > kSwingValidityLimit) {
      log.valid = false;
      log.note = "swing angle beyond validity limit";
      break;
    }
  }
  return log;
}

}  // namespace slungmpc
