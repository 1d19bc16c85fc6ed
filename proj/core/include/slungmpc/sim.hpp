#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slungmpc/energy.hpp"
#include "slungmpc/model.hpp"
#include "slungmpc/obstacle.hpp"
#include "slungmpc/safety.hpp"

namespace slungmpc {

struct SimConfig {
  double dt_sim = 0.001;   // plant step [s]
  double dt_ctrl = 0.01;   // control period [s]
  double duration = 10.0;  // [s]
  std::uint64_t seed = 1;

  /// Plant substeps per control tick; throws ConfigError unless dt_ctrl / dt_sim is integral.
  int substeps() const;
  void validate() const;
};

/// Optional first-order lag between the commanded force and the force the airframe produces,
/// routed through roll/pitch/thrust commands.
struct AttitudeLagConfig {
  bool enabled = false;
  double time_constant = 0.05;  // [s]
  double yaw = 0.0;
};

struct Waypoint {
  Vec3 position = Vec3::Zero();
  double hold = 0.0;  // dwell inside the switching radius before advancing [s]
};

/// Classical RK4 with the force held over the step.
SystemState rk4_step(const SystemState& s, const Vec3& force, double dt, const ModelParams& p);
StateVector rk4_step(const StateVector& x, const Vec3& force, double dt, const ModelParams& p);

struct ControlRequest {
  double t = 0.0;
  SystemState state;
  Vec3 xi_d = Vec3::Zero();
  std::span<const ObstacleState> obstacles;
};

struct ControlOutput {
  Vec3 force = Vec3::Zero();
  Vec3 u_a = Vec3::Zero();
  SolveStatus status = SolveStatus::Optimal;
  double solve_time = 0.0;  // [s]
  int qp_iterations = 0;
  double kkt_residual = 0.0;
};

/// Control-period interface consumed by the closed-loop simulation.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlOutput compute(const ControlRequest& request) = 0;
  virtual void reset() {}
};

struct ClosedLoopSetup {
  ModelParams model;
  PassivityParams energy;  // shaping used for logged u_a and V
  SafetyParams safety;     // radii used for logged h
  SimConfig sim;
  AttitudeLagConfig attitude;
  SystemState initial;
  std::vector<Waypoint> waypoints;
  std::vector<Obstacle> obstacles;
  double switch_radius = 0.15;  // [m]
  int fallback_hold_ticks = 3;
};

struct LogSample {
  double t = 0.0;
  SystemState state;
  Vec3 force = Vec3::Zero();  // applied physical force
  Vec3 u_a = Vec3::Zero();    // applied force in shaped coordinates
  double storage = 0.0;
  std::vector<double> h;      // obstacle-major, quadrotor then payload
  SolveStatus status = SolveStatus::Optimal;
  bool fallback = false;
  double solve_ms = 0.0;
  int qp_iterations = 0;
  int waypoint = 0;
  Vec3 xi_d = Vec3::Zero();
};

struct TrajectoryLog {
  std::vector<std::string> pair_names;  // "h_<id>_<Q|L>"
  std::vector<LogSample> samples;
  bool valid = true;       // false when the swing angles left the validity domain
  bool aborted = false;    // non-finite state
  std::string note;

  /// Longest run of consecutive non-optimal ticks.
  int longest_failure_streak() const;
};

/// Simulates setup.sim.duration seconds, logging one sample per control tick (t = 0 included).
/// Controller failures never throw: the previous good force is held for up to
/// fallback_hold_ticks ticks, then hover thrust is commanded.
TrajectoryLog run_closed_loop(const ClosedLoopSetup& setup, Controller& controller);

std::vector<ObstacleState> obstacle_states(std::span<const Obstacle> obstacles, double t);

}  // namespace slungmpc
