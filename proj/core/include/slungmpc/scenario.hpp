#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "slungmpc/ocp.hpp"
#include "slungmpc/sim.hpp"

namespace slungmpc {

/// Closed-loop controller families compared in the ablation.
enum class ArmKind { StateConstraint, FirstOrderCbf, HighOrderCbf, SepNmpc };

struct Arm {
  ArmKind kind = ArmKind::SepNmpc;
  bool passivity = true;

  /// state_constraint, state_constraint_passivity, first_order_cbf, first_order_cbf_passivity,
  /// hocbf, hocbf_passivity, sep_nmpc.
  std::string name() const;
  std::string label() const;  // row label of the ablation table
  static Arm parse(const std::string& name);  // throws ConfigError
};

/// The six arms of the ablation, in table order.
std::vector<Arm> default_arms();

/// Barrier formulation and passivity switch of an arm applied on top of shared gains:
/// StateConstraint imposes h >= 0 at each node, FirstOrderCbf the velocity-level row
/// h_dot + kappa1 h >= 0, HighOrderCbf the second-order rows; SepNmpc is HighOrderCbf with
/// passivity forced on.
NmpcParams controller_variant(const Arm& arm, const NmpcParams& base);

struct ScenarioConfig {
  std::string name;

  ModelParams model;
  SimConfig sim;
  AttitudeLagConfig attitude;
  SystemState initial;
  std::vector<Waypoint> waypoints;
  std::vector<std::string> waypoint_names;
  std::vector<Obstacle> obstacles;
  std::vector<std::string> obstacle_names;

  Arm arm;
  OcpConfig ocp;
  PassivityParams energy;
  SafetyParams safety;

  double switch_radius = 0.15;  // [m]
  int fallback_hold_ticks = 3;

  int trials = 20;
  double perturb_position = 0.1;   // edge of the start-position cube [m]
  double perturb_swing_deg = 3.0;  // half-width of the swing perturbation [deg]

  NmpcParams nmpc_params() const;
  ClosedLoopSetup setup() const;
};

/// Parses the INI text. Overrides are "section.key=value" and replace or add entries before
/// interpretation. Throws ConfigError naming the field (and line for syntax errors).
ScenarioConfig parse_scenario(std::istream& in, const std::vector<std::string>& overrides = {},
                              const std::string& name = "scenario");
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Every schema and physics violation, empty when the scenario is usable. Includes the
/// requirement that the start lies strictly inside every barrier's safe set.
std::vector<std::string> validate_scenario(const ScenarioConfig& scenario);

/// Per-trial seed derived from the master seed; shared by all arms.
std::uint64_t trial_seed(std::uint64_t master, int trial);

/// Start position jittered uniformly in the cube, swing angles in the symmetric band.
ScenarioConfig perturbed(const ScenarioConfig& scenario, std::uint64_t seed);

}  // namespace slungmpc
