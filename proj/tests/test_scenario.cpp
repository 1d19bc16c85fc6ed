#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "slungmpc/scenario.hpp"

using namespace slungmpc;

namespace {

ScenarioConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
  std::istringstream in(text);
  return parse_scenario(in, overrides);
}

std::string scenario_path(const std::string& name) {
  return std::string(SLUNGMPC_SCENARIO_DIR) + "/" + name + ".ini";
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

const char* kMinimal = R"(
[waypoints]
goal = 2, 0, 1
)";

}  // namespace

TEST_CASE("defaults and explicit values") {
  const ScenarioConfig d = parse(kMinimal);
  CHECK(d.model.m_q == 1.5);
  CHECK(d.sim.dt_ctrl == 0.01);
  CHECK(d.ocp.N == 40);
  CHECK(d.arm.kind == ArmKind::SepNmpc);
  CHECK(d.ocp.input_bound == d.model.u_max);
  REQUIRE(d.waypoints.size() == 1);
  CHECK(d.waypoints[0].position == Vec3(2, 0, 1));
  CHECK(d.waypoints[0].hold == 0.0);
  CHECK(validate_scenario(d).empty());

  const ScenarioConfig c = parse(R"(
[model]
m_l = 0.3
J = 0.1, 0.2, 0.3
[sim]
start = 1, 2, 3
start_swing_deg = 10, -5
[controller]
arm = first_order_cbf_passivity
nodes = 20
q_weight = 2
terminal_scale = 5
passivity_mode = exact
[energy]
K = 1, 2, 3
[waypoints]
a = 1, 1, 1, 0.5
b = 2, 2, 2
[obstacles]
moving = 1, 2, 3, 0.4, 0.1, 0, 0
accel = 4, 5, 6, 0.3, 0, 0, 0, 0, 0.1, 0
)");
  CHECK(c.model.m_l == 0.3);
  CHECK(c.model.J == Vec3(0.1, 0.2, 0.3).asDiagonal().toDenseMatrix());
  CHECK(c.initial.xi == Vec3(1, 2, 3));
  CHECK(c.initial.gamma(0) == doctest::Approx(10 * EIGEN_PI / 180));
  CHECK(c.initial.gamma(1) == doctest::Approx(-5 * EIGEN_PI / 180));
  CHECK(c.arm.kind == ArmKind::FirstOrderCbf);
  CHECK(c.arm.passivity);
  CHECK(c.ocp.N == 20);
  CHECK(c.ocp.Q(3, 3) == 2.0);
  REQUIRE(c.ocp.terminal.has_value());
  CHECK((*c.ocp.terminal)(3, 3) == 10.0);
  CHECK(c.ocp.passivity_mode == PassivityMode::Exact);
  CHECK(c.energy.K(2, 2) == 3.0);
  REQUIRE(c.waypoints.size() == 2);
  CHECK(c.waypoints[0].hold == 0.5);
  CHECK(c.waypoint_names[1] == "b");
  REQUIRE(c.obstacles.size() == 2);
  CHECK(c.obstacles[0].id == 1);
  CHECK(c.obstacles[1].id == 2);
  CHECK(c.obstacles[0].velocity == Vec3(0.1, 0, 0));
  CHECK(c.obstacles[1].acceleration == Vec3(0, 0.1, 0));
  CHECK_FALSE(c.obstacles[0].planar);
  CHECK(c.obstacle_names[1] == "accel");
}

TEST_CASE("parse errors name the field") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains(needle.c_str()), ConfigError);
  };
  fails_with("[model]\nm_q = heavy\n", "model.m_q");
  fails_with("[model]\nmass = 1\n", "unknown key model.mass");
  fails_with("[rotor]\nx = 1\n", "unknown section [rotor]");
  fails_with("x = 1\n", "outside any section");
  fails_with("[model]\nJ = 1, 2\n", "model.J");
  fails_with("[sim]\nstart = 1, 2\n", "sim.start");
  fails_with("[sim]\ntrials = 2.5\n", "sim.trials");
  fails_with("[sim]\nattitude_lag = maybe\n", "sim.attitude_lag");
  fails_with("[controller]\narm = pid\n", "controller.arm");
  fails_with("[controller]\npassivity_mode = loose\n", "controller.passivity_mode");
  fails_with("[waypoints]\ngoal = 1, 2\n", "waypoints.goal");
  fails_with("[obstacles]\nrock = 1, 2, 3, 4, 5\n", "obstacles.rock");
  fails_with("[model]\nm_q = inf\n", "model.m_q");
}

TEST_CASE("syntax errors name the line") {
  CHECK_THROWS_WITH_AS(parse("[model]\nm_q = 1\n[sim\n"), doctest::Contains("line 3"),
                       ConfigError);
}

TEST_CASE("overrides") {
  const ScenarioConfig c = parse(kMinimal, {"model.m_q=2.5", "safety.delta = 0.1", "sim.seed=99"});
  CHECK(c.model.m_q == 2.5);
  CHECK(c.safety.delta == 0.1);
  CHECK(c.sim.seed == 99u);
  CHECK_THROWS_WITH_AS(parse(kMinimal, {"m_q=2"}), doctest::Contains("section.key=value"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse(kMinimal, {"model.bogus=1"}), doctest::Contains("model.bogus"),
                       ConfigError);
}

TEST_CASE("physics validation lists every problem") {
  const ScenarioConfig c = parse(kMinimal, {"model.m_q=-1", "energy.rho=0"});
  const std::vector<std::string> errors = validate_scenario(c);
  CHECK(errors.size() >= 2);
  CHECK(mentions(errors, "m_q"));
  CHECK(mentions(errors, "strictly positive"));

  CHECK(mentions(validate_scenario(parse("[sim]\nstart = 0, 0, 1\n")), "waypoint"));
  CHECK(mentions(validate_scenario(parse(kMinimal, {"sim.start_swing_deg=70, 0"})),
                 "swing"));
}

TEST_CASE("a start inside an obstacle is rejected") {
  const ScenarioConfig c = parse(R"(
[sim]
start = 0, 0, 1
[waypoints]
goal = 4, 0, 1
[obstacles]
planar = true
rock = 0.2, 0, 1, 0.5
)");
  const std::vector<std::string> errors = validate_scenario(c);
  CHECK(mentions(errors, "h_1_Q(x0) < 0"));
  CHECK(mentions(errors, "h_1_L(x0) < 0"));
  CHECK(mentions(errors, "'rock'"));
}

TEST_CASE("shipped scenarios validate") {
  for (const char* name : {"hover", "static_gate", "dynamic_cross", "single_obstacle"}) {
    CAPTURE(name);
    const ScenarioConfig c = load_scenario(scenario_path(name));
    CHECK(c.name == name);
    CHECK(validate_scenario(c).empty());
  }
  CHECK_THROWS_WITH_AS(load_scenario(scenario_path("missing")),
                       doctest::Contains("cannot open"), ConfigError);
}

TEST_CASE("seeded perturbations") {
  const ScenarioConfig base = load_scenario(scenario_path("single_obstacle"));
  CHECK(trial_seed(7, 0) == trial_seed(7, 0));
  CHECK(trial_seed(7, 0) != trial_seed(7, 1));
  CHECK(trial_seed(7, 0) != trial_seed(8, 0));

  const ScenarioConfig a = perturbed(base, trial_seed(7, 3));
  const ScenarioConfig b = perturbed(base, trial_seed(7, 3));
  CHECK(a.initial.vector() == b.initial.vector());
  CHECK(a.initial.xi != base.initial.xi);
  for (int trial = 0; trial < 200; ++trial) {
    const ScenarioConfig p = perturbed(base, trial_seed(1, trial));
    CHECK((p.initial.xi - base.initial.xi).cwiseAbs().maxCoeff() <= 0.5 * base.perturb_position);
    CHECK(p.initial.gamma.cwiseAbs().maxCoeff() <= base.perturb_swing_deg * EIGEN_PI / 180);
    CHECK(p.initial.xi_dot.isZero(0.0));
  }
}

TEST_CASE("arms") {
  const std::vector<Arm> arms = default_arms();
  REQUIRE(arms.size() == 6);
  std::vector<std::string> names;
  for (const Arm& a : arms) {
    names.push_back(a.name());
    const Arm back = Arm::parse(a.name());
    CHECK(back.kind == a.kind);
    CHECK(back.passivity == a.passivity);
    CHECK_FALSE(a.label().empty());
  }
  CHECK(names == std::vector<std::string>{"state_constraint", "state_constraint_passivity",
                                          "first_order_cbf", "first_order_cbf_passivity",
                                          "hocbf", "sep_nmpc"});
  CHECK(Arm::parse("hocbf_passivity").passivity);
  CHECK_THROWS_WITH_AS(Arm::parse("mpc"), doctest::Contains("known:"), ConfigError);
}

TEST_CASE("controller variants") {
  const ScenarioConfig sc = load_scenario(scenario_path("static_gate"));
  NmpcParams base = sc.nmpc_params();
  base.ocp.passivity = false;

  const NmpcParams sep = controller_variant(Arm{ArmKind::SepNmpc, false}, base);
  const NmpcParams hp = controller_variant(Arm::parse("hocbf_passivity"), base);
  CHECK(sep.ocp.cbf == CbfMode::HighOrder);
  CHECK(sep.ocp.passivity);
  CHECK(hp.ocp.cbf == sep.ocp.cbf);
  CHECK(hp.ocp.passivity == sep.ocp.passivity);

  CHECK(controller_variant(Arm::parse("state_constraint"), base).ocp.cbf ==
        CbfMode::StateConstraint);
  CHECK(controller_variant(Arm::parse("first_order_cbf"), base).ocp.cbf == CbfMode::FirstOrder);

  // arms without the energy constraint carry no passivity rows
  const SystemState s = sc.initial;
  const std::vector<ObstacleState> obs = obstacle_states(sc.obstacles, 0.0);
  const Vec3 xi_d = sc.waypoints.front().position;
  for (const Arm& arm : default_arms()) {
    CAPTURE(arm.name());
    const NmpcParams p = controller_variant(arm, base);
    const Transcription tr = transcribe(s, xi_d, obs, cold_start(s, p.ocp), p);
    if (arm.passivity || arm.kind == ArmKind::SepNmpc) {
      CHECK(tr.counts.passivity + tr.counts.balls > 0);
    } else {
      CHECK(tr.counts.passivity == 0);
      CHECK(tr.counts.balls == 0);
    }
    CHECK(tr.counts.cbf() > 0);
  }
}
