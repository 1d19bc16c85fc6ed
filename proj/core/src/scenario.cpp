#include "slungmpc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace slungmpc {

namespace {

namespace pt = boost::property_tree;

constexpr double kDeg = EIGEN_PI / 180.0;

struct ArmEntry {
  const char* name;
  const char* label;
  ArmKind kind;
  bool passivity;
};

constexpr ArmEntry kArms[] = {
    {"state_constraint", "State Constraint only", ArmKind::StateConstraint, false},
    {"state_constraint_passivity", "State Constraint + Passivity", ArmKind::StateConstraint, true},
    {"first_order_cbf", "1st-order CBF only", ArmKind::FirstOrderCbf, false},
    {"first_order_cbf_passivity", "1st-order CBF + Passivity", ArmKind::FirstOrderCbf, true},
    {"hocbf", "High-Order CBF only", ArmKind::HighOrderCbf, false},
    {"hocbf_passivity", "High-Order CBF + Passivity", ArmKind::HighOrderCbf, true},
    {"sep_nmpc", "SEP-NMPC", ArmKind::SepNmpc, true},
};

const ArmEntry& arm_entry(const Arm& arm) {
  for (const ArmEntry& e : kArms) {
    if (e.kind == arm.kind && (arm.kind == ArmKind::SepNmpc || e.passivity == arm.passivity)) {
      return e;
    }
  }
  return kArms[6];
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field + ": expected a number, got '" + t + "'");
  }
  if (!std::isfinite(v)) throw ConfigError(field + ": value must be finite");
  return v;
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(field, item));
  return out;
}

// Typed access to one section; remembers which keys were consumed so leftovers are reported.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::string field(const std::string& key) const { return name_ + "." + key; }

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    if (tree_ == nullptr) return nullptr;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return nullptr;
    return &it->second.data();
  }

  void number(const std::string& key, double& out) {
    if (const std::string* s = raw(key)) out = parse_number(field(key), *s);
  }

  void integer(const std::string& key, int& out) {
    if (const std::string* s = raw(key)) {
      const double v = parse_number(field(key), *s);
      if (v != std::round(v) || std::abs(v) > 1e9) {
        throw ConfigError(field(key) + ": expected an integer");
      }
      out = static_cast<int>(v);
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const std::string* s = raw(key)) {
      const std::string t = trim(*s);
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
      if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(field(key) + ": expected a non-negative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const std::string* s = raw(key)) {
      const std::string t = trim(*s);
      if (t == "true" || t == "1" || t == "on" || t == "yes") {
        out = true;
      } else if (t == "false" || t == "0" || t == "off" || t == "no") {
        out = false;
      } else {
        throw ConfigError(field(key) + ": expected true or false");
      }
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const std::string* s = raw(key)) out = trim(*s);
  }

  template <int Dim>
  void vector(const std::string& key, Eigen::Matrix<double, Dim, 1>& out, double scale = 1.0) {
    if (const std::string* s = raw(key)) {
      const std::vector<double> v = parse_list(field(key), *s);
      if (static_cast<int>(v.size()) != Dim) {
        throw ConfigError(field(key) + ": expected " + std::to_string(Dim) + " values");
      }
      for (int i = 0; i < Dim; ++i) out(i) = scale * v[static_cast<std::size_t>(i)];
    }
  }

  // Either one value (times identity), a diagonal or a full row-major matrix.
  template <int Dim>
  void matrix(const std::string& key, Eigen::Matrix<double, Dim, Dim>& out) {
    if (const std::string* s = raw(key)) {
      const std::vector<double> v = parse_list(field(key), *s);
      if (v.size() == 1) {
        out = Eigen::Matrix<double, Dim, Dim>::Identity() * v[0];
      } else if (static_cast<int>(v.size()) == Dim) {
        out = Eigen::Map<const Eigen::Matrix<double, Dim, 1>>(v.data()).asDiagonal();
      } else if (static_cast<int>(v.size()) == Dim * Dim) {
        out = Eigen::Map<const Eigen::Matrix<double, Dim, Dim, Eigen::RowMajor>>(v.data());
      } else {
        throw ConfigError(field(key) + ": expected 1, " + std::to_string(Dim) + " or " +
                          std::to_string(Dim * Dim) + " values");
      }
    }
  }

  void reject_unknown() const {
    if (tree_ == nullptr) return;
    for (const auto& [key, _] : *tree_) {
      if (!used_.contains(key)) throw ConfigError("unknown key " + field(key));
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

PassivityMode parse_passivity_mode(const std::string& field, const std::string& s) {
  if (s == "linearized") return PassivityMode::Linearized;
  if (s == "first_node_exact") return PassivityMode::FirstNodeExact;
  if (s == "exact") return PassivityMode::Exact;
  throw ConfigError(field + ": expected linearized, first_node_exact or exact");
}

void apply_override(pt::ptree& tree, const std::string& item) {
  const auto eq = item.find('=');
  const std::string path = eq == std::string::npos ? std::string() : trim(item.substr(0, eq));
  const auto dot = path.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot == 0 ||
      dot + 1 == path.size()) {
    throw ConfigError("override '" + item + "': expected section.key=value");
  }
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  const std::string value = trim(item.substr(eq + 1));
  const auto sit = tree.find(section);
  if (sit == tree.not_found()) {
    pt::ptree fresh;
    fresh.push_back({key, pt::ptree(value)});
    tree.push_back({section, fresh});
    return;
  }
  pt::ptree& sec = sit->second;
  const auto it = sec.find(key);
  if (it != sec.not_found()) {
    it->second.data() = value;
  } else {
    sec.push_back({key, pt::ptree(value)});
  }
}

const std::set<std::string> kSections = {"model",  "sim",       "controller", "safety",
                                         "energy", "waypoints", "obstacles"};

}  // namespace

std::string Arm::name() const { return arm_entry(*this).name; }
std::string Arm::label() const { return arm_entry(*this).label; }

Arm Arm::parse(const std::string& name) {
  for (const ArmEntry& e : kArms) {
    if (name == e.name) return Arm{e.kind, e.passivity};
  }
  std::string known;
  for (const ArmEntry& e : kArms) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw ConfigError("controller.arm: unknown arm '" + name + "' (known: " + known + ")");
}

std::vector<Arm> default_arms() {
  return {Arm{ArmKind::StateConstraint, false}, Arm{ArmKind::StateConstraint, true},
          Arm{ArmKind::FirstOrderCbf, false},   Arm{ArmKind::FirstOrderCbf, true},
          Arm{ArmKind::HighOrderCbf, false},    Arm{ArmKind::SepNmpc, true}};
}

NmpcParams controller_variant(const Arm& arm, const NmpcParams& base) {
  NmpcParams p = base;
  switch (arm.kind) {
    case ArmKind::StateConstraint: p.ocp.cbf = CbfMode::StateConstraint; break;
    case ArmKind::FirstOrderCbf: p.ocp.cbf = CbfMode::FirstOrder; break;
    case ArmKind::HighOrderCbf:
    case ArmKind::SepNmpc: p.ocp.cbf = CbfMode::HighOrder; break;
  }
  p.ocp.passivity = arm.kind == ArmKind::SepNmpc || arm.passivity;
  return p;
}

NmpcParams ScenarioConfig::nmpc_params() const {
  NmpcParams base;
  base.ocp = ocp;
  base.model = model;
  base.energy = energy;
  base.safety = safety;
  return controller_variant(arm, base);
}

ClosedLoopSetup ScenarioConfig::setup() const {
  ClosedLoopSetup s;
  s.model = model;
  s.energy = energy;
  s.safety = safety;
  s.sim = sim;
  s.attitude = attitude;
  s.initial = initial;
  s.waypoints = waypoints;
  s.obstacles = obstacles;
  s.switch_radius = switch_radius;
  s.fallback_hold_ticks = fallback_hold_ticks;
  return s;
}

ScenarioConfig parse_scenario(std::istream& in, const std::vector<std::string>& overrides,
                              const std::string& name) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const std::string& o : overrides) apply_override(tree, o);

  for (const auto& [key, child] : tree) {
    if (!kSections.contains(key)) {
      throw ConfigError(child.empty() ? "key '" + key + "' outside any section"
                                      : "unknown section [" + key + "]");
    }
  }
  auto section = [&](const std::string& s) {
    const auto it = tree.find(s);
    return Section(it == tree.not_found() ? nullptr : &it->second, s);
  };

  ScenarioConfig c;
  c.name = name;

  {
    Section s = section("model");
    s.number("m_q", c.model.m_q);
    s.number("m_l", c.model.m_l);
    s.number("l", c.model.l);
    s.number("g", c.model.g);
    s.matrix("J", c.model.J);
    s.number("u_max", c.model.u_max);
    double swing_deg = c.model.swing_max / kDeg;
    s.number("swing_max_deg", swing_deg);
    c.model.swing_max = swing_deg * kDeg;
    s.reject_unknown();
  }
  c.ocp.input_bound = c.model.u_max;
  {
    Section s = section("sim");
    s.number("dt_sim", c.sim.dt_sim);
    s.number("dt_ctrl", c.sim.dt_ctrl);
    s.number("duration", c.sim.duration);
    s.seed("seed", c.sim.seed);
    s.vector("start", c.initial.xi);
    s.vector("start_swing_deg", c.initial.gamma, kDeg);
    s.vector("start_velocity", c.initial.xi_dot);
    s.number("switch_radius", c.switch_radius);
    s.integer("fallback_hold_ticks", c.fallback_hold_ticks);
    s.integer("trials", c.trials);
    s.number("perturb_position", c.perturb_position);
    s.number("perturb_swing_deg", c.perturb_swing_deg);
    s.boolean("attitude_lag", c.attitude.enabled);
    s.number("attitude_time_constant", c.attitude.time_constant);
    double yaw_deg = c.attitude.yaw / kDeg;
    s.number("yaw_deg", yaw_deg);
    c.attitude.yaw = yaw_deg * kDeg;
    s.reject_unknown();
  }
  {
    Section s = section("controller");
    std::string arm = c.arm.name();
    s.text("arm", arm);
    c.arm = Arm::parse(arm);
    s.number("horizon", c.ocp.T);
    s.integer("nodes", c.ocp.N);
    s.matrix("q_weight", c.ocp.Q);
    s.matrix("r_weight", c.ocp.R);
    if (const std::string* t = s.raw("terminal_scale")) {
      c.ocp.terminal = parse_number(s.field("terminal_scale"), *t) * c.ocp.Q;
    }
    std::string mode = "first_node_exact";
    s.text("passivity_mode", mode);
    c.ocp.passivity_mode = parse_passivity_mode(s.field("passivity_mode"), mode);
    s.number("cbf_margin", c.ocp.cbf_margin);
    s.number("input_bound", c.ocp.input_bound);
    s.number("swing_weight", c.ocp.swing_weight);
    s.boolean("global_slack", c.ocp.global_slack);
    s.number("global_slack_weight", c.ocp.global_slack_weight);
    s.integer("sqp_iterations", c.ocp.sqp_iterations);
    s.integer("qp_max_iterations", c.ocp.qp.max_iterations);
    s.reject_unknown();
  }
  {
    Section s = section("safety");
    s.number("kappa1", c.safety.kappa1);
    s.number("kappa2", c.safety.kappa2);
    s.number("r_q", c.safety.r_q);
    s.number("r_l", c.safety.r_l);
    s.number("delta", c.safety.delta);
    s.reject_unknown();
  }
  {
    Section s = section("energy");
    s.number("rho", c.energy.rho);
    s.number("epsilon", c.energy.epsilon);
    s.matrix("K", c.energy.K);
    s.reject_unknown();
  }
  if (const auto it = tree.find("waypoints"); it != tree.not_found()) {
    for (const auto& [key, value] : it->second) {
      const std::string field = "waypoints." + key;
      const std::vector<double> v = parse_list(field, value.data());
      if (v.size() != 3 && v.size() != 4) {
        throw ConfigError(field + ": expected x, y, z[, hold]");
      }
      Waypoint w;
      w.position = Vec3(v[0], v[1], v[2]);
      if (v.size() == 4) w.hold = v[3];
      c.waypoints.push_back(w);
      c.waypoint_names.push_back(key);
    }
  }
  if (const auto it = tree.find("obstacles"); it != tree.not_found()) {
    bool planar = false;
    for (const auto& [key, value] : it->second) {
      if (key == "planar") {
        Section s(&it->second, "obstacles");
        s.boolean("planar", planar);
      }
    }
    int id = 0;
    for (const auto& [key, value] : it->second) {
      if (key == "planar") continue;
      const std::string field = "obstacles." + key;
      const std::vector<double> v = parse_list(field, value.data());
      if (v.size() != 4 && v.size() != 7 && v.size() != 10) {
        throw ConfigError(field + ": expected cx, cy, cz, radius[, vx, vy, vz[, ax, ay, az]]");
      }
      Obstacle o;
      o.id = ++id;
      o.center0 = Vec3(v[0], v[1], v[2]);
      o.radius = v[3];
      if (v.size() >= 7) o.velocity = Vec3(v[4], v[5], v[6]);
      if (v.size() == 10) o.acceleration = Vec3(v[7], v[8], v[9]);
      o.planar = planar;
      c.obstacles.push_back(o);
      c.obstacle_names.push_back(key);
    }
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  return parse_scenario(in, overrides, std::filesystem::path(path).stem().string());
}

std::vector<std::string> validate_scenario(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      errors.emplace_back(e.what());
    }
  };
  check([&] { c.model.validate(); });
  check([&] { c.sim.validate(); });
  check([&] { c.ocp.validate(); });
  check([&] { c.energy.validate(); });
  check([&] { c.safety.validate(); });
  for (const Obstacle& o : c.obstacles) check([&] { o.validate(); });

  if (c.waypoints.empty()) errors.emplace_back("waypoints: at least one waypoint is required");
  for (std::size_t i = 0; i < c.waypoints.size(); ++i) {
    if (!(c.waypoints[i].hold >= 0.0)) {
      errors.push_back("waypoints." + c.waypoint_names[i] + ": hold time must be non-negative");
    }
  }
  if (!(c.switch_radius > 0.0)) errors.emplace_back("sim.switch_radius: must be positive");
  if (c.fallback_hold_ticks < 0) errors.emplace_back("sim.fallback_hold_ticks: must be >= 0");
  if (c.trials < 1) errors.emplace_back("sim.trials: must be at least 1");
  if (!(c.perturb_position >= 0.0) || !(c.perturb_swing_deg >= 0.0)) {
    errors.emplace_back("sim.perturb_position/sim.perturb_swing_deg: must be non-negative");
  }
  if (c.attitude.enabled && !(c.attitude.time_constant > 0.0)) {
    errors.emplace_back("sim.attitude_time_constant: must be positive");
  }
  if (!c.initial.finite()) {
    errors.emplace_back("sim.start: initial state must be finite");
    return errors;
  }
  if (std::abs(c.initial.gamma(0)) >= c.model.swing_max ||
      std::abs(c.initial.gamma(1)) >= c.model.swing_max) {
    errors.emplace_back("sim.start_swing_deg: initial swing outside model.swing_max_deg");
  }
  if (!(c.model.l > 0.0)) return errors;

  const Vec3 p_l = payload_position(c.initial, c.model);
  for (std::size_t i = 0; i < c.obstacles.size(); ++i) {
    const Obstacle& o = c.obstacles[i];
    for (Body body : {Body::Quadrotor, Body::Payload}) {
      const Vec3& p = body == Body::Quadrotor ? c.initial.xi : p_l;
      const double h = clearance(p, o, 0.0, body, c.safety);
      if (!(h > 0.0)) {
        std::ostringstream msg;
        msg << "h_" << o.id << "_" << to_string(body) << "(x0) < 0: "
            << (body == Body::Quadrotor ? "quadrotor" : "payload")
            << " starts inside the inflated disc of obstacle '" << c.obstacle_names[i]
            << "' (h = " << h << ")";
        errors.push_back(msg.str());
      }
    }
  }

  // Starting at rest, the exact passivity constraint pins u_a = 0; the first QP is then
  // feasible only if every second-order barrier holds with the shaping force alone.
  const NmpcParams nmpc = c.nmpc_params();
  if (errors.empty() && nmpc.ocp.passivity && nmpc.ocp.cbf == CbfMode::HighOrder &&
      c.initial.xi_dot.norm() == 0.0 && !c.waypoints.empty()) {
    SafetyParams safety = c.safety;
    safety.delta += c.ocp.cbf_margin;
    const Vec3 offset = shaping_offset(c.initial, c.waypoints.front().position, c.energy, c.model);
    const std::vector<ObstacleState> obstacles = obstacle_states(c.obstacles, 0.0);
    try {
      const StackedRows rows = stack_rows(c.initial, obstacles, 0.0, safety, c.model, offset);
      for (const HocbfRow& row : rows.rows) {
        if (row.psi2(Vec3::Zero()) < 0.0) {
          std::ostringstream msg;
          msg << "h_" << row.obstacle_id << "_" << to_string(row.body)
              << ": start is not strictly feasible; at rest passivity forces u_a = 0 and the "
                 "second-order barrier fails (psi2 = "
              << row.psi2(Vec3::Zero()) << "); reduce energy.K or start farther away";
          errors.push_back(msg.str());
        }
      }
    } catch (const DomainError& e) {
      errors.push_back(std::string("sim.start: ") + e.what());
    }
  }
  return errors;
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

ScenarioConfig perturbed(const ScenarioConfig& scenario, std::uint64_t seed) {
  ScenarioConfig out = scenario;
  std::mt19937_64 rng(seed);
  const double half = 0.5 * scenario.perturb_position;
  const double swing = scenario.perturb_swing_deg * kDeg;
  std::uniform_real_distribution<double> pos(-half, half);
  std::uniform_real_distribution<double> ang(-swing, swing);
  for (int i = 0; i < 3; ++i) out.initial.xi(i) += pos(rng);
  for (int i = 0; i < 2; ++i) out.initial.gamma(i) += ang(rng);
  return out;
}

}  // namespace slungmpc
