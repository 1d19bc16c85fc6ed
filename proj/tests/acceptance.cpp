// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero on any failure.
// Optional arguments select criteria by number, e.g. `slungmpc_acceptance 1 7`.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mechanics_oracle.hpp"
#include "qp_oracle.hpp"
#include "slungmpc/bench.hpp"
#include "slungmpc/energy.hpp"
#include "slungmpc/model.hpp"
#include "slungmpc/qp.hpp"
#include "slungmpc/sim.hpp"
#include "slungmpc_cli/commands.hpp"

using namespace slungmpc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kSkewTol = 1e-9;
constexpr double kGravityTol = 1e-8;
constexpr double kDriftTol = 1e-5;
constexpr double kRatioLo = 12.0, kRatioHi = 20.0;
constexpr double kMechanicsSeconds = 60.0;
constexpr double kPortTol = 1e-3;
constexpr double kStorageTol = 1e-4;       // [J] per tick
constexpr double kFinalDistance = 0.01;    // [m]
constexpr double kFinalSwingDeg = 1.0;
constexpr double kBarrierTol = 1e-6;       // on h = |r|^2 - d_min^2
constexpr double kClearanceTol = 1e-4;     // [m]
constexpr double kAblationSeconds = 600.0;
constexpr double kMedianSolveMs = 20.0;
constexpr double kOverrunMs = 50.0;
constexpr double kQpPrimalTol = 1e-7;
constexpr double kQpDualTol = 1e-6;
constexpr double kQpKktTol = 1e-8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string scenario_path(const std::string& name) {
  return std::string(SLUNGMPC_SCENARIO_DIR) + "/" + name + ".ini";
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// SEP-NMPC runs on the shipped courses, shared by several criteria.
std::map<std::string, RunResult>& sep_runs() {
  static std::map<std::string, RunResult> runs;
  return runs;
}

const RunResult& sep_run(const std::string& name) {
  auto& runs = sep_runs();
  auto it = runs.find(name);
  if (it == runs.end()) {
    const ScenarioConfig sc = load_scenario(scenario_path(name));
    it = runs.emplace(name, run_scenario(sc, Arm::parse("sep_nmpc"))).first;
  }
  return it->second;
}

Verdict mechanics() {
  using namespace slungmpc::testing;
  const auto t0 = Clock::now();
  ModelParams p;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto sample_q = [&] {
    Vec5 q;
    q << 2 * unit(rng), 2 * unit(rng), 1 + unit(rng), 1.2 * unit(rng), 1.2 * unit(rng);
    return q;
  };

  double skew = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Vec5 q = sample_q();
    Vec5 qd;
    for (int i = 0; i < 5; ++i) qd(i) = 2 * unit(rng);
    const double h = 1e-6;
    const Mat5 Md = (inertia_matrix(q + h * qd, p) - inertia_matrix(q - h * qd, p)) / (2 * h);
    skew = std::max(skew, std::abs(qd.dot((0.5 * Md - coriolis_matrix(q, qd, p)) * qd)));
  }

  double grad = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec5 q = sample_q();
    const Vec5 dU = gradient_q([&](const Vec5& x) { return potential_oracle(x, p); }, q, 1e-5);
    grad = std::max(grad, (gravity_vector(q, p) - dU).cwiseAbs().maxCoeff());
  }

  SystemState s;
  s.xi = Vec3(0, 0, 1);
  s.gamma = Vec2(0.5, -0.3);
  s.xi_dot = Vec3(0.3, 0.1, 0.0);
  s.gamma_dot = Vec2(0.07, 0.04);
  auto energy = [&](const SystemState& x) {
    return kinetic_oracle(x.q(), x.q_dot(), p) + potential_oracle(x.q(), p);
  };
  const double e0 = energy(s);
  double drift = 0.0;
  for (int k = 0; k < 10000; ++k) {
    s = rk4_step(s, Vec3::Zero(), 1e-3, p);
    drift = std::max(drift, std::abs(energy(s) - e0));
  }
  drift /= std::abs(e0);

  SystemState w;
  w.xi = Vec3(0.2, -0.1, 1.0);
  w.gamma = Vec2(0.5, -0.4);
  w.xi_dot = Vec3(0.4, 0.2, -0.1);
  w.gamma_dot = Vec2(-0.6, 0.9);
  const Vec3 F(1.0, -0.5, p.hover_thrust() + 1.0);
  auto integrate = [&](double dt) {
    StateVector x = w.vector();
    const auto n = std::llround(1.0 / dt);
    for (long long k = 0; k < n; ++k) x = rk4_step(x, F, dt, p);
    return x;
  };
  const StateVector ref = integrate(1e-5);
  const double ratio = (integrate(0.02) - ref).norm() / (integrate(0.01) - ref).norm();

  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "skew " << skew << ", |G - grad U| " << grad << ", drift " << drift << ", rk4 ratio "
    << ratio << ", " << elapsed << " s";
  return {skew < kSkewTol && grad < kGravityTol && drift < kDriftTol && ratio >= kRatioLo &&
              ratio <= kRatioHi && elapsed < kMechanicsSeconds,
          d.str()};
}

Verdict port_relation() {
  const ScenarioConfig sc = load_scenario(scenario_path("single_obstacle"));
  const RunResult& run = sep_run("single_obstacle");
  double worst = 0.0;
  for (const LogSample& s : run.log.samples) {
    const double h = 1e-4;
    const double dV = (storage(rk4_step(s.state, s.force, h, sc.model), s.xi_d, sc.energy, sc.model) -
                       storage(rk4_step(s.state, s.force, -h, sc.model), s.xi_d, sc.energy, sc.model)) /
                      (2 * h);
    const Vec3 ua = shaped_from_force(s.force, s.state, s.xi_d, sc.energy, sc.model);
    worst = std::max(worst, std::abs(dV - s.state.xi_dot.dot(ua)));
  }
  std::ostringstream d;
  d << "single_obstacle " << sc.sim.duration << " s, " << run.log.samples.size()
    << " ticks, max |dV/dt - v.u_a| " << worst;
  return {worst < kPortTol && sc.sim.duration >= 10.0 && run.log.samples.size() > 1, d.str()};
}

Verdict monotonicity() {
  bool pass = true;
  std::ostringstream d;
  for (const char* name : {"static_gate", "dynamic_cross", "single_obstacle"}) {
    const RunResult& run = sep_run(name);
    const RunMetrics& m = run.metrics;
    const Vec2 swing = run.log.samples.back().state.gamma.cwiseAbs() * 180.0 / EIGEN_PI;
    const bool ok = m.infeasible_ticks == 0 && m.max_storage_increase <= kStorageTol &&
                    m.final_distance < kFinalDistance && swing.maxCoeff() < kFinalSwingDeg &&
                    m.valid;
    pass = pass && ok;
    d << name << ": non-optimal " << m.infeasible_ticks << ", max dV " << m.max_storage_increase
      << " J, final " << m.final_distance << " m, swing " << swing.maxCoeff() << " deg; ";
  }
  return {pass, d.str()};
}

Verdict invariance() {
  bool pass = true;
  std::ostringstream d;
  for (const char* name : {"static_gate", "dynamic_cross"}) {
    const ScenarioConfig sc = load_scenario(scenario_path(name));
    const RunMetrics& m = sep_run(name).metrics;
    // min_clearance subtracts the obstacle radius; the bound on |r| becomes delta - tol
    const double bound = sc.safety.delta - kClearanceTol;
    const bool ok = m.min_h >= -kBarrierTol && m.min_clearance >= bound && m.violations == 0;
    pass = pass && ok;
    d << name << ": min h " << m.min_h << ", min |r| - d_min " << m.min_clearance - sc.safety.delta
      << " m; ";
  }
  return {pass, d.str()};
}

// Both full ablations run through the command front end; criterion 5 reads the first.
struct AblationFiles {
  std::string first, second;
  double first_seconds = 0.0;
  int first_code = -1, second_code = -1;
};

AblationFiles& ablation_files() {
  static AblationFiles files;
  return files;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int ablate_into(const fs::path& dir, int threads, std::string& json) {
  fs::remove_all(dir);
  cli::Options o;
  o.scenario = scenario_path("single_obstacle");
  o.out = dir.string();
  o.threads = threads;
  std::ostringstream out, err;
  const int code = cli::cmd_ablate(o, out, err);
  std::cout << out.str() << err.str();
  json = slurp(dir / "ablation.json");
  return code;
}

void ensure_first_ablation() {
  AblationFiles& f = ablation_files();
  if (f.first_code >= 0) return;
  const auto t0 = Clock::now();
  f.first_code = ablate_into(fs::temp_directory_path() / "slungmpc_acceptance_a", 0, f.first);
  f.first_seconds = seconds_since(t0);
}

Verdict ablation() {
  ensure_first_ablation();
  const AblationFiles& f = ablation_files();
  if (f.first_code != cli::kExitOk) return {false, "cmd_ablate exit code " + std::to_string(f.first_code)};
  const nlohmann::json j = nlohmann::json::parse(f.first);
  std::map<std::string, nlohmann::json> arm;
  for (const auto& a : j["arms"]) arm[a["arm"].get<std::string>()] = a;
  for (const char* name : {"state_constraint", "state_constraint_passivity", "first_order_cbf",
                           "first_order_cbf_passivity", "hocbf", "sep_nmpc"}) {
    if (!arm.contains(name)) return {false, std::string("missing arm ") + name};
  }
  auto events = [&](const char* name) {
    return arm[name]["violations"].get<int>() + arm[name]["infeasibility"].get<int>();
  };
  auto zero = [&](const char* name) {
    return arm[name]["violations"].get<int>() == 0 && arm[name]["infeasibility"].get<int>() == 0 &&
           arm[name]["failed_runs"].get<int>() == 0;
  };
  const int hocbf_events = std::max(events("hocbf"), events("sep_nmpc"));
  const bool pass = j["trials"].get<int>() == 20 && zero("hocbf") && zero("sep_nmpc") &&
                    arm["sep_nmpc"]["overshoots"].get<int>() == 0 &&
                    events("state_constraint") > hocbf_events &&
                    events("state_constraint_passivity") > hocbf_events &&
                    events("first_order_cbf") >= 1 && events("first_order_cbf_passivity") >= 1 &&
                    f.first_seconds < kAblationSeconds;
  std::ostringstream d;
  d << "viol+infeas SC " << events("state_constraint") << "/"
    << events("state_constraint_passivity") << ", FO " << events("first_order_cbf") << "/"
    << events("first_order_cbf_passivity") << ", HOCBF " << events("hocbf") << ", SEP "
    << events("sep_nmpc") << " with " << arm["sep_nmpc"]["overshoots"].get<int>()
    << " overshoots, " << f.first_seconds << " s";
  return {pass, d.str()};
}

Verdict solver_time() {
  bool pass = true;
  std::ostringstream d;
  for (const char* name : {"static_gate", "dynamic_cross", "single_obstacle"}) {
    const ScenarioConfig sc = load_scenario(scenario_path(name));
    const RunMetrics& m = sep_run(name).metrics;
    const bool ok = sc.ocp.N == 40 && sc.ocp.T == 2.0 && m.solve_median_ms < kMedianSolveMs &&
                    m.overruns_50ms == 0 && m.solve_max_ms <= kOverrunMs;
    pass = pass && ok;
    d << name << ": median " << m.solve_median_ms << " ms, max " << m.solve_max_ms << " ms; ";
  }
  return {pass, d.str()};
}

Verdict qp_oracle() {
  using namespace slungmpc::testing;
  std::mt19937_64 rng(8086);
  double primal = 0.0, dual = 0.0, kkt = 0.0;
  int optimal = 0, infeasible = 0, mismatched = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const QpProblem p = random_small_qp(rng);
    const auto oracle = enumerate_active_sets(p);
    const QpSolution s = solve(p);
    if (!oracle) {
      if (s.status == SolveStatus::Infeasible) {
        ++infeasible;
      } else {
        ++mismatched;
      }
      continue;
    }
    if (s.status != SolveStatus::Optimal) {
      ++mismatched;
      continue;
    }
    ++optimal;
    primal = std::max(primal, (s.z - oracle->z).cwiseAbs().maxCoeff());
    const Eigen::VectorXd mu = gathered_multipliers(p, s);
    dual = std::max(dual, (mu - oracle->mu).cwiseAbs().maxCoeff());
    if (p.A_eq.rows() > 0) {
      dual = std::max(dual, (s.lambda_eq - oracle->lambda_eq).cwiseAbs().maxCoeff());
    }
    kkt = std::max(kkt, check_kkt(p, s).max());
  }
  std::ostringstream d;
  d << optimal << " optimal, " << infeasible << " infeasible, " << mismatched
    << " status mismatches; primal " << primal << ", dual " << dual << ", kkt " << kkt;
  return {mismatched == 0 && primal < kQpPrimalTol && dual < kQpDualTol && kkt < kQpKktTol,
          d.str()};
}

Verdict determinism() {
  ensure_first_ablation();
  AblationFiles& f = ablation_files();
  // a different worker count must not change the bytes
  f.second_code = ablate_into(fs::temp_directory_path() / "slungmpc_acceptance_b", 1, f.second);
  std::ostringstream d;
  d << f.first.size() << " and " << f.second.size() << " bytes, "
    << (f.first == f.second ? "identical" : "different");
  return {f.first_code == cli::kExitOk && f.second_code == cli::kExitOk && !f.first.empty() &&
              f.first == f.second,
          d.str()};
}

// Viol./Infeas.(state constraint) >= Viol./Infeas.(first order); reported, not asserted.
void ordering_note() {
  const AblationFiles& f = ablation_files();
  if (f.first.empty()) return;
  const nlohmann::json j = nlohmann::json::parse(f.first);
  int sc = 0, fo = 0;
  for (const auto& a : j["arms"]) {
    const std::string name = a["arm"].get<std::string>();
    const int e = a["violations"].get<int>() + a["infeasibility"].get<int>();
    if (name.starts_with("state_constraint")) sc = std::min(sc == 0 ? e : sc, e);
    if (name.starts_with("first_order_cbf")) fo = std::max(fo, e);
  }
  std::cout << "[INFO] ordering state-constraint >= first-order events: " << sc << " vs " << fo
            << (sc >= fo ? " (holds)" : " (does not hold; first-order arms fail in many short episodes)")
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"mechanics", mechanics},     {"port relation", port_relation},
      {"passivity monotonicity", monotonicity}, {"forward invariance", invariance},
      {"ablation ordering", ablation},          {"solver performance", solver_time},
      {"qp oracle equivalence", qp_oracle},     {"determinism", determinism}};

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(number)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << number << " " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  ordering_note();
  return failures == 0 ? 0 : 1;
}
