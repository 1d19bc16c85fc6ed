#include "slungmpc_cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "slungmpc/bench.hpp"
#include "slungmpc/log_io.hpp"

namespace slungmpc::cli {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> overrides_of(const Options& o) {
  std::vector<std::string> all = o.overrides;
  if (o.seed) all.push_back("sim.seed=" + std::to_string(*o.seed));
  if (o.trials) all.push_back("sim.trials=" + std::to_string(*o.trials));
  return all;
}

// Loads and validates; prints every problem and returns nullopt on failure.
std::optional<ScenarioConfig> load(const Options& o, std::ostream& err) {
  ScenarioConfig scenario;
  try {
    scenario = load_scenario(o.scenario, overrides_of(o));
  } catch (const ConfigError& e) {
    err << o.scenario << ": " << e.what() << '\n';
    return std::nullopt;
  }
  const std::vector<std::string> problems = validate_scenario(scenario);
  for (const std::string& p : problems) err << o.scenario << ": " << p << '\n';
  if (!problems.empty()) return std::nullopt;
  return scenario;
}

bool write_file(const fs::path& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    err << path.string() << ": write failed\n";
    return false;
  }
  return true;
}

bool make_out_dir(const std::string& dir, std::ostream& err) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) err << dir << ": " << ec.message() << '\n';
  return !ec;
}

}  // namespace

int cmd_validate(const Options& options, std::ostream& out, std::ostream& err) {
  const auto scenario = load(options, err);
  if (!scenario) return kExitConfig;
  out << options.scenario << ": ok (" << scenario->waypoints.size() << " waypoints, "
      << scenario->obstacles.size() << " obstacles, arm " << scenario->arm.name() << ")\n";
  return kExitOk;
}

int cmd_run(const Options& options, std::ostream& out, std::ostream& err) {
  auto scenario = load(options, err);
  if (!scenario) return kExitConfig;
  try {
    if (!options.arms.empty()) scenario->arm = Arm::parse(options.arms.front());
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (!make_out_dir(options.out, err)) return kExitIncomplete;

  RunResult result;
  try {
    result = run_scenario(*scenario);
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kExitIncomplete;
  }

  std::ostringstream csv;
  write_trajectory_csv(csv, result.log);
  const fs::path dir(options.out);
  if (!write_file(dir / "trajectory.csv", csv.str(), err) ||
      !write_file(dir / "metrics.json",
                  metrics_json(result.metrics, scenario->name, scenario->arm.name()), err)) {
    return kExitIncomplete;
  }

  const RunMetrics& m = result.metrics;
  out << scenario->name << " [" << scenario->arm.name() << "]: success=" << m.success
      << " violations=" << m.violations << " infeasibility=" << m.infeasibility_episodes
      << " min_clearance=" << m.min_clearance << " m final_distance=" << m.final_distance
      << " m solve_median=" << m.solve_median_ms << " ms\n";
  if (!result.log.note.empty()) err << "note: " << result.log.note << '\n';

  if (m.violations > 0) return kExitSafetyViolation;
  if (m.longest_failure_streak > scenario->fallback_hold_ticks) return kExitSolverFailure;
  return m.success ? kExitOk : kExitIncomplete;
}

int cmd_ablate(const Options& options, std::ostream& out, std::ostream& err) {
  const auto scenario = load(options, err);
  if (!scenario) return kExitConfig;
  std::vector<Arm> arms;
  try {
    for (const std::string& a : options.arms) arms.push_back(Arm::parse(a));
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (arms.empty()) arms = default_arms();
  if (!make_out_dir(options.out, err)) return kExitIncomplete;

  const AblationResult result =
      run_ablation(*scenario, arms, scenario->trials, scenario->sim.seed, options.threads);
  for (const TrialResult& r : result.runs) {
    if (r.failed) err << r.arm << " trial " << r.trial << ": " << r.error << '\n';
  }
  const std::string table = ablation_table(result);
  const fs::path dir(options.out);
  if (!write_file(dir / "ablation.json", ablation_json(result), err) ||
      !write_file(dir / "ablation.txt", table, err)) {
    return kExitIncomplete;
  }
  out << table;
  return kExitOk;
}

}  // namespace slungmpc::cli
