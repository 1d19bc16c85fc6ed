#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "slungmpc/metrics.hpp"
#include "slungmpc/scenario.hpp"

namespace slungmpc {

/// Controller for an arm of the scenario's gains.
std::unique_ptr<NmpcController> make_controller(const Arm& arm, const ScenarioConfig& scenario);

struct RunResult {
  TrajectoryLog log;
  RunMetrics metrics;
};

/// One closed-loop run with the scenario's own arm.
RunResult run_scenario(const ScenarioConfig& scenario);
RunResult run_scenario(const ScenarioConfig& scenario, const Arm& arm);

struct TrialResult {
  std::string arm;
  int trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;  // the run threw; metrics are then empty
  std::string error;
  RunMetrics metrics;
};

struct ArmSummary {
  std::string arm;
  std::string label;
  int runs = 0;
  int failed_runs = 0;
  int successes = 0;
  int violations = 0;
  int infeasibility = 0;  // episodes
  int overshoots = 0;
  double min_clearance = 0.0;  // [m]
  double solve_median_ms = 0.0;
  double solve_max_ms = 0.0;
};

struct AblationResult {
  std::string scenario;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<ArmSummary> arms;
  std::vector<TrialResult> runs;  // arm-major, then trial
};

/// Runs every arm on the same seeded perturbations. Runs are spread over `threads` workers
/// (0 = hardware concurrency, capped by SLUNGMPC_THREADS); aggregation is in (arm, trial)
/// order so the result does not depend on scheduling. A run that throws is recorded as failed.
AblationResult run_ablation(const ScenarioConfig& scenario, const std::vector<Arm>& arms,
                            int trials, std::uint64_t seed, int threads = 0);

/// Worker count after applying SLUNGMPC_THREADS.
int worker_threads(int requested);

}  // namespace slungmpc
