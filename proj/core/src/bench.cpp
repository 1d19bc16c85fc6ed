#include "slungmpc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <thread>

namespace slungmpc {

std::unique_ptr<NmpcController> make_controller(const Arm& arm, const ScenarioConfig& scenario) {
  ScenarioConfig s = scenario;
  s.arm = arm;
  return std::make_unique<NmpcController>(s.nmpc_params(), scenario.sim.dt_ctrl);
}

RunResult run_scenario(const ScenarioConfig& scenario) { return run_scenario(scenario, scenario.arm); }

RunResult run_scenario(const ScenarioConfig& scenario, const Arm& arm) {
  auto controller = make_controller(arm, scenario);
  RunResult r;
  r.log = run_closed_loop(scenario.setup(), *controller);
  r.metrics = compute_metrics(r.log, scenario);
  return r;
}

int worker_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SLUNGMPC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

AblationResult run_ablation(const ScenarioConfig& scenario, const std::vector<Arm>& arms,
                            int trials, std::uint64_t seed, int threads) {
  AblationResult out;
  out.scenario = scenario.name;
  out.seed = seed;
  out.trials = trials;
  const std::size_t n_trials = static_cast<std::size_t>(std::max(trials, 0));
  out.runs.resize(arms.size() * n_trials);

  std::vector<ScenarioConfig> starts;
  starts.reserve(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) {
    starts.push_back(perturbed(scenario, trial_seed(seed, static_cast<int>(t))));
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < out.runs.size(); job = next++) {
      const std::size_t a = job / n_trials, t = job % n_trials;
      TrialResult& r = out.runs[job];
      r.arm = arms[a].name();
      r.trial = static_cast<int>(t);
      r.seed = trial_seed(seed, static_cast<int>(t));
      try {
        r.metrics = run_scenario(starts[t], arms[a]).metrics;
      } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
      }
    }
  };
  const int n_workers =
      std::min(worker_threads(threads), static_cast<int>(std::max<std::size_t>(out.runs.size(), 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  for (std::size_t a = 0; a < arms.size(); ++a) {
    ArmSummary s;
    s.arm = arms[a].name();
    s.label = arms[a].label();
    s.min_clearance = std::numeric_limits<double>::infinity();
    std::vector<double> medians;
    for (std::size_t t = 0; t < n_trials; ++t) {
      const TrialResult& r = out.runs[a * n_trials + t];
      ++s.runs;
      if (r.failed) {
        ++s.failed_runs;
        continue;
      }
      const RunMetrics& m = r.metrics;
      s.successes += m.success ? 1 : 0;
      s.violations += m.violations;
      s.infeasibility += m.infeasibility_episodes;
      s.overshoots += m.overshoots;
      s.min_clearance = std::min(s.min_clearance, m.min_clearance);
      medians.push_back(m.solve_median_ms);
      s.solve_max_ms = std::max(s.solve_max_ms, m.solve_max_ms);
    }
    s.solve_median_ms = median(medians);
    if (medians.empty()) s.min_clearance = 0.0;
    out.arms.push_back(s);
  }
  return out;
}

}  // namespace slungmpc
