#include <random>

#include <benchmark/benchmark.h>

#include "slungmpc/ocp.hpp"
#include "slungmpc/qp.hpp"
#include "slungmpc/scenario.hpp"

using namespace slungmpc;

namespace {

ScenarioConfig gate() { return load_scenario(SLUNGMPC_SCENARIO_DIR "/static_gate.ini"); }

// Approaching the gate with some swing, both posts inside the horizon.
SystemState approach_state() {
  SystemState s = SystemState::hover_at(Vec3(1.6, 0.05, 1.0));
  s.xi_dot = Vec3(0.6, 0.0, 0.0);
  s.gamma = Vec2(0.05, -0.08);
  return s;
}

void BM_ForwardDynamics(benchmark::State& state) {
  const ModelParams m;
  const SystemState s = approach_state();
  const Vec3 F(0.5, -0.2, m.hover_thrust());
  for (auto _ : state) benchmark::DoNotOptimize(forward_dynamics(s, F, m));
}
BENCHMARK(BM_ForwardDynamics);

void BM_RtiStepCold(benchmark::State& state) {
  const ScenarioConfig sc = gate();
  const NmpcParams p = sc.nmpc_params();
  const SystemState s = approach_state();
  const std::vector<ObstacleState> obs = obstacle_states(sc.obstacles, 0.0);
  const Vec3 xi_d = sc.waypoints[1].position;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rti_step(s, xi_d, obs, cold_start(s, p.ocp), p));
  }
}
BENCHMARK(BM_RtiStepCold)->Unit(benchmark::kMillisecond);

void BM_RtiStepWarm(benchmark::State& state) {
  const ScenarioConfig sc = gate();
  const NmpcParams p = sc.nmpc_params();
  const SystemState s = approach_state();
  const std::vector<ObstacleState> obs = obstacle_states(sc.obstacles, 0.0);
  const Vec3 xi_d = sc.waypoints[1].position;
  const OcpSolution first = rti_step(s, xi_d, obs, cold_start(s, p.ocp), p);
  OcpWarmStart warm;
  warm.x = first.x;
  warm.u_a = first.u_a;
  warm.active = first.active;
  warm.t = first.t;
  for (auto _ : state) benchmark::DoNotOptimize(rti_step(s, xi_d, obs, warm, p));
}
BENCHMARK(BM_RtiStepWarm)->Unit(benchmark::kMillisecond);

// Dense strictly convex QP with random inequality rows.
void BM_QpSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  QpProblem p;
  Eigen::MatrixXd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L(i, j) = g(rng);
  p.H = L * L.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  p.g = Eigen::VectorXd::NullaryExpr(n, [&] { return 10.0 * g(rng); });
  p.A_in = Eigen::MatrixXd::NullaryExpr(2 * n, n, [&] { return g(rng); });
  p.b_in = -Eigen::VectorXd::Ones(2 * n);
  p.lb = -Eigen::VectorXd::Ones(n);
  p.ub = Eigen::VectorXd::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_QpSolve)->Arg(30)->Arg(121)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
