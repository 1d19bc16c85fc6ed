#include "slungmpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slungmpc {

namespace {

constexpr double kRadToDeg = 180.0 / EIGEN_PI;

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

int count_intrusions(const std::vector<bool>& inside) {
  int count = 0;
  bool previous = false;
  for (bool in : inside) {
    if (in && !previous) ++count;
    previous = in;
  }
  return count;
}

int count_overshoots(const std::vector<Vec3>& positions, const Vec3& from, const Vec3& goal,
                     double distance) {
  Vec3 dir = goal - from;
  if (dir.norm() < 1e-12) return 0;
  dir.normalize();
  bool crossed = false, beyond = false;
  int events = 0;
  for (const Vec3& p : positions) {
    const double along = (p - goal).dot(dir);
    if (!crossed) {
      if (along < 0.0) continue;
      crossed = true;
    }
    const bool now = along > distance;
    if (now && !beyond) ++events;
    beyond = now;
  }
  return events;
}

RunMetrics compute_metrics(const TrajectoryLog& log, const ScenarioConfig& scenario) {
  RunMetrics m;
  m.valid = log.valid && !log.aborted;
  m.ticks = static_cast<int>(log.samples.size());
  if (log.samples.empty()) return m;

  const std::size_t n_obs = scenario.obstacles.size();
  m.pairs.resize(2 * n_obs);
  std::vector<std::vector<bool>> inside(2 * n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) {
    for (int b = 0; b < 2; ++b) {
      PairMetrics& pm = m.pairs[2 * i + static_cast<std::size_t>(b)];
      pm.name = "h_" + std::to_string(scenario.obstacles[i].id) + (b == 0 ? "_Q" : "_L");
      pm.min_clearance = std::numeric_limits<double>::infinity();
      pm.min_h = std::numeric_limits<double>::infinity();
    }
  }

  double sq_err = 0.0;
  std::vector<double> solve_ms;
  solve_ms.reserve(log.samples.size());
  bool in_episode = false;
  for (std::size_t k = 0; k < log.samples.size(); ++k) {
    const LogSample& s = log.samples[k];
    const Vec3 p_l = payload_position(s.state, scenario.model);
    for (std::size_t i = 0; i < n_obs; ++i) {
      const ObstacleState o = obstacle_position(scenario.obstacles[i], s.t);
      for (int b = 0; b < 2; ++b) {
        const Body body = b == 0 ? Body::Quadrotor : Body::Payload;
        const double dist = clearance_offset(b == 0 ? s.state.xi : p_l, o).norm();
        const double d_min = min_distance(o, body, scenario.safety);
        const double r_body = b == 0 ? scenario.safety.r_q : scenario.safety.r_l;
        PairMetrics& pm = m.pairs[2 * i + static_cast<std::size_t>(b)];
        pm.min_clearance = std::min(pm.min_clearance, dist - o.radius - r_body);
        pm.min_h = std::min(pm.min_h, dist * dist - d_min * d_min);
        inside[2 * i + static_cast<std::size_t>(b)].push_back(dist < d_min - kViolationTolerance);
      }
    }
    m.max_alpha_deg = std::max(m.max_alpha_deg, std::abs(s.state.gamma(0)) * kRadToDeg);
    m.max_beta_deg = std::max(m.max_beta_deg, std::abs(s.state.gamma(1)) * kRadToDeg);
    sq_err += (s.state.xi - s.xi_d).squaredNorm();

    const bool failed = s.status != SolveStatus::Optimal;
    if (failed) ++m.infeasible_ticks;
    if (failed && !in_episode) ++m.infeasibility_episodes;
    in_episode = failed;
    solve_ms.push_back(s.solve_ms);
    if (s.solve_ms > 50.0) ++m.overruns_50ms;

    if (k > 0 && log.samples[k - 1].waypoint == s.waypoint) {
      m.max_storage_increase =
          std::max(m.max_storage_increase, s.storage - log.samples[k - 1].storage);
    }
  }
  m.rmse_xyz = std::sqrt(sq_err / static_cast<double>(log.samples.size()));
  m.solve_median_ms = median(solve_ms);
  m.solve_max_ms = *std::max_element(solve_ms.begin(), solve_ms.end());
  m.longest_failure_streak = log.longest_failure_streak();

  m.min_clearance = std::numeric_limits<double>::infinity();
  m.min_h = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.pairs.size(); ++j) {
    m.pairs[j].violations = count_intrusions(inside[j]);
    m.violations += m.pairs[j].violations;
    m.min_clearance = std::min(m.min_clearance, m.pairs[j].min_clearance);
    m.min_h = std::min(m.min_h, m.pairs[j].min_h);
  }
  if (m.pairs.empty()) m.min_clearance = m.min_h = 0.0;

  const LogSample& last = log.samples.back();
  if (!scenario.waypoints.empty()) {
    const std::size_t final_wp = scenario.waypoints.size() - 1;
    const Vec3& goal = scenario.waypoints[final_wp].position;
    const Vec3 from =
        final_wp > 0 ? scenario.waypoints[final_wp - 1].position : log.samples.front().state.xi;
    std::vector<Vec3> approach;
    for (const LogSample& s : log.samples) {
      if (static_cast<std::size_t>(s.waypoint) == final_wp) approach.push_back(s.state.xi);
    }
    m.overshoots = count_overshoots(approach, from, goal);
    m.final_distance = (last.state.xi - goal).norm();
  }
  m.final_swing_deg = last.state.gamma.cwiseAbs().maxCoeff() * kRadToDeg;
  m.success = m.valid && !scenario.waypoints.empty() &&
              m.final_distance <= kSuccessDistance && m.final_swing_deg < kSuccessSwingDeg &&
              m.violations == 0;
  return m;
}

}  // namespace slungmpc
