#pragma once

#include <string>
#include <vector>

#include "slungmpc/scenario.hpp"

namespace slungmpc {

/// Samples closer than d_min - kViolationTolerance to an obstacle center count as inside.
inline constexpr double kViolationTolerance = 1e-4;  // [m]
inline constexpr double kOvershootDistance = 0.10;   // [m]
inline constexpr double kSuccessDistance = 0.10;     // [m]
inline constexpr double kSuccessSwingDeg = 10.0;

struct PairMetrics {
  std::string name;                 // h_<id>_<Q|L>
  double min_clearance = 0.0;       // |r| - R - r_body [m]
  double min_h = 0.0;               // squared-clearance barrier
  int violations = 0;
};

struct RunMetrics {
  bool success = false;
  bool valid = true;
  std::vector<PairMetrics> pairs;
  double min_clearance = 0.0;       // over all pairs, |r| - R - r_body [m]
  double min_h = 0.0;
  double max_alpha_deg = 0.0;
  double max_beta_deg = 0.0;
  double rmse_xyz = 0.0;            // against the active waypoint [m]
  int violations = 0;               // intrusions, summed over pairs
  int infeasibility_episodes = 0;   // runs of consecutive non-optimal ticks
  int infeasible_ticks = 0;
  int longest_failure_streak = 0;
  int overshoots = 0;
  double solve_median_ms = 0.0;
  double solve_max_ms = 0.0;
  int overruns_50ms = 0;
  double final_distance = 0.0;      // to the last waypoint [m]
  double final_swing_deg = 0.0;     // max(|alpha|, |beta|) at the last sample
  double max_storage_increase = 0.0;  // largest V(t_{k+1}) - V(t_k) [J]
  int ticks = 0;
};

/// Pure function of the log and the scenario it was produced from.
RunMetrics compute_metrics(const TrajectoryLog& log, const ScenarioConfig& scenario);

/// Maximal runs of "inside" samples; an intrusion still open at the end counts as well.
int count_intrusions(const std::vector<bool>& inside);

/// Excursions more than `distance` beyond the goal plane after the first crossing.
int count_overshoots(const std::vector<Vec3>& positions, const Vec3& from, const Vec3& goal,
                     double distance = kOvershootDistance);

double median(std::vector<double> values);

}  // namespace slungmpc
