#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slungmpc/bench.hpp"

namespace slungmpc {

/// Column names of the trajectory CSV for a log with the given barrier pairs.
std::vector<std::string> trajectory_columns(const std::vector<std::string>& pair_names);

/// One row per control tick; floating values use the shortest round-trip decimal form.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
/// Inverse of write_trajectory_csv. Throws ConfigError on a malformed file.
TrajectoryLog read_trajectory_csv(std::istream& in);

/// Metrics and ablation reports; floating values rounded to 6 significant digits.
/// The ablation document carries no wall-clock timings, so equal seeds give equal bytes.
std::string metrics_json(const RunMetrics& metrics, const std::string& scenario,
                         const std::string& arm);
std::string ablation_json(const AblationResult& result);

/// Aligned plain-text table with one row per arm.
std::string ablation_table(const AblationResult& result);

double round_significant(double value, int digits = 6);

}  // namespace slungmpc
