#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slungmpc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSafetyViolation = 2,
  kExitSolverFailure = 3,
  kExitIncomplete = 4,  // ran safely but did not reach the goal, or an I/O error
};

struct Options {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::vector<std::string> arms;
  std::vector<std::string> overrides;  // section.key=value
  int threads = 0;
};

/// Closed-loop run; writes <out>/trajectory.csv and <out>/metrics.json.
int cmd_run(const Options& options, std::ostream& out, std::ostream& err);
/// Arm x trial matrix; writes <out>/ablation.json and <out>/ablation.txt.
int cmd_ablate(const Options& options, std::ostream& out, std::ostream& err);
/// Schema and physics checks without simulating; lists every violation.
int cmd_validate(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace slungmpc::cli
