#include "slungmpc/log_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace slungmpc {

namespace {

using nlohmann::ordered_json;

const char* const kStateColumns[] = {"x",  "y",  "z",  "alpha",     "beta",
                                     "vx", "vy", "vz", "alpha_dot", "beta_dot"};

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

double get(const std::string& cell, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ConfigError("trajectory csv line " + std::to_string(line) + ": bad number '" + cell +
                      "'");
  }
  return v;
}

SolveStatus parse_status(const std::string& s, int line) {
  for (SolveStatus st : {SolveStatus::Optimal, SolveStatus::MaxIterations, SolveStatus::Infeasible,
                         SolveStatus::IllConditioned}) {
    if (s == to_string(st)) return st;
  }
  throw ConfigError("trajectory csv line " + std::to_string(line) + ": bad status '" + s + "'");
}

// JSON number with 6 significant digits; non-finite values become null.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

}  // namespace

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

std::vector<std::string> trajectory_columns(const std::vector<std::string>& pair_names) {
  std::vector<std::string> cols = {"t"};
  for (const char* c : kStateColumns) cols.emplace_back(c);
  for (const char* c : {"F_x", "F_y", "F_z", "ua_x", "ua_y", "ua_z", "V"}) cols.emplace_back(c);
  cols.insert(cols.end(), pair_names.begin(), pair_names.end());
  for (const char* c : {"status", "fallback", "solve_ms", "qp_iterations", "waypoint", "xd_x",
                        "xd_y", "xd_z"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  const std::vector<std::string> cols = trajectory_columns(log.pair_names);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const LogSample& s : log.samples) {
    put(out, s.t);
    const StateVector x = s.state.vector();
    for (int i = 0; i < kStateDim; ++i) out << ',', put(out, x(i));
    for (int i = 0; i < 3; ++i) out << ',', put(out, s.force(i));
    for (int i = 0; i < 3; ++i) out << ',', put(out, s.u_a(i));
    out << ',', put(out, s.storage);
    for (double h : s.h) out << ',', put(out, h);
    out << ',' << to_string(s.status) << ',' << (s.fallback ? 1 : 0) << ',';
    put(out, s.solve_ms);
    out << ',' << s.qp_iterations << ',' << s.waypoint;
    for (int i = 0; i < 3; ++i) out << ',', put(out, s.xi_d(i));
    out << '\n';
  }
}

TrajectoryLog read_trajectory_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory csv: missing header");
  const std::vector<std::string> header = split(line);
  const std::size_t fixed = trajectory_columns({}).size();
  if (header.size() < fixed) throw ConfigError("trajectory csv: header too short");
  TrajectoryLog log;
  const std::size_t n_pairs = header.size() - fixed;
  const long first_pair = 1 + kStateDim + 7;
  log.pair_names.assign(header.begin() + first_pair,
                        header.begin() + first_pair + static_cast<long>(n_pairs));
  if (trajectory_columns(log.pair_names) != header) {
    throw ConfigError("trajectory csv: unexpected columns");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line);
    if (c.size() != header.size()) {
      throw ConfigError("trajectory csv line " + std::to_string(line_no) + ": wrong cell count");
    }
    LogSample s;
    std::size_t i = 0;
    s.t = get(c[i++], line_no);
    StateVector x;
    for (int j = 0; j < kStateDim; ++j) x(j) = get(c[i++], line_no);
    s.state = SystemState::from_vector(x);
    for (int j = 0; j < 3; ++j) s.force(j) = get(c[i++], line_no);
    for (int j = 0; j < 3; ++j) s.u_a(j) = get(c[i++], line_no);
    s.storage = get(c[i++], line_no);
    for (std::size_t j = 0; j < n_pairs; ++j) s.h.push_back(get(c[i++], line_no));
    s.status = parse_status(c[i++], line_no);
    s.fallback = c[i++] == "1";
    s.solve_ms = get(c[i++], line_no);
    s.qp_iterations = static_cast<int>(get(c[i++], line_no));
    s.waypoint = static_cast<int>(get(c[i++], line_no));
    for (int j = 0; j < 3; ++j) s.xi_d(j) = get(c[i++], line_no);
    log.samples.push_back(std::move(s));
  }
  return log;
}

std::string metrics_json(const RunMetrics& m, const std::string& scenario,
                         const std::string& arm) {
  ordered_json j;
  j["scenario"] = scenario;
  j["arm"] = arm;
  j["success"] = m.success;
  j["valid"] = m.valid;
  j["ticks"] = m.ticks;
  j["violations"] = m.violations;
  j["infeasibility_episodes"] = m.infeasibility_episodes;
  j["infeasible_ticks"] = m.infeasible_ticks;
  j["longest_failure_streak"] = m.longest_failure_streak;
  j["overshoots"] = m.overshoots;
  j["min_clearance_m"] = num(m.min_clearance);
  j["min_h"] = num(m.min_h);
  ordered_json pairs = ordered_json::array();
  for (const PairMetrics& p : m.pairs) {
    pairs.push_back({{"pair", p.name},
                     {"min_clearance_m", num(p.min_clearance)},
                     {"min_h", num(p.min_h)},
                     {"violations", p.violations}});
  }
  j["pairs"] = pairs;
  j["max_alpha_deg"] = num(m.max_alpha_deg);
  j["max_beta_deg"] = num(m.max_beta_deg);
  j["rmse_xyz_m"] = num(m.rmse_xyz);
  j["final_distance_m"] = num(m.final_distance);
  j["final_swing_deg"] = num(m.final_swing_deg);
  j["max_storage_increase_J"] = num(m.max_storage_increase);
  j["solve_median_ms"] = num(m.solve_median_ms);
  j["solve_max_ms"] = num(m.solve_max_ms);
  j["overruns_50ms"] = m.overruns_50ms;
  return j.dump(2) + "\n";
}

std::string ablation_json(const AblationResult& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  ordered_json arms = ordered_json::array();
  for (const ArmSummary& s : r.arms) {
    arms.push_back({{"arm", s.arm},
                    {"label", s.label},
                    {"runs", s.runs},
                    {"failed_runs", s.failed_runs},
                    {"successes", s.successes},
                    {"violations", s.violations},
                    {"infeasibility", s.infeasibility},
                    {"overshoots", s.overshoots},
                    {"min_clearance_m", num(s.min_clearance)}});
  }
  j["arms"] = arms;
  ordered_json runs = ordered_json::array();
  for (const TrialResult& t : r.runs) {
    ordered_json e = {{"arm", t.arm}, {"trial", t.trial}, {"seed", t.seed}};
    if (t.failed) {
      e["error"] = t.error;
    } else {
      const RunMetrics& m = t.metrics;
      e["success"] = m.success;
      e["violations"] = m.violations;
      e["infeasibility_episodes"] = m.infeasibility_episodes;
      e["overshoots"] = m.overshoots;
      e["min_clearance_m"] = num(m.min_clearance);
      e["max_swing_deg"] = num(std::max(m.max_alpha_deg, m.max_beta_deg));
      e["rmse_xyz_m"] = num(m.rmse_xyz);
      e["final_distance_m"] = num(m.final_distance);
    }
    runs.push_back(e);
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::string ablation_table(const AblationResult& r) {
  const std::vector<std::string> head = {"Arm",       "Runs",       "Success", "Viol./Infeas.",
                                         "Overshoot", "Min clr [m]", "Solve [ms]"};
  std::vector<std::vector<std::string>> rows;
  for (const ArmSummary& s : r.arms) {
    std::ostringstream clr, solve;
    clr << std::fixed << std::setprecision(3) << s.min_clearance;
    solve << std::fixed << std::setprecision(2) << s.solve_median_ms;
    std::string runs = std::to_string(s.runs);
    if (s.failed_runs > 0) runs += " (" + std::to_string(s.failed_runs) + " failed)";
    rows.push_back({s.label, runs, std::to_string(s.successes),
                    std::to_string(s.violations) + " / " + std::to_string(s.infeasibility),
                    std::to_string(s.overshoots), clr.str(), solve.str()});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    out << '\n';
  };
  emit(head);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

}  // namespace slungmpc
