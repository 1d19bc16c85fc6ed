#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slungmpc/condense.hpp"
#include "slungmpc/energy.hpp"
#include "slungmpc/obstacle.hpp"
#include "slungmpc/safety.hpp"
#include "slungmpc/sim.hpp"

namespace slungmpc {

enum class CbfMode { None, StateConstraint, FirstOrder, HighOrder };

/// How the strict passivity inequality enters the QP.
///  Linearized: tangent rows at every node.
///  FirstNodeExact: tangent rows plus the exact ball on the applied input.
///  Exact: tangent rows plus balls at every node (velocity frozen at the prediction).
enum class PassivityMode { Linearized, FirstNodeExact, Exact };

const char* to_string(CbfMode m);
const char* to_string(PassivityMode m);

struct OcpConfig {
  double T = 2.0;
  int N = 40;
  StateMatrix Q = (StateVector() << 10, 10, 10, 5, 5, 1, 1, 1, 1, 1).finished().asDiagonal();
  Mat3 R = Mat3::Identity() * 0.1;
  std::optional<StateMatrix> terminal;  // defaults to 10 Q
  bool passivity = true;
  PassivityMode passivity_mode = PassivityMode::FirstNodeExact;
  CbfMode cbf = CbfMode::HighOrder;
  double cbf_margin = 0.0;             // extra clearance added to d_min inside the controller [m]
  double input_bound = 2.0 * 1.7 * 9.81;  // box on each component of u_a [N]
  double swing_weight = 1e4;           // L1 weight on the largest swing-bound excess
  double swing_weight_quadratic = 1.0;
  bool global_slack = false;           // one shared slack on every barrier and passivity row
  double global_slack_weight = 1e6;
  int sqp_iterations = 1;              // 1 = real-time iteration
  double sqp_tolerance = 1e-8;
  double fd_step = 1e-6;
  QpSettings qp{.max_iterations = 1000};  // cold solves can activate several hundred rows

  double step() const { return T / N; }
  StateMatrix terminal_weight() const { return terminal.value_or(10.0 * Q); }
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Everything the controller needs besides the measurement.
struct NmpcParams {
  OcpConfig ocp;
  ModelParams model;
  PassivityParams energy;
  SafetyParams safety;

  void validate() const;
};

/// Linearization trajectory: N + 1 states and N shaped inputs; active set of the last QP.
struct OcpWarmStart {
  std::vector<StateVector> x;
  std::vector<Vec3> u_a;
  std::vector<int> active;
  double t = 0.0;
};

enum class RowKind { Hocbf, FirstOrderCbf, StateConstraint, Passivity, Swing };

const char* to_string(RowKind k);

struct RowTag {
  RowKind kind = RowKind::Hocbf;
  int node = 0;
  int obstacle_id = -1;
  Body body = Body::Quadrotor;
};

struct RowCounts {
  int hocbf = 0;
  int first_order = 0;
  int state_constraint = 0;
  int passivity = 0;
  int swing = 0;
  int input_bounds = 0;
  int balls = 0;

  int cbf() const { return hocbf + first_order + state_constraint; }
};

struct Transcription {
  StagedQp staged;
  QpProblem qp;
  std::vector<RowTag> tags;  // one per row of qp.A_in
  RowCounts counts;
  std::vector<StateVector> x_bar;
  std::vector<Vec3> u_bar;
};

/// Multiple-shooting QP about the warm start; the first node is replaced by the measurement.
/// Throws DomainError when the model is evaluated outside its domain.
Transcription transcribe(const SystemState& state, const Vec3& xi_d,
                         std::span<const ObstacleState> obstacles, const OcpWarmStart& warm,
                         const NmpcParams& params);

/// Hover-hold guess at the current position.
OcpWarmStart cold_start(const SystemState& state, const OcpConfig& config);

/// One RK4 interval with the force held at u_a + shaping offset of the interval start.
StateVector shooting_step(const StateVector& x, const Vec3& u_a, const Vec3& xi_d, double h,
                          const NmpcParams& params);

struct OcpSolution {
  std::vector<Vec3> u_a;          // N
  std::vector<StateVector> x;     // N + 1
  SolveStatus status = SolveStatus::Optimal;
  double kkt_residual = 0.0;
  double solve_time = 0.0;        // [s]
  int qp_iterations = 0;
  int sqp_iterations = 0;
  int cut_rounds = 0;
  RowCounts active_counts;
  std::vector<int> active;
  Vec3 force = Vec3::Zero();      // physical force for the first input
  double t = 0.0;
  double step = 0.0;              // node spacing [s]
};

/// Linearize, solve one QP (or iterate when sqp_iterations > 1). Never throws on solver
/// failure; the returned trajectories then equal the warm start.
OcpSolution rti_step(const SystemState& state, const Vec3& xi_d,
                     std::span<const ObstacleState> obstacles, const OcpWarmStart& warm,
                     const NmpcParams& params);

/// Moves the trajectories shift_nodes nodes forward (fractions interpolate linearly) and
/// repeats the terminal node.
OcpWarmStart shift_warm_start(const OcpSolution& previous, double shift_nodes = 1.0);

/// Receding-horizon controller around rti_step, warm started by a shift of one control period.
class NmpcController : public Controller {
 public:
  NmpcController(NmpcParams params, double dt_ctrl);

  ControlOutput compute(const ControlRequest& request) override;
  void reset() override;

  const NmpcParams& params() const { return params_; }
  const std::optional<OcpSolution>& last_solution() const { return last_; }

 private:
  NmpcParams params_;
  double dt_ctrl_;
  std::optional<OcpSolution> last_;
};

}  // namespace slungmpc
