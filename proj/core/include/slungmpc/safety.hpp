#pragma once

#include <span>
#include <vector>

#include "slungmpc/model.hpp"
#include "slungmpc/obstacle.hpp"

namespace slungmpc {

struct SafetyParams {
  double kappa1 = 2.0;  // [1/s]
  double kappa2 = 2.0;  // [1/s]
  double r_q = 0.0;     // inflated quadrotor radius [m]
  double r_l = 0.0;     // inflated payload radius [m]
  double delta = 0.05;  // margin [m]

  void validate() const;
};

enum class Body { Quadrotor, Payload };

inline const char* to_string(Body b) { return b == Body::Quadrotor ? "Q" : "L"; }

double min_distance(const ObstacleState& obstacle, Body body, const SafetyParams& params);

/// Offset of the body from the obstacle center (horizontal only for planar obstacles).
Vec3 clearance_offset(const Vec3& body_pos, const ObstacleState& obstacle);

/// h = |r|^2 - d_min^2.
double clearance(const Vec3& body_pos, const ObstacleState& obstacle, Body body,
                 const SafetyParams& params);
double clearance(const Vec3& body_pos, const Obstacle& obstacle, double t, Body body,
                 const SafetyParams& params);

/// h, its first derivative and the second derivative split as
/// h_ddot = h_ddot_drift + input_row . u_a, where F = u_a + force_offset.
struct ClearanceDerivatives {
  double h = 0.0;
  double h_dot = 0.0;
  double h_ddot_drift = 0.0;
  Vec3 input_row = Vec3::Zero();
};

ClearanceDerivatives clearance_derivatives(const SystemState& s, Body body,
                                           const ObstacleState& obstacle,
                                           const SafetyParams& params, const ModelParams& model,
                                           const Vec3& force_offset = Vec3::Zero());

/// Same, reusing an already evaluated acceleration split of the state.
ClearanceDerivatives clearance_derivatives(const SystemState& s, const AccelerationSplit& acc,
                                           Body body, const ObstacleState& obstacle,
                                           const SafetyParams& params, const ModelParams& model,
                                           const Vec3& force_offset);

/// One second-order barrier condition a.u_a >= b for an (obstacle, body) pair.
struct HocbfRow {
  Vec3 a = Vec3::Zero();
  double b = 0.0;
  int obstacle_id = 0;
  Body body = Body::Quadrotor;
  double h = 0.0;
  double h_dot = 0.0;
  double psi1 = 0.0;

  /// psi2 evaluated at u_a.
  double psi2(const Vec3& u_a) const { return a.dot(u_a) - b; }
};

HocbfRow hocbf_row(const SystemState& s, Body body, const ObstacleState& obstacle,
                   const SafetyParams& params, const ModelParams& model,
                   const Vec3& force_offset = Vec3::Zero());

HocbfRow hocbf_row(const SystemState& s, const AccelerationSplit& acc, Body body,
                   const ObstacleState& obstacle, const SafetyParams& params,
                   const ModelParams& model, const Vec3& force_offset);

struct StackedRows {
  Eigen::Matrix<double, Eigen::Dynamic, 3> A;
  Eigen::VectorXd b;
  std::vector<HocbfRow> rows;
};

/// Rows for every (obstacle, body) pair, obstacle-major and quadrotor before payload.
/// Obstacles are given at the measurement time and extrapolated tau seconds ahead.
StackedRows stack_rows(const SystemState& s, std::span<const ObstacleState> obstacles, double tau,
                       const SafetyParams& params, const ModelParams& model,
                       const Vec3& force_offset = Vec3::Zero());

}  // namespace slungmpc
