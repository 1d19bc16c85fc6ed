#include "slungmpc/safety.hpp"

namespace slungmpc {

namespace {

Vec3 project(const Vec3& w, const ObstacleState& obstacle) {
  return obstacle.planar ? Vec3(w(0), w(1), 0.0) : w;
}

}  // namespace

void SafetyParams::validate() const {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) {
    throw ConfigError("safety.kappa1/safety.kappa2: barrier gains must be strictly positive");
  }
  if (!(r_q >= 0.0) || !(r_l >= 0.0)) throw ConfigError("safety.r_q/r_l: radii must be >= 0");
  if (!(delta > 0.0)) throw ConfigError("safety.delta: margin must be strictly positive");
}

double min_distance(const ObstacleState& obstacle, Body body, const SafetyParams& params) {
  return obstacle.radius + (body == Body::Quadrotor ? params.r_q : params.r_l) + params.delta;
}

Vec3 clearance_offset(const Vec3& body_pos, const ObstacleState& obstacle) {
  return project(body_pos - obstacle.position, obstacle);
}

double clearance(const Vec3& body_pos, const ObstacleState& obstacle, Body body,
                 const SafetyParams& params) {
  const double d = min_distance(obstacle, body, params);
  return clearance_offset(body_pos, obstacle).squaredNorm() - d * d;
}

double clearance(const Vec3& body_pos, const Obstacle& obstacle, double t, Body body,
                 const SafetyParams& params) {
  return clearance(body_pos, obstacle_position(obstacle, t), body, params);
}

ClearanceDerivatives clearance_derivatives(const SystemState& s, const AccelerationSplit& acc,
                                           Body body, const ObstacleState& obstacle,
                                           const SafetyParams& params, const ModelParams& model,
                                           const Vec3& force_offset) {
  const bool quad = body == Body::Quadrotor;
  const Vec3 pos = quad ? s.xi : payload_position(s, model);
  const Vec3 vel = quad ? s.xi_dot : payload_velocity(s, model);
  const Vec3& drift = quad ? acc.drift_quad : acc.drift_payload;
  const Mat3& input = quad ? acc.input_quad : acc.input_payload;

  const Vec3 r = clearance_offset(pos, obstacle);
  const Vec3 rel_vel = project(vel - obstacle.velocity, obstacle);
  const double d = min_distance(obstacle, body, params);

  ClearanceDerivatives out;
  out.h = r.squaredNorm() - d * d;
  out.h_dot = 2.0 * r.dot(rel_vel);
  // r has no vertical component for planar obstacles, so r.(.) needs no projection.
  out.h_ddot_drift = 2.0 * rel_vel.squaredNorm() +
                     2.0 * r.dot(drift + input * force_offset - obstacle.acceleration);
  out.input_row = 2.0 * input.transpose() * r;
  return out;
}

ClearanceDerivatives clearance_derivatives(const SystemState& s, Body body,
                                           const ObstacleState& obstacle,
                                           const SafetyParams& params, const ModelParams& model,
                                           const Vec3& force_offset) {
  return clearance_derivatives(s, acceleration_affine(s, model), body, obstacle, params, model,
                               force_offset);
}

HocbfRow hocbf_row(const SystemState& s, const AccelerationSplit& acc, Body body,
                   const ObstacleState& obstacle, const SafetyParams& params,
                   const ModelParams& model, const Vec3& force_offset) {
  const ClearanceDerivatives cd =
      clearance_derivatives(s, acc, body, obstacle, params, model, force_offset);
  HocbfRow row;
  row.obstacle_id = obstacle.id;
  row.body = body;
  row.h = cd.h;
  row.h_dot = cd.h_dot;
  row.psi1 = cd.h_dot + params.kappa1 * cd.h;
  row.a = cd.input_row;
  row.b = -(cd.h_ddot_drift + params.kappa1 * cd.h_dot + params.kappa2 * row.psi1);
  return row;
}

HocbfRow hocbf_row(const SystemState& s, Body body, const ObstacleState& obstacle,
                   const SafetyParams& params, const ModelParams& model,
                   const Vec3& force_offset) {
  return hocbf_row(s, acceleration_affine(s, model), body, obstacle, params, model, force_offset);
}

StackedRows stack_rows(const SystemState& s, std::span<const ObstacleState> obstacles, double tau,
                       const SafetyParams& params, const ModelParams& model,
                       const Vec3& force_offset) {
  StackedRows out;
  const auto n = static_cast<Eigen::Index>(2 * obstacles.size());
  out.A.resize(n, 3);
  out.b.resize(n);
  out.rows.reserve(static_cast<std::size_t>(n));
  if (obstacles.empty()) return out;

  const AccelerationSplit acc = acceleration_affine(s, model);
  Eigen::Index k = 0;
  for (const ObstacleState& obs : obstacles) {
    const ObstacleState at = obs.extrapolate(tau);
    for (Body body : {Body::Quadrotor, Body::Payload}) {
      HocbfRow row = hocbf_row(s, acc, body, at, params, model, force_offset);
      out.A.row(k) = row.a.transpose();
      out.b(k) = row.b;
      out.rows.push_back(row);
      ++k;
    }
  }
  return out;
}

}  // namespace slungmpc
