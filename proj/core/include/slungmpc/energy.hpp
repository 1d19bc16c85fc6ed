#pragma once

#include "slungmpc/model.hpp"

namespace slungmpc {

/// Gains of the strict passivity inequality u_a.v <= -rho |v|^2 - epsilon |u_a|^2 and the
/// position-shaping stiffness K.
struct PassivityParams {
  double rho = 0.5;       // output damping [N s/m]
  double epsilon = 0.01;  // input damping [m/(N s)]
  Mat3 K = Mat3::Identity() * 2.0;

  void validate() const;
};

/// Shaped storage: swing-aware kinetic energy, payload swing potential and the position spring.
/// The translational gravity potential is not part of it; the shaped input is defined on the
/// gravity-compensated force, so the port relation dV/dt = v.u_a holds exactly.
double storage(const SystemState& s, const Vec3& xi_d, const PassivityParams& params,
               const ModelParams& model);

/// u_a = u + K (xi - xi_d), with u the gravity-compensated force F - (m_Q + m_L) g e3.
Vec3 shaped_input(const Vec3& u, const SystemState& s, const Vec3& xi_d,
                  const PassivityParams& params);
/// Inverse of shaped_input.
Vec3 unshaped_input(const Vec3& u_a, const SystemState& s, const Vec3& xi_d,
                    const PassivityParams& params);

/// Physical force F applied for a shaped input, and its inverse.
Vec3 force_from_shaped(const Vec3& u_a, const SystemState& s, const Vec3& xi_d,
                       const PassivityParams& params, const ModelParams& model);
Vec3 shaped_from_force(const Vec3& force, const SystemState& s, const Vec3& xi_d,
                       const PassivityParams& params, const ModelParams& model);
/// F - u_a, i.e. the state-dependent offset between physical and shaped coordinates.
Vec3 shaping_offset(const SystemState& s, const Vec3& xi_d, const PassivityParams& params,
                    const ModelParams& model);

/// u_a.v + rho |v|^2 + epsilon |u_a|^2; the constraint holds iff the residual is <= 0.
double passivity_residual(const Vec3& u_a, const Vec3& v, const PassivityParams& params);

/// Affine inequality coeffs.u_a <= rhs.
struct PassivityRow {
  Vec3 coeffs = Vec3::Zero();
  double rhs = 0.0;

  double slack(const Vec3& u_a) const { return rhs - coeffs.dot(u_a); }
};

/// Tangent of the residual in u_a about u_a_ref with v frozen. Because epsilon |u_a|^2 is
/// convex the row is a relaxation: residual(u_a) = -slack(u_a) + epsilon |u_a - u_a_ref|^2.
PassivityRow passivity_row(const Vec3& u_a_ref, const Vec3& v_pred, const PassivityParams& params);

/// For fixed v the feasible set of u_a is the ball |u_a - center| <= radius.
/// radius_squared < 0 means no u_a satisfies the inequality.
struct PassivityBall {
  Vec3 center = Vec3::Zero();
  double radius_squared = 0.0;

  double radius() const { return radius_squared > 0.0 ? std::sqrt(radius_squared) : 0.0; }
};

PassivityBall passivity_ball(const Vec3& v, const PassivityParams& params);

}  // namespace slungmpc
