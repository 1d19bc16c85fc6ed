#include "slungmpc/energy.hpp"

#include <cmath>

namespace slungmpc {

void PassivityParams::validate() const {
  if (!(rho > 0.0) || !(epsilon > 0.0)) {
    throw ConfigError("energy.rho/energy.epsilon: passivity gains must be strictly positive");
  }
  if (!K.allFinite() || (K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("energy.K: shaping matrix must be symmetric");
  }
  if (Eigen::SelfAdjointEigenSolver<Mat3>(K).eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError("energy.K: shaping matrix must be positive definite");
  }
  if (!(4.0 * rho * epsilon < 1.0)) {
    throw ConfigError("energy.rho/energy.epsilon: 4 rho epsilon must be below 1");
  }
}

double storage(const SystemState& s, const Vec3& xi_d, const PassivityParams& params,
               const ModelParams& model) {
  const Vec5 q = s.q();
  const Vec5 qd = s.q_dot();
  const Vec3 e = s.xi - xi_d;
  const double swing =
      model.m_l * model.g * model.l * (1.0 - std::cos(s.gamma(0)) * std::cos(s.gamma(1)));
  return 0.5 * qd.dot(inertia_matrix(q, model) * qd) + swing + 0.5 * e.dot(params.K * e);
}

Vec3 shaped_input(const Vec3& u, const SystemState& s, const Vec3& xi_d,
                  const PassivityParams& params) {
  return u + params.K * (s.xi - xi_d);
}

Vec3 unshaped_input(const Vec3& u_a, const SystemState& s, const Vec3& xi_d,
                    const PassivityParams& params) {
  return u_a - params.K * (s.xi - xi_d);
}

Vec3 shaping_offset(const SystemState& s, const Vec3& xi_d, const PassivityParams& params,
                    const ModelParams& model) {
  return Vec3(0.0, 0.0, model.hover_thrust()) - params.K * (s.xi - xi_d);
}

Vec3 force_from_shaped(const Vec3& u_a, const SystemState& s, const Vec3& xi_d,
                       const PassivityParams& params, const ModelParams& model) {
  return u_a + shaping_offset(s, xi_d, params, model);
}

Vec3 shaped_from_force(const Vec3& force, const SystemState& s, const Vec3& xi_d,
                       const PassivityParams& params, const ModelParams& model) {
  return force - shaping_offset(s, xi_d, params, model);
}

double passivity_residual(const Vec3& u_a, const Vec3& v, const PassivityParams& params) {
  return u_a.dot(v) + params.rho * v.squaredNorm() + params.epsilon * u_a.squaredNorm();
}

PassivityRow passivity_row(const Vec3& u_a_ref, const Vec3& v_pred,
                           const PassivityParams& params) {
  PassivityRow row;
  row.coeffs = v_pred + 2.0 * params.epsilon * u_a_ref;
  row.rhs = -params.rho * v_pred.squaredNorm() + params.epsilon * u_a_ref.squaredNorm();
  return row;
}

PassivityBall passivity_ball(const Vec3& v, const PassivityParams& params) {
  // epsilon |u + v/(2 eps)|^2 <= |v|^2 / (4 eps) - rho |v|^2
  PassivityBall ball;
  ball.center = -v / (2.0 * params.epsilon);
  ball.radius_squared =
      v.squaredNorm() * (1.0 / (4.0 * params.epsilon * params.epsilon) - params.rho / params.epsilon);
  return ball;
}

}  // namespace slungmpc
