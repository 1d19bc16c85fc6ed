#pragma once

#include "slungmpc/types.hpp"

namespace slungmpc {

/// Physical parameters of the quadrotor with a point-mass payload on a rigid cable.
struct ModelParams {
  double m_q = 1.5;   // quadrotor mass [kg]
  double m_l = 0.2;   // payload mass [kg]
  double l = 0.5;     // cable length [m]
  double g = 9.81;    // [m/s^2]
  Mat3 J = Eigen::Vector3d(0.03, 0.03, 0.05).asDiagonal();  // body inertia [kg m^2]
  double u_max = 2.0 * 1.7 * 9.81;                           // per-axis force bound [N]
  double swing_max = 60.0 * EIGEN_PI / 180.0;                // controller swing bound [rad]

  double total_mass() const { return m_q + m_l; }
  double hover_thrust() const { return total_mass() * g; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// x = [xi, gamma, xi_dot, gamma_dot], gamma = (alpha, beta).
struct SystemState {
  Vec3 xi = Vec3::Zero();
  Vec2 gamma = Vec2::Zero();
  Vec3 xi_dot = Vec3::Zero();
  Vec2 gamma_dot = Vec2::Zero();

  Vec5 q() const;
  Vec5 q_dot() const;
  StateVector vector() const;
  bool finite() const;

  static SystemState from_vector(const StateVector& x);
  static SystemState from_q(const Vec5& q, const Vec5& q_dot);
  static SystemState hover_at(const Vec3& position);
};

struct AttitudeState {
  Mat3 R = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
};

/// Swing angles beyond which the simulation is flagged invalid.
inline constexpr double kSwingValidityLimit = 85.0 * EIGEN_PI / 180.0;

Mat5 inertia_matrix(const Vec5& q, const ModelParams& p);
Mat5 coriolis_matrix(const Vec5& q, const Vec5& q_dot, const ModelParams& p);
Vec5 gravity_vector(const Vec5& q, const ModelParams& p);

/// Lumped potential energy (m_Q + m_L) g z + m_L g l (1 - cos a cos b).
double potential_energy(const Vec5& q, const ModelParams& p);
double kinetic_energy(const Vec5& q, const Vec5& q_dot, const ModelParams& p);

/// Unit vector from the quadrotor to the payload.
Vec3 cable_direction(const Vec2& gamma);
/// d(cable_direction)/d(alpha, beta), 3x2.
Eigen::Matrix<double, 3, 2> cable_jacobian(const Vec2& gamma);

Vec3 payload_position(const SystemState& s, const ModelParams& p);
Vec3 payload_velocity(const SystemState& s, const ModelParams& p);

/// Translational accelerations written affine in the applied force F:
///   xi_ddot = drift_quad + input_quad * F,   p_L_ddot = drift_payload + input_payload * F.
/// Both are exact because q_ddot is affine in the generalized force.
struct AccelerationSplit {
  Vec3 drift_quad;
  Mat3 input_quad;
  Vec3 drift_payload;
  Mat3 input_payload;
  Vec5 q_ddot_passive;  // q_ddot at F = 0
};

AccelerationSplit acceleration_affine(const SystemState& s, const ModelParams& p);

/// q_ddot = M^-1 (col(F, 0, 0) - C q_dot - G). Throws DomainError near cos(beta) = 0.
Vec5 forward_dynamics(const SystemState& s, const Vec3& force, const ModelParams& p);

/// Stacked first-order ODE x_dot = f(x, F).
StateVector state_derivative(const StateVector& x, const Vec3& force, const ModelParams& p);

struct AttitudeCommand {
  double roll = 0.0;
  double pitch = 0.0;
  double thrust = 0.0;
};

/// Roll/pitch/thrust realizing the force u = F R e3 for a given yaw.
AttitudeCommand attitude_command(const Vec3& u, double yaw);
/// Z-Y-X rotation R = Rz(yaw) Ry(pitch) Rx(roll).
Mat3 rotation_from_euler(double roll, double pitch, double yaw);

struct AttitudeRates {
  Mat3 R_dot;
  Vec3 omega_dot;
};

AttitudeRates attitude_rates(const AttitudeState& att, const Vec3& torque, const ModelParams& p);
/// One RK4 step of the SO(3) dynamics followed by re-orthonormalization of R.
AttitudeState attitude_rk4_step(const AttitudeState& att, const Vec3& torque, double dt,
                                const ModelParams& p);

Mat3 skew(const Vec3& w);

}  // namespace slungmpc
