#include "slungmpc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slungmpc {

namespace {

constexpr double kHalfPi = 0.5 * EIGEN_PI;
constexpr double kMinPivot = 1e-10;

void require_swing_domain(const Vec2& gamma) {
  if (!(std::abs(gamma(0)) < kHalfPi) || !(std::abs(gamma(1)) < kHalfPi)) {
    throw DomainError("swing angles outside (-pi/2, pi/2): alpha=" + std::to_string(gamma(0)) +
                      " beta=" + std::to_string(gamma(1)));
  }
}

// Block elimination of M = [m I, Mc; Mc', Mp]. The Schur complement pivots are the last two
// Cholesky pivots of M, so the singularity test matches a full factorization.
struct InertiaSolver {
  double m;
  Eigen::Matrix<double, 3, 2> Mc;
  Eigen::Matrix2d S_inv;

  InertiaSolver(double sa, double ca, double sb, double cb, const ModelParams& p)
      : m(p.total_mass()) {
    const double ml = p.m_l * p.l;
    const double mll = ml * p.l;
    Mc << ca * cb, -sa * sb,
          0.0, cb,
          sa * cb, ca * sb;
    Mc *= ml;
    Eigen::Matrix2d S;
    S << mll * cb * cb, 0.0,
         0.0, mll;
    S.noalias() -= Mc.transpose() * Mc / m;
    const double p1 = S(0, 0);
    const double p2 = S(1, 1) - S(0, 1) * S(0, 1) / p1;
    if (!(p1 >= kMinPivot) || !(p2 >= kMinPivot)) {
      throw DomainError("inertia matrix is numerically singular (pivot " +
                        std::to_string(std::min(p1, p2)) + ")");
    }
    const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    S_inv << S(1, 1), -S(0, 1), -S(1, 0), S(0, 0);
    S_inv /= det;
  }

  Vec5 solve(const Vec5& tau) const {
    Vec5 out;
    const Vec3 t_xi = tau.head<3>();
    out.tail<2>() = S_inv * (tau.tail<2>() - Mc.transpose() * t_xi / m);
    out.head<3>() = (t_xi - Mc * out.tail<2>()) / m;
    return out;
  }

  /// M^-1 [I; 0]
  Eigen::Matrix<double, 5, 3> input_map() const {
    Eigen::Matrix<double, 5, 3> X;
    X.bottomRows<2>() = -S_inv * Mc.transpose() / m;
    X.topRows<3>() = (Mat3::Identity() - Mc * X.bottomRows<2>()) / m;
    return X;
  }
};

// -C(q, q_dot) q_dot - G(q) without forming the matrices.
Vec5 passive_torque(const Vec5& qd, double sa, double ca, double sb, double cb,
                    const ModelParams& p) {
  const double ad = qd(3), bd = qd(4);
  const double ml = p.m_l * p.l;
  const double mll = ml * p.l;
  const double mgl = p.m_l * p.g * p.l;
  Vec5 t;
  t(0) = -(-ml * ad * sa * cb - ml * bd * ca * sb) * ad - (-ml * ad * ca * sb - ml * bd * sa * cb) * bd;
  t(1) = ml * bd * sb * bd;
  t(2) = -(ml * ad * ca * cb - ml * bd * sa * sb) * ad - (-ml * ad * sa * sb + ml * bd * ca * cb) * bd -
         p.total_mass() * p.g;
  t(3) = mll * bd * cb * sb * ad + mll * ad * cb * sb * bd - mgl * sa * cb;
  t(4) = -mll * ad * cb * sb * ad - mgl * ca * sb;
  return t;
}

// Velocity-quadratic part of the payload offset acceleration, d2n/dt2 at gamma_ddot = 0.
Vec3 cable_centripetal(const Vec2& gamma, const Vec2& gamma_dot) {
  const double sa = std::sin(gamma(0)), ca = std::cos(gamma(0));
  const double sb = std::sin(gamma(1)), cb = std::cos(gamma(1));
  const Vec3 n_aa(-sa * cb, 0.0, ca * cb);
  const Vec3 n_ab(-ca * sb, 0.0, -sa * sb);
  const Vec3 n_bb(-sa * cb, -sb, ca * cb);
  const double ad = gamma_dot(0), bd = gamma_dot(1);
  return ad * ad * n_aa + 2.0 * ad * bd * n_ab + bd * bd * n_bb;
}

}  // namespace

void ModelParams::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("model." + field + ": " + why);
  };
  if (!(m_q > 0.0)) fail("m_q", "quadrotor mass must be positive");
  if (!(m_l > 0.0)) fail("m_l", "payload mass must be positive");
  if (!(l > 0.0)) fail("l", "cable length must be positive");
  if (!(g > 0.0)) fail("g", "gravity must be positive");
  if (!J.allFinite() || (J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail("J", "inertia must be symmetric");
  }
  if (Eigen::SelfAdjointEigenSolver<Mat3>(J).eigenvalues().minCoeff() <= 0.0) {
    fail("J", "inertia must be positive definite");
  }
  if (!(u_max > 0.0)) fail("u_max", "force bound must be positive");
  if (!(swing_max > 0.0 && swing_max < kHalfPi)) fail("swing_max", "must lie in (0, pi/2)");
}

Vec5 SystemState::q() const {
  Vec5 out;
  out << xi, gamma;
  return out;
}

Vec5 SystemState::q_dot() const {
  Vec5 out;
  out << xi_dot, gamma_dot;
  return out;
}

StateVector SystemState::vector() const {
  StateVector x;
  x << xi, gamma, xi_dot, gamma_dot;
  return x;
}

bool SystemState::finite() const {
  return xi.allFinite() && gamma.allFinite() && xi_dot.allFinite() && gamma_dot.allFinite();
}

SystemState SystemState::from_vector(const StateVector& x) {
  SystemState s;
  s.xi = x.segment<3>(0);
  s.gamma = x.segment<2>(3);
  s.xi_dot = x.segment<3>(5);
  s.gamma_dot = x.segment<2>(8);
  return s;
}

SystemState SystemState::from_q(const Vec5& q, const Vec5& q_dot) {
  SystemState s;
  s.xi = q.head<3>();
  s.gamma = q.tail<2>();
  s.xi_dot = q_dot.head<3>();
  s.gamma_dot = q_dot.tail<2>();
  return s;
}

SystemState SystemState::hover_at(const Vec3& position) {
  SystemState s;
  s.xi = position;
  return s;
}

Mat5 inertia_matrix(const Vec5& q, const ModelParams& p) {
  require_swing_domain(q.tail<2>());
  const double sa = std::sin(q(3)), ca = std::cos(q(3));
  const double sb = std::sin(q(4)), cb = std::cos(q(4));
  const double ml = p.m_l * p.l;
  const double mll = p.m_l * p.l * p.l;

  Mat5 M = Mat5::Zero();
  M.topLeftCorner<3, 3>().diagonal().setConstant(p.total_mass());
  Eigen::Matrix<double, 3, 2> Mc;
  Mc << ca * cb, -sa * sb,
        0.0, cb,
        sa * cb, ca * sb;
  Mc *= ml;
  M.topRightCorner<3, 2>() = Mc;
  M.bottomLeftCorner<2, 3>() = Mc.transpose();
  M(3, 3) = mll * cb * cb;
  M(4, 4) = mll;
  return M;
}

// Entries follow the Christoffel construction. Within the swing block c54 = -c45; the
// swing rows have no coupling to the translational velocities.
Mat5 coriolis_matrix(const Vec5& q, const Vec5& q_dot, const ModelParams& p) {
  const double sa = std::sin(q(3)), ca = std::cos(q(3));
  const double sb = std::sin(q(4)), cb = std::cos(q(4));
  const double ad = q_dot(3), bd = q_dot(4);
  const double ml = p.m_l * p.l;
  const double mll = p.m_l * p.l * p.l;

  Mat5 C = Mat5::Zero();
  C(0, 3) = -ml * ad * sa * cb - ml * bd * ca * sb;
  C(0, 4) = -ml * ad * ca * sb - ml * bd * sa * cb;
  C(1, 4) = -ml * bd * sb;
  C(2, 3) = ml * ad * ca * cb - ml * bd * sa * sb;
  C(2, 4) = -ml * ad * sa * sb + ml * bd * ca * cb;
  C(3, 3) = -mll * bd * cb * sb;
  C(3, 4) = -mll * ad * cb * sb;
  C(4, 3) = -C(3, 4);
  return C;
}

Vec5 gravity_vector(const Vec5& q, const ModelParams& p) {
  const double sa = std::sin(q(3)), ca = std::cos(q(3));
  const double sb = std::sin(q(4)), cb = std::cos(q(4));
  const double mgl = p.m_l * p.g * p.l;
  Vec5 G;
  G << 0.0, 0.0, p.total_mass() * p.g, mgl * sa * cb, mgl * ca * sb;
  return G;
}

double potential_energy(const Vec5& q, const ModelParams& p) {
  return p.total_mass() * p.g * q(2) +
         p.m_l * p.g * p.l * (1.0 - std::cos(q(3)) * std::cos(q(4)));
}

double kinetic_energy(const Vec5& q, const Vec5& q_dot, const ModelParams& p) {
  return 0.5 * q_dot.dot(inertia_matrix(q, p) * q_dot);
}

Vec3 cable_direction(const Vec2& gamma) {
  const double sa = std::sin(gamma(0)), ca = std::cos(gamma(0));
  const double sb = std::sin(gamma(1)), cb = std::cos(gamma(1));
  return {sa * cb, sb, -ca * cb};
}

Eigen::Matrix<double, 3, 2> cable_jacobian(const Vec2& gamma) {
  const double sa = std::sin(gamma(0)), ca = std::cos(gamma(0));
  const double sb = std::sin(gamma(1)), cb = std::cos(gamma(1));
  Eigen::Matrix<double, 3, 2> Jn;
  Jn << ca * cb, -sa * sb,
        0.0, cb,
        sa * cb, ca * sb;
  return Jn;
}

Vec3 payload_position(const SystemState& s, const ModelParams& p) {
  return s.xi + p.l * cable_direction(s.gamma);
}

Vec3 payload_velocity(const SystemState& s, const ModelParams& p) {
  return s.xi_dot + p.l * cable_jacobian(s.gamma) * s.gamma_dot;
}

AccelerationSplit acceleration_affine(const SystemState& s, const ModelParams& p) {
  require_swing_domain(s.gamma);
  const double sa = std::sin(s.gamma(0)), ca = std::cos(s.gamma(0));
  const double sb = std::sin(s.gamma(1)), cb = std::cos(s.gamma(1));
  const InertiaSolver inertia(sa, ca, sb, cb, p);
  const Vec5 passive = inertia.solve(passive_torque(s.q_dot(), sa, ca, sb, cb, p));
  const Eigen::Matrix<double, 5, 3> X = inertia.input_map();

  const Eigen::Matrix<double, 3, 2> Jn = inertia.Mc / (p.m_l * p.l);
  AccelerationSplit out;
  out.q_ddot_passive = passive;
  out.drift_quad = passive.head<3>();
  out.input_quad = X.topRows<3>();
  out.drift_payload = out.drift_quad +
                      p.l * (Jn * passive.tail<2>() + cable_centripetal(s.gamma, s.gamma_dot));
  out.input_payload = out.input_quad + p.l * Jn * X.bottomRows<2>();
  return out;
}

Vec5 forward_dynamics(const SystemState& s, const Vec3& force, const ModelParams& p) {
  require_swing_domain(s.gamma);
  const double sa = std::sin(s.gamma(0)), ca = std::cos(s.gamma(0));
  const double sb = std::sin(s.gamma(1)), cb = std::cos(s.gamma(1));
  Vec5 tau = passive_torque(s.q_dot(), sa, ca, sb, cb, p);
  tau.head<3>() += force;
  return InertiaSolver(sa, ca, sb, cb, p).solve(tau);
}

StateVector state_derivative(const StateVector& x, const Vec3& force, const ModelParams& p) {
  const SystemState s = SystemState::from_vector(x);
  StateVector dx;
  dx.head<5>() = x.tail<5>();
  dx.tail<5>() = forward_dynamics(s, force, p);
  return dx;
}

AttitudeCommand attitude_command(const Vec3& u, double yaw) {
  const double F = u.norm();
  if (!(F > 0.0)) throw DomainError("attitude_command: zero thrust has no direction");
  if (!(u(2) > 0.0)) throw DomainError("attitude_command: thrust must point upward");
  const double s = (u(0) * std::sin(yaw) - u(1) * std::cos(yaw)) / F;
  if (std::abs(s) > 1.0 + 1e-9) throw DomainError("attitude_command: roll argument out of range");
  AttitudeCommand cmd;
  cmd.thrust = F;
  cmd.roll = std::asin(std::clamp(s, -1.0, 1.0));
  cmd.pitch = std::atan((u(0) * std::cos(yaw) + u(1) * std::sin(yaw)) / u(2));
  return cmd;
}

Mat3 rotation_from_euler(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

Mat3 skew(const Vec3& w) {
  Mat3 S;
  S << 0.0, -w(2), w(1),
       w(2), 0.0, -w(0),
       -w(1), w(0), 0.0;
  return S;
}

AttitudeRates attitude_rates(const AttitudeState& att, const Vec3& torque, const ModelParams& p) {
  AttitudeRates r;
  r.R_dot = att.R * skew(att.omega);
  r.omega_dot = p.J.ldlt().solve(torque - att.omega.cross(p.J * att.omega));
  return r;
}

AttitudeState attitude_rk4_step(const AttitudeState& att, const Vec3& torque, double dt,
                                const ModelParams& p) {
  auto shifted = [](const AttitudeState& a, const AttitudeRates& k, double h) {
    AttitudeState out;
    out.R = a.R + h * k.R_dot;
    out.omega = a.omega + h * k.omega_dot;
    return out;
  };
  const AttitudeRates k1 = attitude_rates(att, torque, p);
  const AttitudeRates k2 = attitude_rates(shifted(att, k1, 0.5 * dt), torque, p);
  const AttitudeRates k3 = attitude_rates(shifted(att, k2, 0.5 * dt), torque, p);
  const AttitudeRates k4 = attitude_rates(shifted(att, k3, dt), torque, p);

  AttitudeState next;
  next.R = att.R + dt / 6.0 * (k1.R_dot + 2.0 * k2.R_dot + 2.0 * k3.R_dot + k4.R_dot);
  next.omega =
      att.omega + dt / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);

  // Project back onto SO(3).
  Eigen::JacobiSVD<Mat3> svd(next.R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 U = svd.matrixU();
    U.col(2) *= -1.0;
    R = U * svd.matrixV().transpose();
  }
  next.R = R;
  return next;
}

}  // namespace slungmpc
