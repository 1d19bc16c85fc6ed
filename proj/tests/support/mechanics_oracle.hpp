#pragma once

#include <cmath>
#include <functional>

#include "slungmpc/model.hpp"

namespace slungmpc::testing {

// Kinematics written out from the cable geometry, independent of the closed-form M, C, G.
inline Vec3 payload_of(const Vec5& q, double l) {
  const double a = q(3), b = q(4);
  return q.head<3>() + l * Vec3(std::sin(a) * std::cos(b), std::sin(b), -std::cos(a) * std::cos(b));
}

inline Eigen::Matrix<double, 3, 5> payload_jacobian(const Vec5& q, double l) {
  const double a = q(3), b = q(4);
  Eigen::Matrix<double, 3, 5> J = Eigen::Matrix<double, 3, 5>::Zero();
  J.leftCols<3>().setIdentity();
  J.col(3) = l * Vec3(std::cos(a) * std::cos(b), 0.0, std::sin(a) * std::cos(b));
  J.col(4) = l * Vec3(-std::sin(a) * std::sin(b), std::cos(b), std::cos(a) * std::sin(b));
  return J;
}

inline double kinetic_oracle(const Vec5& q, const Vec5& qd, const ModelParams& p) {
  const Vec3 vl = payload_jacobian(q, p.l) * qd;
  return 0.5 * p.m_q * qd.head<3>().squaredNorm() + 0.5 * p.m_l * vl.squaredNorm();
}

inline double potential_oracle(const Vec5& q, const ModelParams& p) {
  // quadrotor height plus payload height, shifted so the hanging payload has zero potential
  return p.m_q * p.g * q(2) + p.m_l * p.g * (payload_of(q, p.l)(2) + p.l);
}

// dT/dq_dot, exact since T is quadratic in q_dot
inline Vec5 momentum_oracle(const Vec5& q, const Vec5& qd, const ModelParams& p) {
  const auto J = payload_jacobian(q, p.l);
  Vec5 out = p.m_l * J.transpose() * (J * qd);
  out.head<3>() += p.m_q * qd.head<3>();
  return out;
}

inline Vec5 gradient_q(const std::function<double(const Vec5&)>& f, const Vec5& q, double h) {
  Vec5 g;
  for (int i = 0; i < 5; ++i) {
    Vec5 e = Vec5::Zero();
    e(i) = h;
    g(i) = (f(q + e) - f(q - e)) / (2 * h);
  }
  return g;
}

}  // namespace slungmpc::testing
