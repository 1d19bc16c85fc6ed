#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace slungmpc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

inline constexpr int kStateDim = 10;
inline constexpr int kInputDim = 3;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;

/// Raised when a configuration leaves the domain where the slung-load model is defined
/// (cable at or beyond horizontal, singular inertia matrix, degenerate thrust direction).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed or physically inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slungmpc

namespace slungmpc {

enum class SolveStatus { Optimal, MaxIterations, Infeasible, IllConditioned };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IllConditioned: return "ill_conditioned";
  }
  return "unknown";
}

}  // namespace slungmpc
