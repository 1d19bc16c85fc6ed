#pragma once

#include "slungmpc/types.hpp"

namespace slungmpc {

/// Obstacle kinematics at one instant. `planar` obstacles are vertical cylinders: only the
/// horizontal components enter the clearance.
struct ObstacleState {
  int id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double radius = 0.5;
  bool planar = false;

  /// Constant-acceleration extrapolation tau seconds ahead.
  ObstacleState extrapolate(double tau) const;
};

/// Sphere (or vertical cylinder) moving along p(t) = center0 + velocity t + acceleration t^2 / 2.
struct Obstacle {
  int id = 0;
  Vec3 center0 = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double radius = 0.5;
  bool planar = false;

  void validate() const;
};

ObstacleState obstacle_position(const Obstacle& obstacle, double t);

}  // namespace slungmpc
