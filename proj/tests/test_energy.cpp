#include "doctest.h"

#include <cmath>
#include <random>

#include "slungmpc/energy.hpp"
#include "slungmpc/sim.hpp"
#include "mechanics_oracle.hpp"

using namespace slungmpc;

TEST_CASE("storage") {
  ModelParams m;
  PassivityParams e;
  const Vec3 xi_d(1, 2, 3);

  CHECK(storage(SystemState::hover_at(xi_d), xi_d, e, m) == 0.0);

  SystemState s = SystemState::hover_at(xi_d);
  s.gamma = Vec2(EIGEN_PI / 3, 0.0);
  CHECK(storage(s, xi_d, e, m) == doctest::Approx(0.2 * 9.81 * 0.5 * 0.5).epsilon(1e-14));

  // kinetic + swing potential + spring, each assembled from the cable geometry
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  e.K = Vec3(1.0, 2.0, 3.0).asDiagonal();
  for (int trial = 0; trial < 500; ++trial) {
    SystemState x;
    x.xi = xi_d + Vec3(u(rng), u(rng), u(rng));
    x.gamma = Vec2(1.2 * u(rng), 1.2 * u(rng));
    x.xi_dot = Vec3(u(rng), u(rng), u(rng));
    x.gamma_dot = Vec2(u(rng), u(rng));
    const Vec3 err = x.xi - xi_d;
    const double oracle = testing::kinetic_oracle(x.q(), x.q_dot(), m) +
                          m.m_l * m.g * m.l * (1 - std::cos(x.gamma(0)) * std::cos(x.gamma(1))) +
                          0.5 * err.dot(e.K * err);
    const double V = storage(x, xi_d, e, m);
    CHECK(V == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(V > 0.0);
  }
}

TEST_CASE("shaped input") {
  PassivityParams e;
  ModelParams m;
  const Vec3 xi_d(0, 0, 1);
  SystemState s = SystemState::hover_at(xi_d);

  CHECK(shaped_input(Vec3(0.3, -1, 2), s, xi_d, e) == Vec3(0.3, -1, 2));

  e.K = Mat3::Identity();
  s.xi = xi_d + Vec3(1, 2, 3);
  CHECK(shaped_input(Vec3::Zero(), s, xi_d, e) == Vec3(1, 2, 3));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 u(n(rng), n(rng), n(rng));
    s.xi = Vec3(n(rng), n(rng), n(rng));
    CHECK((unshaped_input(shaped_input(u, s, xi_d, e), s, xi_d, e) - u).cwiseAbs().maxCoeff() <
          1e-14 * (1 + u.norm() + s.xi.norm()));
    const Vec3 F = force_from_shaped(u, s, xi_d, e, m);
    CHECK((shaped_from_force(F, s, xi_d, e, m) - u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((F - u - shaping_offset(s, xi_d, e, m)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // at the equilibrium the physical force is hover thrust and the shaped input vanishes
  s = SystemState::hover_at(xi_d);
  CHECK(shaped_from_force(Vec3(0, 0, m.hover_thrust()), s, xi_d, e, m).norm() < 1e-14);
}

TEST_CASE("passivity residual") {
  PassivityParams e;
  e.rho = 0.1;
  e.epsilon = 0.1;
  CHECK(passivity_residual(Vec3::Zero(), Vec3::Zero(), e) == 0.0);
  CHECK(passivity_residual(Vec3(1, 0, 0), Vec3(1, 0, 0), e) == doctest::Approx(1.2));

  // pure damping u_a = -c v satisfies the inequality for rho/(1 - eps c) < c < 1/eps
  PassivityParams small;
  small.rho = 0.5;
  small.epsilon = 0.01;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 2.0);
  for (double c = 0.6; c < 90.0; c *= 1.3) {
    const bool expect = c > small.rho / (1 - small.epsilon * c) && small.epsilon * c < 1;
    for (int k = 0; k < 20; ++k) {
      const Vec3 v(n(rng), n(rng), n(rng));
      const double r = passivity_residual(-c * v, v, small);
      // residual = |v|^2 (-c + rho + eps c^2)
      CHECK(r == doctest::Approx(v.squaredNorm() * (-c + small.rho + small.epsilon * c * c)));
      if (expect) CHECK(r < 0.0);
    }
  }
}

TEST_CASE("passivity row") {
  PassivityParams e;

  const PassivityRow trivial = passivity_row(Vec3::Zero(), Vec3::Zero(), e);
  CHECK(trivial.coeffs.isZero(0.0));
  CHECK(trivial.rhs == 0.0);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 3.0);

  SUBCASE("exact without the input damping term") {
    PassivityParams lin = e;
    lin.epsilon = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec3 ref(n(rng), n(rng), n(rng)), v(n(rng), n(rng), n(rng)), ua(n(rng), n(rng), n(rng));
      const PassivityRow row = passivity_row(ref, v, lin);
      CHECK(-row.slack(ua) == doctest::Approx(passivity_residual(ua, v, lin)));
    }
  }

  SUBCASE("tangent relaxation of the convex residual") {
    for (int k = 0; k < 1000; ++k) {
      const Vec3 ref(n(rng), n(rng), n(rng)), v(n(rng), n(rng), n(rng));
      const Vec3 ua = ref + 0.3 * Vec3(n(rng), n(rng), n(rng));
      const PassivityRow row = passivity_row(ref, v, e);
      const double excess = e.epsilon * (ua - ref).squaredNorm();
      CHECK(passivity_residual(ua, v, e) ==
            doctest::Approx(-row.slack(ua) + excess).epsilon(1e-10).scale(1.0));
      CHECK(passivity_residual(ua, v, e) <= -row.slack(ua) + excess + 1e-9);
      CHECK(passivity_residual(ua, v, e) >= -row.slack(ua) - 1e-9);
    }
  }

  SUBCASE("row equals the printed form") {
    const Vec3 ref(1, -2, 0.5), v(0.3, 0.1, -0.7);
    const PassivityRow row = passivity_row(ref, v, e);
    CHECK((row.coeffs - (v + 2 * e.epsilon * ref)).norm() < 1e-15);
    CHECK(row.rhs == doctest::Approx(-e.rho * v.squaredNorm() + e.epsilon * ref.squaredNorm()));
  }
}

TEST_CASE("passivity ball") {
  PassivityParams e;
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 v(n(rng), n(rng), n(rng));
    const PassivityBall b = passivity_ball(v, e);
    REQUIRE(b.radius_squared >= 0.0);
    // boundary points of the ball zero the residual, the center minimizes it
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    CHECK(passivity_residual(b.center + b.radius() * dir, v, e) ==
          doctest::Approx(0.0).scale(1.0 + v.squaredNorm()));
    CHECK(passivity_residual(b.center, v, e) <= 0.0);
  }
  CHECK(passivity_ball(Vec3::Zero(), e).radius_squared == 0.0);
}

TEST_CASE("port relation along a driven trajectory") {
  // dV/dt = v.u_a whatever force is applied
  ModelParams m;
  PassivityParams e;
  e.K = Vec3(2.0, 1.5, 3.0).asDiagonal();
  const Vec3 xi_d(1, 0, 1.2);
  SystemState s;
  s.xi = Vec3(0, 0.3, 1);
  s.gamma = Vec2(0.3, -0.2);
  s.xi_dot = Vec3(0.5, 0.0, -0.2);
  s.gamma_dot = Vec2(0.4, 0.1);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = k * 0.01;
    const Vec3 F(2.0 * std::sin(t), -1.0 * std::cos(2 * t), m.hover_thrust() + std::sin(3 * t));
    const double h = 1e-4;
    const double dV = (storage(rk4_step(s, F, h, m), xi_d, e, m) -
                       storage(rk4_step(s, F, -h, m), xi_d, e, m)) /
                      (2 * h);
    const Vec3 ua = shaped_from_force(F, s, xi_d, e, m);
    worst = std::max(worst, std::abs(dV - s.xi_dot.dot(ua)));
    for (int j = 0; j < 10; ++j) s = rk4_step(s, F, 1e-3, m);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("passivity parameter validation") {
  PassivityParams e;
  CHECK_NOTHROW(e.validate());
  PassivityParams bad = e;
  bad.rho = 0.0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("strictly positive"), ConfigError);
  bad = e;
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = e;
  bad.K(0, 1) = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = e;
  bad.K(2, 2) = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
