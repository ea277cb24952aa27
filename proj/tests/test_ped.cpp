#include <catch2/catch_amalgamated.hpp>

#include "crossflow/ped.hpp"
#include "crossflow/rng.hpp"

using namespace crossflow;

namespace {
Pedestrian make_ped(std::int64_t id, Vec2 pos, Vec2 vel = {}, double v0 = 1.4) {
  Pedestrian p;
  p.id = id;
  p.pos = pos;
  p.vel = vel;
  p.desired_speed = v0;
  return p;
}
}  // namespace

TEST_CASE("desired_direction points at the sink") {
  const Rect sink{0.0, 3.5, 34.0, 36.0};
  SECTION("straight corridor: always (0, 1)") {
    CHECK(desired_direction(make_ped(1, {0.3, 1.0}), sink) == Vec2{0.0, 1.0});
    CHECK(desired_direction(make_ped(1, {3.2, 30.0}), sink) == Vec2{0.0, 1.0});
  }
  SECTION("on the sink boundary: (0, 1) by convention") {
    CHECK(desired_direction(make_ped(1, {1.75, 34.0}), sink) == Vec2{0.0, 1.0});
  }
  SECTION("narrowed sink: normalized vector toward the corner") {
    const Rect narrow{1.5, 2.0, 34.0, 36.0};
    const Vec2 dir = desired_direction(make_ped(1, {0.5, 33.0}), narrow);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(dir.x == Catch::Approx(inv_sqrt2));
    CHECK(dir.y == Catch::Approx(inv_sqrt2));
  }
}

TEST_CASE("driving force relaxes toward the target velocity") {
  SECTION("equilibrium: zero force") {
    auto ped = make_ped(1, {0, 0}, {0.0, 1.4});
    ped.relaxation_time = 0.5;
    const Vec2 f = driving_force(ped, {0.0, 1.0}, 1.4);
    CHECK(f.x == Catch::Approx(0.0).margin(1e-12));
    CHECK(f.y == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("standing start") {
    auto ped = make_ped(1, {0, 0});
    ped.relaxation_time = 0.5;
    const Vec2 f = driving_force(ped, {0.0, 1.0}, 1.4);
    CHECK(f.y == Catch::Approx(2.8));
  }
  SECTION("holding at the curb brakes") {
    auto ped = make_ped(1, {0, 0}, {0.0, 0.5});
    ped.relaxation_time = 0.5;
    const Vec2 f = driving_force(ped, {0.0, 1.0}, 0.0);
    CHECK(f.y == Catch::Approx(-1.0));
  }
}

TEST_CASE("pedestrian repulsion") {
  PedModelParams params;  // A = 3, B = 0.3, r = 0.2

  SECTION("zero beyond the cutoff") {
    const auto f = repulsion_from_ped(make_ped(1, {0, 0}), make_ped(2, {0, 10}), params);
    CHECK(f == Vec2{0.0, 0.0});
  }
  SECTION("contact: magnitude exactly A") {
    const auto f = repulsion_from_ped(make_ped(1, {0, 0}), make_ped(2, {0.4, 0}), params);
    CHECK(f.norm() == Catch::Approx(3.0));
    CHECK(f.x < 0.0);  // pushed away from the other
  }
  SECTION("mirror symmetry about the y axis") {
    const auto ped_l = make_ped(1, {-0.3, 0.0});
    const auto ped_r = make_ped(2, {0.3, 0.0});
    const auto f_l = repulsion_from_ped(ped_l, ped_r, params);
    const auto f_r = repulsion_from_ped(ped_r, ped_l, params);
    CHECK(f_l.x == Catch::Approx(-f_r.x));
    CHECK(f_l.y == Catch::Approx(f_r.y));
  }
  SECTION("action symmetry for equal radii (sampled)") {
    RandomStream rng(99);
    for (int i = 0; i < 200; ++i) {
      const auto a = make_ped(10 + i, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
      const auto b = make_ped(500 + i, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
      const Vec2 fab = repulsion_from_ped(a, b, params);
      const Vec2 fba = repulsion_from_ped(b, a, params);
      CHECK(fab.x == Catch::Approx(-fba.x).margin(1e-12));
      CHECK(fab.y == Catch::Approx(-fba.y).margin(1e-12));
    }
  }
  SECTION("coincident centers: deterministic, antisymmetric, finite") {
    const auto a = make_ped(3, {1.0, 1.0});
    const auto b = make_ped(7, {1.0, 1.0});
    const Vec2 f1 = repulsion_from_ped(a, b, params);
    const Vec2 f2 = repulsion_from_ped(a, b, params);
    CHECK(f1 == f2);
    const Vec2 g = repulsion_from_ped(b, a, params);
    CHECK(f1.x == Catch::Approx(-g.x));
    CHECK(f1.y == Catch::Approx(-g.y));
    CHECK(f1.norm() == Catch::Approx(3.0 * std::exp(0.4 / 0.3)));
  }
}

TEST_CASE("boundary repulsion") {
  PedModelParams params;  // strength 5, range 0.2 -> cutoff 1.0

  SECTION("corridor center: exactly zero") {
    const auto f = repulsion_from_boundary(make_ped(1, {1.75, 5.0}), 0.0, 3.5, params);
    CHECK(f == Vec2{0.0, 0.0});
  }
  SECTION("touching the left wall: +x with magnitude boundary_strength") {
    const auto f = repulsion_from_boundary(make_ped(1, {0.2, 5.0}), 0.0, 3.5, params);
    CHECK(f.x == Catch::Approx(5.0));
    CHECK(f.y == 0.0);
  }
  SECTION("mirrored positions give mirrored forces") {
    const auto f_l = repulsion_from_boundary(make_ped(1, {0.5, 5.0}), 0.0, 3.5, params);
    const auto f_r = repulsion_from_boundary(make_ped(1, {3.0, 5.0}), 0.0, 3.5, params);
    CHECK(f_l.x == Catch::Approx(-f_r.x));
  }
}

TEST_CASE("pedestrian integration") {
  SECTION("uniform motion") {
    auto ped = make_ped(1, {0, 0}, {0.0, 1.4});
    integrate_ped(ped, {0, 0}, 0.1, 1.3);
    CHECK(ped.pos.y == Catch::Approx(0.14));
    CHECK(ped.vel.y == Catch::Approx(1.4));
  }
  SECTION("one Euler step from rest") {
    auto ped = make_ped(1, {0, 0});
    integrate_ped(ped, {0.0, 2.8}, 0.1, 1.3);
    CHECK(ped.vel.y == Catch::Approx(0.28));
    CHECK(ped.pos.y == Catch::Approx(0.028));
  }
  SECTION("speed cap binds exactly at 1.3 x desired") {
    auto ped = make_ped(1, {0, 0}, {}, 1.4);
    integrate_ped(ped, {0.0, 1000.0}, 0.1, 1.3);
    CHECK(ped.vel.norm() == Catch::Approx(1.82).epsilon(1e-12));
  }
  SECTION("cap holds under arbitrary accelerations") {
    RandomStream rng(5);
    auto ped = make_ped(1, {0, 0}, {}, 1.1);
    for (int i = 0; i < 500; ++i) {
      const Vec2 accel{rng.uniform(-50, 50), rng.uniform(-50, 50)};
      integrate_ped(ped, accel, 0.1, 1.3);
      CHECK(ped.vel.norm() <= 1.3 * ped.desired_speed + 1e-12);
    }
  }
}

TEST_CASE("free-flow relaxation approaches the desired speed") {
  auto ped = make_ped(1, {0, 0}, {}, 1.34);
  ped.relaxation_time = 0.5;
  const double dt = 0.1;
  const double tau = ped.relaxation_time;
  for (int n = 1; n <= 25; ++n) {  // 5 tau
    const Vec2 f = driving_force(ped, {0.0, 1.0}, ped.desired_speed);
    integrate_ped(ped, f, dt, 1.3);
    // closed form of the continuous relaxation, Euler error is O(dt)
    const double expected = ped.desired_speed * (1.0 - std::exp(-n * dt / tau));
    CHECK(ped.vel.y == Catch::Approx(expected).margin(0.02));
  }
  CHECK(ped.vel.y >= 0.99 * ped.desired_speed);
}

TEST_CASE("desired speed draw respects the truncation bounds") {
  PedModelParams params;
  RandomStream rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double v = draw_desired_speed(params, rng);
    CHECK(v >= params.desired_speed_min);
    CHECK(v <= params.desired_speed_max);
  }
}
