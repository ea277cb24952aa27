#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "crossflow/geometry.hpp"
#include "crossflow/rng.hpp"
#include "crossflow/vec2.hpp"

namespace crossflow {

struct PedModelParams {
  double desired_speed_mean = 1.34;  // m/s
  double desired_speed_sd = 0.26;
  double desired_speed_min = 0.6;  // truncation bounds of the speed draw
  double desired_speed_max = 2.2;
  double radius = 0.2;          // m
  double relaxation_time = 0.5;  // s
  double repulsion_strength = 3.0;  // m/s^2
  double repulsion_range = 0.3;     // m
  double boundary_strength = 5.0;   // m/s^2
  double boundary_range = 0.2;      // m
  double speed_cap_factor = 1.3;

  double interaction_cutoff() const { return 5.0 * repulsion_range; }
  double boundary_cutoff() const { return 5.0 * boundary_range; }
};

// approaching -> waiting (optional) -> crossing -> egressing; never reverts.
enum class PedPhase { approaching, waiting, crossing, egressing };

struct Pedestrian {
  std::int64_t id = 0;
  Vec2 pos;
  Vec2 vel;
  double desired_speed = 1.34;
  double radius = 0.2;
  double relaxation_time = 0.5;
  PedPhase phase = PedPhase::approaching;
  double entered_measured_at = -1.0;        // < 0: not yet
  std::array<bool, 2> committed{false, false};  // per conflict area

  double speed() const { return vel.norm(); }
};

// Unit vector toward the nearest point of the sink; (0, 1) by convention
// when already on it. In the default straight corridor this is always (0, 1).
inline Vec2 desired_direction(const Pedestrian& ped, const Rect& sink) {
  const Vec2 target = sink.clamp_point(ped.pos);
  return (target - ped.pos).normalized({0.0, 1.0});
}

// Relaxation toward target_speed * target_dir. target_speed is the desired
// speed, or 0 for a pedestrian holding at a curb.
inline Vec2 driving_force(const Pedestrian& ped, Vec2 target_dir, double target_speed) {
  return (target_dir * target_speed - ped.vel) * (1.0 / ped.relaxation_time);
}

namespace detail {
// Deterministic unit vector for coincident centers, antisymmetric in the id
// pair so action symmetry still holds.
inline Vec2 id_pair_direction(std::int64_t a, std::int64_t b) {
  const std::uint64_t lo = static_cast<std::uint64_t>(std::min(a, b));
  const std::uint64_t hi = static_cast<std::uint64_t>(std::max(a, b));
  std::uint64_t state = (lo << 32) ^ hi;
  const std::uint64_t h = splitmix64(state);
  const double angle =
      static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * 3.14159265358979323846;
  const Vec2 u{std::cos(angle), std::sin(angle)};
  return (a > b) ? u : -u;
}
}  // namespace detail

// Circular exponential repulsion from another pedestrian; zero beyond
// 5 * repulsion_range.
inline Vec2 repulsion_from_ped(const Pedestrian& ped, const Pedestrian& other,
                               const PedModelParams& p) {
  const Vec2 diff = ped.pos - other.pos;
  const double d = diff.norm();
  if (d > p.interaction_cutoff()) return {};
  const double r_sum = ped.radius + other.radius;
  const double magnitude =
      p.repulsion_strength * std::exp((r_sum - d) / p.repulsion_range);
  if (d == 0.0) {
    return detail::id_pair_direction(ped.id, other.id) * magnitude;
  }
  return diff * (magnitude / d);
}

// Repulsion from the corridor side walls, same exponential form; zero beyond
// 5 * boundary_range from a wall.
inline Vec2 repulsion_from_boundary(const Pedestrian& ped, double wall_x_min,
                                    double wall_x_max, const PedModelParams& p) {
  Vec2 f{};
  const double d_left = ped.pos.x - wall_x_min;
  if (d_left <= p.boundary_cutoff()) {
    f.x += p.boundary_strength * std::exp((ped.radius - d_left) / p.boundary_range);
  }
  const double d_right = wall_x_max - ped.pos.x;
  if (d_right <= p.boundary_cutoff()) {
    f.x -= p.boundary_strength * std::exp((ped.radius - d_right) / p.boundary_range);
  }
  return f;
}

// Semi-implicit Euler step with the speed cap applied to the new velocity.
inline void integrate_ped(Pedestrian& ped, Vec2 total_accel, double dt,
                          double speed_cap_factor) {
  ped.vel += total_accel * dt;
  const double cap = speed_cap_factor * ped.desired_speed;
  const double v = ped.vel.norm();
  if (v > cap) ped.vel *= cap / v;
  ped.pos += ped.vel * dt;
}

inline double draw_desired_speed(const PedModelParams& p, RandomStream& rng) {
  return rng.truncated_normal(p.desired_speed_mean, p.desired_speed_sd,
                              p.desired_speed_min, p.desired_speed_max);
}

}  // namespace crossflow
