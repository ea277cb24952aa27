#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "crossflow/rng.hpp"

namespace crossflow {

struct VehModelParams {
  double length = 4.5;            // m
  double desired_speed = 13.89;   // m/s (~50 km/h)
  double max_accel = 1.5;         // m/s^2
  double comfortable_decel = 2.0;  // m/s^2
  double max_decel = 7.0;          // m/s^2, emergency bound
  double min_gap = 2.0;            // m
  double headway = 1.2;            // s
  double jam_speed_threshold = 1.39;  // m/s (~5 km/h)
};

struct Vehicle {
  std::int64_t id = 0;
  int lane = 0;
  double s = 0.0;      // front bumper, lane coordinate (0 = upstream end)
  double speed = 0.0;  // m/s, never negative
  double length = 4.5;

  double rear() const { return s - length; }
};

// Longitudinal state of one lane. `vehicles` is kept sorted by s descending
// (index 0 = most downstream); there is no overtaking, so order is stable.
struct LaneState {
  int id = 0;
  double length = 0.0;
  double conflict_s_begin = 0.0;
  double conflict_s_end = 0.0;
  std::vector<Vehicle> vehicles;
  std::int64_t demanded = 0;  // Bernoulli successes drawn
  std::int64_t inserted = 0;
  std::int64_t entry_queue = 0;  // arrivals waiting for a free entry
};

inline constexpr double kFreeRoadGap = std::numeric_limits<double>::infinity();

// IDM acceleration, clamped to [-max_decel, max_accel]. gap = +infinity
// encodes a free road; gap <= 0 (should not occur) falls back to full braking.
inline double car_following_accel(double v, double gap, double leader_speed,
                                  const VehModelParams& p) {
  if (gap <= 0.0) return -p.max_decel;
  const double dv = v - leader_speed;
  const double s_star =
      p.min_gap + v * p.headway +
      v * dv / (2.0 * std::sqrt(p.max_accel * p.comfortable_decel));
  const double ratio = s_star / gap;  // 0 on a free road
  const double v_ratio = v / p.desired_speed;
  const double a =
      p.max_accel * (1.0 - v_ratio * v_ratio * v_ratio * v_ratio - ratio * ratio);
  return std::clamp(a, -p.max_decel, p.max_accel);
}

// Stationary virtual leader parked min_gap before the conflict area, handed
// to vehicles that have to yield; none once the front bumper has reached
// the area.
inline std::optional<std::pair<double, double>> virtual_leader(
    const Vehicle& veh, bool must_yield, double area_upstream_s, double min_gap) {
  if (!must_yield) return std::nullopt;
  if (veh.s >= area_upstream_s) return std::nullopt;
  return std::make_pair((area_upstream_s - min_gap) - veh.s, 0.0);
}

inline void integrate_vehicle(Vehicle& veh, double accel, double dt) {
  veh.speed = std::max(0.0, veh.speed + accel * dt);
  veh.s += veh.speed * dt;
}

namespace detail {
inline bool entry_blocked(const LaneState& lane, const VehModelParams& p) {
  if (lane.vehicles.empty()) return false;
  return lane.vehicles.back().rear() < p.min_gap;
}
}  // namespace detail

// Bernoulli arrival per step; blocked arrivals stay queued so vehicle demand
// is never dropped. At most one vehicle can physically enter per step.
// Returns the id of the inserted vehicle, if any.
inline std::optional<std::int64_t> spawn_vehicle(LaneState& lane,
                                                 double veh_demand_per_hour,
                                                 double dt,
                                                 const VehModelParams& p,
                                                 RandomStream& rng,
                                                 std::int64_t& next_id) {
  const double prob = std::min(1.0, veh_demand_per_hour * dt / 3600.0);
  if (rng.bernoulli(prob)) {
    ++lane.demanded;
    ++lane.entry_queue;
  }
  if (lane.entry_queue == 0 || detail::entry_blocked(lane, p)) return std::nullopt;

  Vehicle veh;
  veh.id = next_id++;
  veh.lane = lane.id;
  veh.s = 0.0;
  veh.length = p.length;
  if (lane.vehicles.empty()) {
    veh.speed = p.desired_speed;
  } else {
    const double gap = lane.vehicles.back().rear();
    veh.speed = std::min(p.desired_speed, std::max(0.0, (gap - p.min_gap) / p.headway));
  }
  lane.vehicles.push_back(veh);
  --lane.entry_queue;
  ++lane.inserted;
  return veh.id;
}

}  // namespace crossflow
