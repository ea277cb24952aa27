#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crossflow/geometry.hpp"
#include "crossflow/ped.hpp"
#include "crossflow/vehicle.hpp"

namespace crossflow {

// Where the safety distance factor applies when a pedestrian sizes up an
// approaching vehicle. The required window before the next arrival is
//   clear_time: safety_factor * t_clear + rear_gap      (default)
//   rear_gap:   t_clear + safety_factor * rear_gap
//   both:       safety_factor * (t_clear + rear_gap)
enum class SafetyFactorMode { clear_time, rear_gap, both };

struct ConflictParams {
  double visibility = 100.0;  // m, how far upstream vehicles are considered
  double front_gap = 0.5;     // s, vehicle-side margin behind a clearing ped
  double rear_gap = 0.5;      // s, required time between ped exit and vehicle entry
  double safety_factor = 1.5;
  SafetyFactorMode safety_factor_mode = SafetyFactorMode::clear_time;
  // Priority is fixed: vehicles have right of way; pedestrians search gaps.
};

// Per-lane conflict square (lane x corridor overlap) with its per-step state.
struct ConflictAreaState {
  int lane = 0;
  Rect rect;
  std::vector<std::int64_t> occupants;  // ped ids, center-in-rect, sorted
  bool must_yield = false;
};

// Occupants are exactly the pedestrians whose disc center lies inside the
// (closed) rectangle.
inline void update_occupancy(ConflictAreaState& area,
                             std::span<const Pedestrian> peds) {
  area.occupants.clear();
  for (const Pedestrian& p : peds) {
    if (area.rect.contains(p.pos)) area.occupants.push_back(p.id);
  }
  std::sort(area.occupants.begin(), area.occupants.end());
}

// Time until the nearest visible upstream vehicle reaches the area's
// upstream edge; nullopt when no vehicle is within visibility. A speed floor
// of 0.1 m/s keeps stopped vehicles non-threatening instead of dividing by
// zero.
inline std::optional<double> next_vehicle_arrival(const LaneState& lane,
                                                  double visibility) {
  constexpr double kSpeedFloor = 0.1;
  // Sorted downstream-first: the first vehicle at or before the edge is the
  // nearest upstream one.
  for (const Vehicle& v : lane.vehicles) {
    if (v.s > lane.conflict_s_begin) continue;
    const double dist = lane.conflict_s_begin - v.s;
    if (dist > visibility) return std::nullopt;
    return dist / std::max(v.speed, kSpeedFloor);
  }
  return std::nullopt;
}

// Estimated time for a pedestrian to fully clear the area (body fully past
// the far edge) from its current position. From the hold line at the near
// edge this is (side + 2 * radius) / desired_speed; pedestrians below half
// their desired speed get a relaxation-time penalty for the standing start.
inline double crossing_clear_time(const Pedestrian& ped, const Rect& area,
                                  const PedModelParams& params) {
  const double remaining = std::max(0.0, (area.y_max - ped.pos.y) + ped.radius);
  double t = remaining / ped.desired_speed;
  if (ped.speed() < 0.5 * ped.desired_speed) t += params.relaxation_time;
  return t;
}

inline double required_entry_window(double t_clear, const ConflictParams& c) {
  switch (c.safety_factor_mode) {
    case SafetyFactorMode::clear_time:
      return c.safety_factor * t_clear + c.rear_gap;
    case SafetyFactorMode::rear_gap:
      return t_clear + c.safety_factor * c.rear_gap;
    case SafetyFactorMode::both:
      return c.safety_factor * (t_clear + c.rear_gap);
  }
  return c.safety_factor * t_clear + c.rear_gap;
}

// Gap acceptance against the next arriving vehicle on this lane. True means
// enter; a pedestrian that is rejected waits at the near edge and re-decides
// every step. Monotone in the arrival time and antitone in the safety factor.
inline bool gap_accept(const Pedestrian& ped, const Rect& area,
                       const LaneState& lane, const ConflictParams& cparams,
                       const PedModelParams& pparams) {
  const std::optional<double> arrival = next_vehicle_arrival(lane, cparams.visibility);
  if (!arrival) return true;
  const double t_clear = crossing_clear_time(ped, area, pparams);
  return *arrival >= required_entry_window(t_clear, cparams);
}

// A pedestrian arriving behind occupants may pass them only if it is
// meaningfully faster than all of them and a lateral corridor wide enough
// for its body exists beside them. Otherwise it follows the platoon.
inline bool overtake_feasible(const Pedestrian& ped, const Rect& area,
                              const std::vector<const Pedestrian*>& occupants) {
  if (occupants.empty()) return false;
  constexpr double kSpeedMargin = 0.1;   // m/s
  constexpr double kWidthMargin = 0.1;   // m

  double fastest = 0.0;
  for (const Pedestrian* occ : occupants) {
    fastest = std::max(fastest, occ->speed());
  }
  if (ped.desired_speed < fastest + kSpeedMargin) return false;

  // Free lateral gaps between occupant bodies (and the area sides).
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(occupants.size());
  for (const Pedestrian* occ : occupants) {
    const double lo = std::max(area.x_min, occ->pos.x - occ->radius);
    const double hi = std::min(area.x_max, occ->pos.x + occ->radius);
    if (hi > lo) intervals.emplace_back(lo, hi);
  }
  std::sort(intervals.begin(), intervals.end());
  double cursor = area.x_min;
  double widest = 0.0;
  for (const auto& [lo, hi] : intervals) {
    widest = std::max(widest, lo - cursor);
    cursor = std::max(cursor, hi);
  }
  widest = std::max(widest, area.x_max - cursor);
  return widest >= 2.0 * ped.radius + kWidthMargin;
}

// The flag that overrides vehicle priority: vehicles approaching this area
// get a stationary virtual leader while it is set. True iff the area is
// occupied, or some pedestrian committed to this area cannot clear it at
// least front_gap before the nearest visible vehicle arrives.
inline bool compute_must_yield(const ConflictAreaState& area, int area_index,
                               const LaneState& lane,
                               std::span<const Pedestrian> peds,
                               const ConflictParams& cparams,
                               const PedModelParams& pparams) {
  if (!area.occupants.empty()) return true;
  const std::optional<double> arrival = next_vehicle_arrival(lane, cparams.visibility);
  if (!arrival) return false;
  for (const Pedestrian& p : peds) {
    if (p.phase != PedPhase::crossing) continue;
    if (!p.committed[static_cast<std::size_t>(area_index)]) continue;
    if (p.pos.y - p.radius > area.rect.y_max) continue;  // already cleared
    if (crossing_clear_time(p, area.rect, pparams) > *arrival - cparams.front_gap) {
      return true;
    }
  }
  return false;
}

}  // namespace crossflow
