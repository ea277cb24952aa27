#pragma once

#include <cstdint>
#include <vector>

#include "crossflow/geometry.hpp"
#include "crossflow/ped.hpp"
#include "crossflow/rng.hpp"

namespace crossflow {

// Input-side bookkeeping. demanded == inserted + skipped at all times.
struct InputAccounting {
  std::int64_t demanded = 0;
  std::int64_t inserted = 0;
  std::int64_t skipped = 0;
  static constexpr double kCapDensity = 5.0;  // pedestrians per m^2
};

// Poisson arrivals for one step.
inline int pedestrian_arrivals(double ped_demand_per_hour, double dt,
                               RandomStream& rng) {
  return rng.poisson(ped_demand_per_hour * dt / 3600.0);
}

struct InsertionResult {
  std::vector<Pedestrian> placed;
  int skipped = 0;
};

namespace detail {
inline int input_zone_occupancy(const Rect& zone,
                                const std::vector<Pedestrian>& peds,
                                const std::vector<Pedestrian>& placed) {
  int n = 0;
  for (const Pedestrian& p : peds) {
    if (zone.contains(p.pos)) ++n;
  }
  for (const Pedestrian& p : placed) {
    if (zone.contains(p.pos)) ++n;
  }
  return n;
}

inline double min_distance_to(const Vec2 pos, const std::vector<Pedestrian>& peds,
                              const std::vector<Pedestrian>& placed) {
  double best = 1e300;
  for (const Pedestrian& p : peds) {
    best = std::min(best, (p.pos - pos).norm());
  }
  for (const Pedestrian& p : placed) {
    best = std::min(best, (p.pos - pos).norm());
  }
  return best;
}
}  // namespace detail

// Inserts up to `count` pedestrians into the input zone. An arrival is
// skipped (dropped, not queued) when it would push the zone density above
// the cap. Placement samples uniform positions keeping at least one body
// diameter from everyone; after 50 attempts the least crowded sample wins.
inline InsertionResult try_insert(int count, const Rect& input_zone,
                                  const std::vector<Pedestrian>& current,
                                  const PedModelParams& params,
                                  RandomStream& placement,
                                  RandomStream& speed_stream,
                                  std::int64_t& next_id) {
  InsertionResult result;
  const double cap_count = InputAccounting::kCapDensity * input_zone.area();
  const double r = params.radius;
  const double x_lo = input_zone.x_min + r;
  const double x_hi = std::max(x_lo, input_zone.x_max - r);
  const double y_lo = input_zone.y_min + r;
  const double y_hi = std::max(y_lo, input_zone.y_max - r);

  for (int i = 0; i < count; ++i) {
    const int occupancy =
        detail::input_zone_occupancy(input_zone, current, result.placed);
    if (static_cast<double>(occupancy + 1) > cap_count + 1e-9) {
      ++result.skipped;
      continue;
    }
    Vec2 best_pos{};
    double best_dist = -1.0;
    for (int attempt = 0; attempt < 50; ++attempt) {
      const Vec2 candidate{placement.uniform(x_lo, x_hi),
                           placement.uniform(y_lo, y_hi)};
      const double dist = detail::min_distance_to(candidate, current, result.placed);
      if (dist > best_dist) {
        best_dist = dist;
        best_pos = candidate;
      }
      if (dist >= 2.0 * r) break;
    }
    Pedestrian ped;
    ped.id = next_id++;
    ped.pos = best_pos;
    ped.vel = {0.0, 0.0};
    ped.radius = r;
    ped.relaxation_time = params.relaxation_time;
    ped.desired_speed = draw_desired_speed(params, speed_stream);
    ped.phase = PedPhase::approaching;
    result.placed.push_back(ped);
  }
  return result;
}

}  // namespace crossflow
