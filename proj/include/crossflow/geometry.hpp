#pragma once

#include <array>
#include <vector>

#include "crossflow/vec2.hpp"

namespace crossflow {

// Closed axis-aligned rectangle; points on the boundary count as inside.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  // Closest point of the rectangle to p (p itself when inside).
  Vec2 clamp_point(Vec2 p) const {
    Vec2 q = p;
    if (q.x < x_min) q.x = x_min;
    if (q.x > x_max) q.x = x_max;
    if (q.y < y_min) q.y = y_min;
    if (q.y > y_max) q.y = y_max;
    return q;
  }
};

enum class ZoneKind { input, approach, measured, conflict, sink };

struct Zone {
  ZoneKind kind;
  Rect rect;
  int lane = -1;  // set for conflict zones
};

// World layout: street runs along x, pedestrians walk along +y.
// Along y, the corridor is: input, approach, measured (containing the
// street, centered), sink. The two lanes cross the corridor inside the
// measured zone; each lane's overlap with the corridor is a conflict area.
struct GeometryConfig {
  double street_width = 7.0;
  double lane_width = 3.5;
  double corridor_width = 3.5;
  double lane_stretch = 500.0;      // drivable length on each side of the corridor
  double travel_distance = 26.0;    // measured-zone extent along y
  double conflict_area_side = 3.5;
  double input_area_depth = 2.0;
  double approach_zone_depth = 6.0;
};

inline constexpr double kSinkDepth = 2.0;  // only the near boundary matters

struct LaneGeom {
  int id = 0;
  double y_min = 0.0;
  double y_max = 0.0;
  int direction = 1;  // +1 travels along +x, -1 along -x
  double length = 0.0;
  double conflict_s_begin = 0.0;  // lane coordinate of the corridor overlap
  double conflict_s_end = 0.0;
  double stretch = 0.0;
  double corridor_x_min = 0.0;
  double corridor_x_max = 0.0;

  // Lane coordinate (s = 0 at the upstream end) to world position of the
  // lane centerline; used by the trajectory dump.
  Vec2 world_position(double s) const {
    const double x = direction > 0 ? corridor_x_min + (s - stretch)
                                   : corridor_x_max + stretch - s;
    return {x, 0.5 * (y_min + y_max)};
  }
};

struct Geometry {
  Rect input;
  Rect approach;
  Rect measured;
  Rect sink;
  std::array<Rect, 2> conflict{};  // indexed by lane id
  std::array<LaneGeom, 2> lanes{};
  double corridor_x_min = 0.0;
  double corridor_x_max = 0.0;
  double street_y_min = 0.0;
  double street_y_max = 0.0;
  double travel_distance = 0.0;

  std::vector<Zone> zones() const {
    return {{ZoneKind::input, input},
            {ZoneKind::approach, approach},
            {ZoneKind::measured, measured},
            {ZoneKind::conflict, conflict[0], 0},
            {ZoneKind::conflict, conflict[1], 1},
            {ZoneKind::sink, sink}};
  }
};

// Pure function of the config: identical configs yield identical geometry.
inline Geometry build_geometry(const GeometryConfig& cfg) {
  Geometry g;
  g.corridor_x_min = 0.0;
  g.corridor_x_max = cfg.corridor_width;
  g.travel_distance = cfg.travel_distance;

  const double y_input = 0.0;
  const double y_approach = y_input + cfg.input_area_depth;
  const double y_measured = y_approach + cfg.approach_zone_depth;
  const double y_sink = y_measured + cfg.travel_distance;
  // Street centered in the measured zone.
  g.street_y_min = y_measured + 0.5 * (cfg.travel_distance - cfg.street_width);
  g.street_y_max = g.street_y_min + cfg.street_width;

  g.input = {0.0, cfg.corridor_width, y_input, y_approach};
  g.approach = {0.0, cfg.corridor_width, y_approach, y_measured};
  g.measured = {0.0, cfg.corridor_width, y_measured, y_sink};
  g.sink = {0.0, cfg.corridor_width, y_sink, y_sink + kSinkDepth};

  for (int k = 0; k < 2; ++k) {
    const double lane_y_min = g.street_y_min + k * cfg.lane_width;
    g.conflict[k] = {0.0, cfg.corridor_width, lane_y_min, lane_y_min + cfg.lane_width};

    LaneGeom lane;
    lane.id = k;
    lane.y_min = lane_y_min;
    lane.y_max = lane_y_min + cfg.lane_width;
    lane.direction = (k == 0) ? 1 : -1;  // opposite travel directions
    lane.stretch = cfg.lane_stretch;
    lane.length = 2.0 * cfg.lane_stretch + cfg.corridor_width;
    lane.conflict_s_begin = cfg.lane_stretch;
    lane.conflict_s_end = cfg.lane_stretch + cfg.corridor_width;
    lane.corridor_x_min = g.corridor_x_min;
    lane.corridor_x_max = g.corridor_x_max;
    g.lanes[k] = lane;
  }
  return g;
}

}  // namespace crossflow
