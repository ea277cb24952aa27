#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crossflow/conflict.hpp"
#include "crossflow/geometry.hpp"
#include "crossflow/ped.hpp"
#include "crossflow/vehicle.hpp"

namespace crossflow {

// Full experiment description; everything a run needs.
struct ScenarioConfig {
  GeometryConfig geometry;
  double ped_demand = 0.0;  // pedestrians/hour
  double veh_demand = 0.0;  // vehicles/hour per lane (both lanes)
  double duration = 36000.0;  // s
  double dt = 0.1;            // s
  std::uint64_t seed = 1;
  PedModelParams ped_params;
  VehModelParams veh_params;
  ConflictParams conflict_params;
  double sampling_interval = 1.0;  // s
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double parse_number(const std::string& source, int line_no,
                           std::string_view key, std::string_view value) {
  const std::string tmp(value);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0') {
    throw ScenarioError(source + ":" + std::to_string(line_no) +
                        ": non-numeric value for '" + std::string(key) + "': '" +
                        tmp + "'");
  }
  return v;
}

inline bool assign_scenario_key(ScenarioConfig& cfg, std::string_view key,
                                double value) {
  auto& g = cfg.geometry;
  auto& p = cfg.ped_params;
  auto& v = cfg.veh_params;
  auto& c = cfg.conflict_params;
  if (key == "street_width") g.street_width = value;
  else if (key == "lane_width") g.lane_width = value;
  else if (key == "corridor_width") g.corridor_width = value;
  else if (key == "lane_stretch") g.lane_stretch = value;
  else if (key == "travel_distance") g.travel_distance = value;
  else if (key == "conflict_area_side") g.conflict_area_side = value;
  else if (key == "input_area_depth") g.input_area_depth = value;
  else if (key == "approach_zone_depth") g.approach_zone_depth = value;
  else if (key == "ped_demand") cfg.ped_demand = value;
  else if (key == "veh_demand") cfg.veh_demand = value;
  else if (key == "duration") cfg.duration = value;
  else if (key == "dt") cfg.dt = value;
  else if (key == "sampling_interval") cfg.sampling_interval = value;
  else if (key == "desired_speed_mean") p.desired_speed_mean = value;
  else if (key == "desired_speed_sd") p.desired_speed_sd = value;
  else if (key == "radius") p.radius = value;
  else if (key == "relaxation_time") p.relaxation_time = value;
  else if (key == "repulsion_strength") p.repulsion_strength = value;
  else if (key == "repulsion_range") p.repulsion_range = value;
  else if (key == "boundary_strength") p.boundary_strength = value;
  else if (key == "boundary_range") p.boundary_range = value;
  else if (key == "speed_cap_factor") p.speed_cap_factor = value;
  else if (key == "length") v.length = value;
  else if (key == "desired_speed") v.desired_speed = value;
  else if (key == "max_accel") v.max_accel = value;
  else if (key == "comfortable_decel") v.comfortable_decel = value;
  else if (key == "max_decel") v.max_decel = value;
  else if (key == "min_gap") v.min_gap = value;
  else if (key == "headway") v.headway = value;
  else if (key == "jam_speed_threshold") v.jam_speed_threshold = value;
  else if (key == "visibility") c.visibility = value;
  else if (key == "front_gap") c.front_gap = value;
  else if (key == "rear_gap") c.rear_gap = value;
  else if (key == "safety_factor") c.safety_factor = value;
  else return false;
  return true;
}

}  // namespace detail

// Lists every invariant violation; empty report means the config is usable.
inline std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> report;
  const auto add = [&report](const std::string& msg) { report.push_back(msg); };
  const auto& g = cfg.geometry;
  const auto& p = cfg.ped_params;
  const auto& v = cfg.veh_params;
  const auto& c = cfg.conflict_params;
  constexpr double kEps = 1e-9;

  const auto positive = [&](double value, const char* name) {
    if (!(value > 0.0)) add(std::string(name) + " must be strictly positive");
  };
  positive(g.street_width, "street_width");
  positive(g.lane_width, "lane_width");
  positive(g.corridor_width, "corridor_width");
  positive(g.lane_stretch, "lane_stretch");
  positive(g.travel_distance, "travel_distance");
  positive(g.conflict_area_side, "conflict_area_side");
  positive(g.input_area_depth, "input_area_depth");
  positive(g.approach_zone_depth, "approach_zone_depth");

  if (std::abs(g.street_width - 2.0 * g.lane_width) > kEps) {
    add("street_width must equal 2 * lane_width (two-lane street)");
  }
  if (std::abs(g.conflict_area_side - g.lane_width) > kEps ||
      std::abs(g.conflict_area_side - g.corridor_width) > kEps) {
    add("conflict_area_side, lane_width and corridor_width must be equal");
  }
  if (!(g.travel_distance > g.street_width)) {
    add("measured segment shorter than street (travel_distance must exceed street_width)");
  }

  if (!(cfg.dt > 0.0)) add("dt must be strictly positive");
  if (cfg.ped_demand < 0.0) add("ped_demand must be >= 0");
  if (cfg.veh_demand < 0.0) add("veh_demand must be >= 0");
  if (cfg.dt > 0.0) {
    const double steps = cfg.duration / cfg.dt;
    if (!(cfg.duration > 0.0) || std::abs(steps - std::round(steps)) > 1e-6) {
      add("duration must be a positive multiple of dt");
    }
    const double samples = cfg.sampling_interval / cfg.dt;
    if (!(cfg.sampling_interval > 0.0) ||
        std::abs(samples - std::round(samples)) > 1e-6) {
      add("sampling_interval must be a positive multiple of dt");
    }
  }
  if (cfg.dt > p.relaxation_time) {
    add("dt must not exceed relaxation_time");
  }

  positive(p.desired_speed_mean, "desired_speed_mean");
  positive(p.desired_speed_sd, "desired_speed_sd");
  positive(p.radius, "radius");
  positive(p.relaxation_time, "relaxation_time");
  positive(p.repulsion_strength, "repulsion_strength");
  positive(p.repulsion_range, "repulsion_range");
  positive(p.boundary_strength, "boundary_strength");
  positive(p.boundary_range, "boundary_range");
  positive(p.speed_cap_factor, "speed_cap_factor");
  if (!(p.desired_speed_sd < p.desired_speed_mean)) {
    add("desired_speed_sd must be smaller than desired_speed_mean");
  }

  positive(v.length, "length");
  positive(v.desired_speed, "desired_speed");
  positive(v.max_accel, "max_accel");
  positive(v.comfortable_decel, "comfortable_decel");
  positive(v.max_decel, "max_decel");
  positive(v.min_gap, "min_gap");
  positive(v.headway, "headway");
  positive(v.jam_speed_threshold, "jam_speed_threshold");
  if (v.max_decel < v.comfortable_decel) {
    add("max_decel must be >= comfortable_decel");
  }

  if (!(c.visibility > 0.0)) add("visibility must be strictly positive");
  if (c.front_gap < 0.0) add("front_gap must be >= 0");
  if (c.rear_gap < 0.0) add("rear_gap must be >= 0");
  if (c.safety_factor < 1.0) add("safety_factor must be >= 1");

  return report;
}

// Flat `key = value` text, one pair per line, '#' comments. Unknown keys and
// non-numeric values are errors; unset keys keep their defaults. The parsed
// config is validated before it is returned.
inline ScenarioConfig parse_scenario_text(const std::string& text,
                                          const std::string& source = "<string>") {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError(source + ":" + std::to_string(line_no) +
                          ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ScenarioError(source + ":" + std::to_string(line_no) + ": empty key");
    }
    if (key == "seed") {
      const std::string tmp(value);
      char* end = nullptr;
      const unsigned long long parsed = std::strtoull(tmp.c_str(), &end, 10);
      if (end == tmp.c_str() || *end != '\0') {
        throw ScenarioError(source + ":" + std::to_string(line_no) +
                            ": non-numeric value for 'seed': '" + tmp + "'");
      }
      cfg.seed = parsed;
    } else if (key == "safety_factor_mode") {
      if (value == "clear_time") {
        cfg.conflict_params.safety_factor_mode = SafetyFactorMode::clear_time;
      } else if (value == "rear_gap") {
        cfg.conflict_params.safety_factor_mode = SafetyFactorMode::rear_gap;
      } else if (value == "both") {
        cfg.conflict_params.safety_factor_mode = SafetyFactorMode::both;
      } else {
        throw ScenarioError(source + ":" + std::to_string(line_no) +
                            ": safety_factor_mode must be clear_time, rear_gap or both");
      }
    } else {
      const double number = detail::parse_number(source, line_no, key, value);
      if (!detail::assign_scenario_key(cfg, key, number)) {
        throw ScenarioError(source + ":" + std::to_string(line_no) +
                            ": unknown key '" + std::string(key) + "'");
      }
    }
  }
  if (const auto report = validate_scenario(cfg); !report.empty()) {
    std::string msg = source + ": invalid scenario:";
    for (const auto& violation : report) msg += "\n  - " + violation;
    throw ScenarioError(msg);
  }
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

inline Geometry build_geometry(const ScenarioConfig& cfg) {
  return build_geometry(cfg.geometry);
}

}  // namespace crossflow
