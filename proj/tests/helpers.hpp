#pragma once

#include <string>

#include "crossflow/scenario.hpp"

namespace testutil {

// Default scenario with a short horizon; tests override what they need.
inline crossflow::ScenarioConfig base_config(double ped_demand = 0.0,
                                             double veh_demand = 0.0,
                                             double duration = 3600.0,
                                             std::uint64_t seed = 42) {
  crossflow::ScenarioConfig cfg;
  cfg.ped_demand = ped_demand;
  cfg.veh_demand = veh_demand;
  cfg.duration = duration;
  cfg.seed = seed;
  return cfg;
}

}  // namespace testutil
