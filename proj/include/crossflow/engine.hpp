#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossflow/conflict.hpp"
#include "crossflow/demand.hpp"
#include "crossflow/geometry.hpp"
#include "crossflow/grid.hpp"
#include "crossflow/metrics.hpp"
#include "crossflow/ped.hpp"
#include "crossflow/rng.hpp"
#include "crossflow/scenario.hpp"
#include "crossflow/vehicle.hpp"

namespace crossflow {

// Internal-consistency violation (vehicle overlap, broken ordering, ...).
// Aborts the run with a diagnostic message.
class EngineAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimCounters {
  InputAccounting ped_input;
  std::int64_t arrived = 0;
  std::int64_t collision_events = 0;
  std::int64_t conservation_violations = 0;
};

struct RunResult {
  RunSummary summary;
  std::vector<TravelTimeRecord> travel_times;
  std::vector<JamSample> samples;
};

// Fixed-timestep orchestrator. Per step: demand, conflict-area occupancy,
// must-yield flags, pedestrian decisions, force evaluation on the frozen
// snapshot, one synchronized integration commit, then zone transitions and
// sampling. All stochastic input comes from four independent streams derived
// from the master seed, so runs are bitwise reproducible.
class Engine {
 public:
  // A pedestrian decides about the next conflict area (and, if rejected,
  // brakes toward its hold line) once it is this close to the area edge.
  static constexpr double kDecisionWindow = 2.0;  // m

  explicit Engine(const ScenarioConfig& cfg)
      : cfg_(validated(cfg)),
        geom_(build_geometry(cfg_.geometry)),
        streams_(cfg_.seed),
        grid_({geom_.corridor_x_min - 2.0, geom_.corridor_x_max + 2.0, -5.0,
               geom_.sink.y_max + 5.0},
              cfg_.ped_params.interaction_cutoff()) {
    for (int k = 0; k < 2; ++k) {
      lanes_[k].id = k;
      lanes_[k].length = geom_.lanes[k].length;
      lanes_[k].conflict_s_begin = geom_.lanes[k].conflict_s_begin;
      lanes_[k].conflict_s_end = geom_.lanes[k].conflict_s_end;
      areas_[k].lane = k;
      areas_[k].rect = geom_.conflict[k];
    }
    steps_per_sample_ =
        static_cast<std::int64_t>(std::llround(cfg_.sampling_interval / cfg_.dt));
    total_steps_ = static_cast<std::int64_t>(std::llround(cfg_.duration / cfg_.dt));
  }

  void step() {
    maybe_shuffle_storage();
    do_demand();
    do_occupancy();
    do_must_yield();
    do_decisions();
    do_forces();
    do_commit();
    ++steps_;
    const double now = time();
    do_collision_check();
    do_transitions(now);
    if (steps_per_sample_ > 0 && steps_ % steps_per_sample_ == 0) do_sample(now);
    if (trajectory_sink_ != nullptr) dump_trajectories(now);
  }

  RunResult run() {
    if (trajectory_sink_ != nullptr) {
      (*trajectory_sink_) << "t_s,agent_kind,id,x,y,speed\n";
    }
    while (steps_ < total_steps_) step();
    RunResult result;
    result.summary = metrics_.summarize();
    result.summary.demanded = counters_.ped_input.demanded;
    result.summary.inserted = counters_.ped_input.inserted;
    result.summary.skipped = counters_.ped_input.skipped;
    result.summary.collision_events = counters_.collision_events;
    result.summary.conservation_violations = counters_.conservation_violations;
    result.summary.ped_demand = cfg_.ped_demand;
    result.summary.veh_demand = cfg_.veh_demand;
    result.summary.duration = cfg_.duration;
    result.summary.dt = cfg_.dt;
    result.summary.seed = cfg_.seed;
    result.travel_times = metrics_.records();
    result.samples = metrics_.samples();
    return result;
  }

  double time() const { return static_cast<double>(steps_) * cfg_.dt; }
  std::int64_t steps() const { return steps_; }
  const ScenarioConfig& config() const { return cfg_; }
  const Geometry& geometry() const { return geom_; }
  const std::vector<Pedestrian>& pedestrians() const { return peds_; }
  const std::array<LaneState, 2>& lanes() const { return lanes_; }
  const std::array<ConflictAreaState, 2>& areas() const { return areas_; }
  const SimCounters& counters() const { return counters_; }
  const MetricsCollector& metrics() const { return metrics_; }

  // Test hooks. Injected agents are booked as demanded + inserted so the
  // conservation checks keep holding.
  Pedestrian& inject_pedestrian(Vec2 pos, Vec2 vel, double desired_speed,
                                PedPhase phase = PedPhase::approaching) {
    Pedestrian ped;
    ped.id = next_ped_id_++;
    ped.pos = pos;
    ped.vel = vel;
    ped.desired_speed = desired_speed;
    ped.radius = cfg_.ped_params.radius;
    ped.relaxation_time = cfg_.ped_params.relaxation_time;
    ped.phase = phase;
    peds_.push_back(ped);
    ++counters_.ped_input.demanded;
    ++counters_.ped_input.inserted;
    return peds_.back();
  }

  Vehicle& inject_vehicle(int lane_id, double s, double speed) {
    LaneState& lane = lanes_[static_cast<std::size_t>(lane_id)];
    Vehicle veh;
    veh.id = next_veh_id_++;
    veh.lane = lane_id;
    veh.s = s;
    veh.speed = speed;
    veh.length = cfg_.veh_params.length;
    auto it = lane.vehicles.begin();
    while (it != lane.vehicles.end() && it->s > s) ++it;
    ++lane.demanded;
    ++lane.inserted;
    return *lane.vehicles.insert(it, veh);
  }

  // Debug hook for the snapshot-discipline test: permutes pedestrian storage
  // order every step. Results must not change.
  void enable_storage_shuffle(std::uint64_t seed) {
    shuffle_state_ = seed;
    shuffle_enabled_ = true;
  }

  void set_trajectory_sink(std::ostream* sink) { trajectory_sink_ = sink; }

 private:
  static ScenarioConfig validated(const ScenarioConfig& cfg) {
    if (const auto report = validate_scenario(cfg); !report.empty()) {
      std::string msg = "invalid scenario:";
      for (const auto& v : report) msg += "\n  - " + v;
      throw std::invalid_argument(msg);
    }
    return cfg;
  }

  int next_uncommitted_area(const Pedestrian& ped) const {
    if (!ped.committed[0]) return 0;
    if (!ped.committed[1]) return 1;
    return -1;
  }

  double hold_line(int area_index, double radius) const {
    return areas_[static_cast<std::size_t>(area_index)].rect.y_min - radius;
  }

  void maybe_shuffle_storage() {
    if (!shuffle_enabled_ || peds_.size() < 2) return;
    for (std::size_t i = peds_.size() - 1; i > 0; --i) {
      const std::uint64_t r = splitmix64(shuffle_state_);
      std::swap(peds_[i], peds_[r % (i + 1)]);
    }
  }

  void do_demand() {
    const int arrivals =
        pedestrian_arrivals(cfg_.ped_demand, cfg_.dt, streams_.ped_demand);
    counters_.ped_input.demanded += arrivals;
    if (arrivals > 0) {
      InsertionResult ins =
          try_insert(arrivals, geom_.input, peds_, cfg_.ped_params,
                     streams_.placement, streams_.desired_speed, next_ped_id_);
      counters_.ped_input.inserted += static_cast<std::int64_t>(ins.placed.size());
      counters_.ped_input.skipped += ins.skipped;
      for (auto& ped : ins.placed) peds_.push_back(ped);
    }
    for (LaneState& lane : lanes_) {
      spawn_vehicle(lane, cfg_.veh_demand, cfg_.dt, cfg_.veh_params,
                    streams_.veh_demand, next_veh_id_);
    }
  }

  void do_occupancy() {
    for (int k = 0; k < 2; ++k) {
      update_occupancy(areas_[k], peds_);
      occupant_ptrs_[k].clear();
      for (const std::int64_t id : areas_[k].occupants) {
        for (const Pedestrian& p : peds_) {
          if (p.id == id) {
            occupant_ptrs_[k].push_back(&p);
            break;
          }
        }
      }
    }
  }

  void do_must_yield() {
    for (int k = 0; k < 2; ++k) {
      const bool prev = areas_[k].must_yield;
      const bool now = compute_must_yield(areas_[k], k, lanes_[k], peds_,
                                          cfg_.conflict_params, cfg_.ped_params);
      if (now && !prev) {
        arm_collision_monitor(k);
      } else if (!now) {
        armed_vehicle_[k].reset();
      }
      areas_[k].must_yield = now;
      vehicle_on_area_[k] = false;
      for (const Vehicle& v : lanes_[k].vehicles) {
        if (v.s > lanes_[k].conflict_s_begin && v.rear() < lanes_[k].conflict_s_end) {
          vehicle_on_area_[k] = true;
          break;
        }
        if (v.s <= lanes_[k].conflict_s_begin) break;  // sorted: rest is upstream
      }
    }
  }

  // The no-collision guarantee is only owed by vehicles that still had room
  // to brake when the flag rose; those get tracked until the episode ends.
  void arm_collision_monitor(int k) {
    armed_vehicle_[k].reset();
    const LaneState& lane = lanes_[k];
    for (const Vehicle& v : lane.vehicles) {
      if (v.s > lane.conflict_s_begin) continue;
      const double dist = lane.conflict_s_begin - v.s;
      const double braking =
          v.speed * v.speed / (2.0 * cfg_.veh_params.max_decel) + v.speed * cfg_.dt;
      if (dist > braking) armed_vehicle_[k] = v.id;
      return;  // nearest upstream vehicle only
    }
  }

  void do_decisions() {
    for (Pedestrian& ped : peds_) decide(ped);
  }

  void decide(Pedestrian& ped) {
    if (ped.phase == PedPhase::egressing) return;
    const int k = next_uncommitted_area(ped);
    if (k < 0) return;
    if (ped.pos.y < hold_line(k, ped.radius) - kDecisionWindow) return;

    bool enter = false;
    if (!vehicle_on_area_[k]) {  // never step in front of a vehicle already on it
      const Rect& rect = areas_[k].rect;
      if (!occupant_ptrs_[k].empty()) {
        enter = overtake_feasible(ped, rect, occupant_ptrs_[k])
                    ? gap_accept(ped, rect, lanes_[k], cfg_.conflict_params,
                                 cfg_.ped_params)
                    : true;  // follow the platoon already on the area
      } else {
        enter = gap_accept(ped, rect, lanes_[k], cfg_.conflict_params,
                           cfg_.ped_params);
      }
    }
    if (enter) {
      ped.committed[static_cast<std::size_t>(k)] = true;
      if (ped.phase != PedPhase::crossing) ped.phase = PedPhase::crossing;
    } else if (k == 0 && ped.phase == PedPhase::approaching) {
      ped.phase = PedPhase::waiting;
    }
  }

  Vec2 compute_ped_accel(const Pedestrian& ped) const {
    const Vec2 dir = desired_direction(ped, geom_.sink);
    double target = ped.desired_speed;
    const int k = next_uncommitted_area(ped);
    if (k >= 0) {
      const double dist = hold_line(k, ped.radius) - ped.pos.y;
      if (dist <= kDecisionWindow) {
        // ramp down toward a stop exactly at the hold line
        target = std::clamp(dist / ped.relaxation_time, 0.0, ped.desired_speed);
      }
    }
    Vec2 f = driving_force(ped, dir, target);
    f += repulsion_from_boundary(ped, geom_.corridor_x_min, geom_.corridor_x_max,
                                 cfg_.ped_params);
    grid_.for_each_neighbor(ped.pos, [&](int j) {
      const Pedestrian& other = peds_[static_cast<std::size_t>(j)];
      if (other.id != ped.id) f += repulsion_from_ped(ped, other, cfg_.ped_params);
    });
    return f;
  }

  void do_forces() {
    grid_.rebuild(peds_);
    ped_accels_.resize(peds_.size());
    for (std::size_t i = 0; i < peds_.size(); ++i) {
      ped_accels_[i] = compute_ped_accel(peds_[i]);
    }
    for (int k = 0; k < 2; ++k) {
      LaneState& lane = lanes_[k];
      veh_accels_[k].resize(lane.vehicles.size());
      for (std::size_t i = 0; i < lane.vehicles.size(); ++i) {
        const Vehicle& veh = lane.vehicles[i];
        double gap = kFreeRoadGap;
        double lead_speed = 0.0;
        if (i > 0) {
          gap = lane.vehicles[i - 1].rear() - veh.s;
          lead_speed = lane.vehicles[i - 1].speed;
        }
        double a = car_following_accel(veh.speed, gap, lead_speed, cfg_.veh_params);
        if (const auto vl = virtual_leader(veh, areas_[k].must_yield,
                                           lane.conflict_s_begin,
                                           cfg_.veh_params.min_gap)) {
          a = std::min(a, car_following_accel(veh.speed, vl->first, vl->second,
                                              cfg_.veh_params));
        }
        veh_accels_[k][i] = a;
      }
      armed_prev_s_[k].reset();
      if (armed_vehicle_[k]) {
        for (const Vehicle& v : lane.vehicles) {
          if (v.id == *armed_vehicle_[k]) {
            armed_prev_s_[k] = v.s;
            break;
          }
        }
      }
    }
  }

  void do_commit() {
    const double cap = cfg_.ped_params.speed_cap_factor;
    const double xlo = geom_.corridor_x_min + cfg_.ped_params.radius;
    const double xhi = geom_.corridor_x_max - cfg_.ped_params.radius;
    for (std::size_t i = 0; i < peds_.size(); ++i) {
      Pedestrian& ped = peds_[i];
      integrate_ped(ped, ped_accels_[i], cfg_.dt, cap);
      if (ped.pos.x < xlo) {
        ped.pos.x = xlo;
        ped.vel.x = 0.0;
      } else if (ped.pos.x > xhi) {
        ped.pos.x = xhi;
        ped.vel.x = 0.0;
      }
      const int k = next_uncommitted_area(ped);
      if (k >= 0) {
        const double hold = hold_line(k, ped.radius);
        if (ped.pos.y > hold) {
          ped.pos.y = hold;
          if (ped.vel.y > 0.0) ped.vel.y = 0.0;
        }
      }
    }
    for (int k = 0; k < 2; ++k) {
      LaneState& lane = lanes_[k];
      for (std::size_t i = 0; i < lane.vehicles.size(); ++i) {
        integrate_vehicle(lane.vehicles[i], veh_accels_[k][i], cfg_.dt);
      }
      while (!lane.vehicles.empty() && lane.vehicles.front().rear() > lane.length) {
        lane.vehicles.erase(lane.vehicles.begin());
      }
      for (std::size_t i = 1; i < lane.vehicles.size(); ++i) {
        if (lane.vehicles[i].s > lane.vehicles[i - 1].rear() + 1e-9) {
          throw EngineAbort(
              "vehicle overlap on lane " + std::to_string(k) + " at t=" +
              std::to_string(time()) + ": id " +
              std::to_string(lane.vehicles[i].id) + " s=" +
              std::to_string(lane.vehicles[i].s) + " vs id " +
              std::to_string(lane.vehicles[i - 1].id) + " rear=" +
              std::to_string(lane.vehicles[i - 1].rear()));
        }
      }
    }
  }

  void do_collision_check() {
    for (int k = 0; k < 2; ++k) {
      if (!armed_vehicle_[k] || !armed_prev_s_[k]) continue;
      const LaneState& lane = lanes_[k];
      if (*armed_prev_s_[k] >= lane.conflict_s_begin) continue;
      for (const Vehicle& v : lane.vehicles) {
        if (v.id != *armed_vehicle_[k]) continue;
        if (v.s >= lane.conflict_s_begin) {
          bool occupied = false;
          for (const Pedestrian& p : peds_) {
            if (areas_[k].rect.contains(p.pos)) {
              occupied = true;
              break;
            }
          }
          if (occupied) ++counters_.collision_events;
          armed_vehicle_[k].reset();
        }
        break;
      }
    }
  }

  void do_transitions(double now) {
    const double min_travel =
        geom_.travel_distance /
            (cfg_.ped_params.speed_cap_factor * cfg_.ped_params.desired_speed_max) -
        cfg_.dt - 1e-9;
    bool any_arrived = false;
    for (Pedestrian& ped : peds_) {
      if (ped.phase == PedPhase::crossing &&
          ped.pos.y - ped.radius > geom_.street_y_max) {
        ped.phase = PedPhase::egressing;
      }
      if (metrics_.on_zone_transition(ped, geom_, now) ==
          MetricsCollector::Transition::arrived) {
        if (now - ped.entered_measured_at < min_travel) {
          throw EngineAbort("travel time below kinematic bound for ped " +
                            std::to_string(ped.id));
        }
        ped.id = -ped.id - 1;  // mark for removal
        ++counters_.arrived;
        any_arrived = true;
      }
    }
    if (any_arrived) {
      std::erase_if(peds_, [](const Pedestrian& p) { return p.id < 0; });
    }
    metrics_.commit_step();
  }

  void do_sample(double now) {
    JamSample s;
    s.t = now;
    s.ped_jam = ped_jam_size(peds_, geom_);
    s.veh_jam_lane0 = veh_jam_size(lanes_[0], cfg_.veh_params);
    s.veh_jam_lane1 = veh_jam_size(lanes_[1], cfg_.veh_params);
    s.veh_jam_total = s.veh_jam_lane0 + s.veh_jam_lane1;
    metrics_.add_sample(s);

    // Conservation invariants, checked at every sample instant.
    const auto& in = counters_.ped_input;
    bool ok = (in.demanded == in.inserted + in.skipped);
    ok = ok && (in.inserted ==
                static_cast<std::int64_t>(peds_.size()) + counters_.arrived);
    for (const LaneState& lane : lanes_) {
      if (lane.demanded != lane.inserted + lane.entry_queue) ok = false;
    }
    if (!ok) ++counters_.conservation_violations;
  }

  void dump_trajectories(double now) {
    std::string buf;
    for (const Pedestrian& p : peds_) {
      append_g6(buf, now);
      buf += ",ped,";
      buf += std::to_string(p.id);
      buf += ',';
      append_g6(buf, p.pos.x);
      buf += ',';
      append_g6(buf, p.pos.y);
      buf += ',';
      append_g6(buf, p.speed());
      buf += '\n';
    }
    for (int k = 0; k < 2; ++k) {
      for (const Vehicle& v : lanes_[k].vehicles) {
        const Vec2 pos = geom_.lanes[k].world_position(v.s);
        append_g6(buf, now);
        buf += ",veh,";
        buf += std::to_string(v.id);
        buf += ',';
        append_g6(buf, pos.x);
        buf += ',';
        append_g6(buf, pos.y);
        buf += ',';
        append_g6(buf, v.speed);
        buf += '\n';
      }
    }
    (*trajectory_sink_) << buf;
  }

  ScenarioConfig cfg_;
  Geometry geom_;
  RngStreams streams_;
  NeighborGrid grid_;
  std::vector<Pedestrian> peds_;
  std::array<LaneState, 2> lanes_{};
  std::array<ConflictAreaState, 2> areas_{};
  std::array<std::vector<const Pedestrian*>, 2> occupant_ptrs_{};
  std::array<bool, 2> vehicle_on_area_{false, false};
  std::array<std::optional<std::int64_t>, 2> armed_vehicle_{};
  std::array<std::optional<double>, 2> armed_prev_s_{};
  MetricsCollector metrics_;
  SimCounters counters_;
  std::vector<Vec2> ped_accels_;
  std::array<std::vector<double>, 2> veh_accels_{};
  std::int64_t next_ped_id_ = 1;
  std::int64_t next_veh_id_ = 1;
  std::int64_t steps_ = 0;
  std::int64_t total_steps_ = 0;
  std::int64_t steps_per_sample_ = 10;
  bool shuffle_enabled_ = false;
  std::uint64_t shuffle_state_ = 0;
  std::ostream* trajectory_sink_ = nullptr;
};

}  // namespace crossflow
