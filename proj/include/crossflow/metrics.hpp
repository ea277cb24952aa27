#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossflow/csv.hpp"
#include "crossflow/geometry.hpp"
#include "crossflow/ped.hpp"
#include "crossflow/vehicle.hpp"

namespace crossflow {

struct TravelTimeRecord {
  std::int64_t ped_id = 0;
  double start_s = 0.0;   // first entry into the measured zone
  double end_s = 0.0;     // entry into the sink
  double travel_s = 0.0;
};

struct JamSample {
  double t = 0.0;
  int ped_jam = 0;
  int veh_jam_lane0 = 0;
  int veh_jam_lane1 = 0;
  int veh_jam_total = 0;
};

struct RunSummary {
  double mean_tt_s = 0.0;
  double median_tt_s = 0.0;
  double p95_tt_s = 0.0;
  double avg_ped_jam = 0.0;
  double avg_veh_jam = 0.0;  // lane total
  std::int64_t demanded = 0;
  std::int64_t inserted = 0;
  std::int64_t skipped = 0;
  std::int64_t arrived = 0;
  std::int64_t collision_events = 0;
  std::int64_t conservation_violations = 0;
  // config echo
  double ped_demand = 0.0;
  double veh_demand = 0.0;
  double duration = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

// Pedestrians delayed on the way to the street: approach + measured zones.
inline int ped_jam_size(std::span<const Pedestrian> peds, const Geometry& geom) {
  int n = 0;
  for (const Pedestrian& p : peds) {
    if (geom.approach.contains(p.pos) || geom.measured.contains(p.pos)) ++n;
  }
  return n;
}

// Vehicles below the jam speed threshold that have not yet cleared the
// conflict area.
inline int veh_jam_size(const LaneState& lane, const VehModelParams& params) {
  int n = 0;
  for (const Vehicle& v : lane.vehicles) {
    if (v.speed < params.jam_speed_threshold && v.s <= lane.conflict_s_end) ++n;
  }
  return n;
}

class MetricsCollector {
 public:
  enum class Transition { none, arrived };

  // Called once per pedestrian per step after integration. Sets the travel
  // clock on first entry into the measured zone and closes the record on
  // sink entry; the caller removes arrived pedestrians.
  Transition on_zone_transition(Pedestrian& ped, const Geometry& geom, double t) {
    if (ped.entered_measured_at < 0.0 && ped.pos.y >= geom.measured.y_min) {
      ped.entered_measured_at = t;
    }
    if (ped.pos.y >= geom.sink.y_min) {
      if (ped.entered_measured_at < 0.0) {
        throw std::logic_error("pedestrian reached sink without measured-zone entry");
      }
      pending_.push_back({ped.id, ped.entered_measured_at, t,
                          t - ped.entered_measured_at});
      return Transition::arrived;
    }
    return Transition::none;
  }

  // Completed records of one step are committed in id order so results do
  // not depend on pedestrian storage order.
  void commit_step() {
    std::sort(pending_.begin(), pending_.end(),
              [](const TravelTimeRecord& a, const TravelTimeRecord& b) {
                return a.ped_id < b.ped_id;
              });
    records_.insert(records_.end(), pending_.begin(), pending_.end());
    pending_.clear();
  }

  void add_sample(JamSample s) { samples_.push_back(s); }

  const std::vector<TravelTimeRecord>& records() const { return records_; }
  const std::vector<JamSample>& samples() const { return samples_; }

  RunSummary summarize() const {
    RunSummary s;
    s.arrived = static_cast<std::int64_t>(records_.size());
    if (!records_.empty()) {
      std::vector<double> tts;
      tts.reserve(records_.size());
      for (const auto& r : records_) tts.push_back(r.travel_s);
      std::sort(tts.begin(), tts.end());
      double sum = 0.0;
      for (const double v : tts) sum += v;
      s.mean_tt_s = sum / static_cast<double>(tts.size());
      const std::size_t n = tts.size();
      s.median_tt_s = (n % 2 == 1) ? tts[n / 2]
                                   : 0.5 * (tts[n / 2 - 1] + tts[n / 2]);
      // nearest-rank p95
      const std::size_t rank =
          static_cast<std::size_t>(std::max<double>(1.0, std::ceil(0.95 * static_cast<double>(n))));
      s.p95_tt_s = tts[rank - 1];
    }
    if (!samples_.empty()) {
      double ped_sum = 0.0;
      double veh_sum = 0.0;
      for (const auto& j : samples_) {
        ped_sum += j.ped_jam;
        veh_sum += j.veh_jam_total;
      }
      s.avg_ped_jam = ped_sum / static_cast<double>(samples_.size());
      s.avg_veh_jam = veh_sum / static_cast<double>(samples_.size());
    }
    return s;
  }

 private:
  std::vector<TravelTimeRecord> pending_;
  std::vector<TravelTimeRecord> records_;
  std::vector<JamSample> samples_;
};

inline std::string travel_times_csv(const std::vector<TravelTimeRecord>& records) {
  std::string out = "ped_id,start_s,end_s,travel_s\n";
  for (const auto& r : records) {
    out += std::to_string(r.ped_id);
    out += ',';
    append_g6(out, r.start_s);
    out += ',';
    append_g6(out, r.end_s);
    out += ',';
    append_g6(out, r.travel_s);
    out += '\n';
  }
  return out;
}

inline std::string timeseries_csv(const std::vector<JamSample>& samples) {
  std::string out = "t_s,ped_jam,veh_jam_lane0,veh_jam_lane1,veh_jam_total\n";
  for (const auto& s : samples) {
    append_g6(out, s.t);
    out += ',';
    out += std::to_string(s.ped_jam);
    out += ',';
    out += std::to_string(s.veh_jam_lane0);
    out += ',';
    out += std::to_string(s.veh_jam_lane1);
    out += ',';
    out += std::to_string(s.veh_jam_total);
    out += '\n';
  }
  return out;
}

inline std::string sweep_csv_header() {
  return "veh_demand,ped_demand,rep,seed,mean_tt_s,median_tt_s,p95_tt_s,"
         "avg_ped_jam,avg_veh_jam,inserted,skipped,arrived,collisions\n";
}

inline std::string sweep_csv_row(const RunSummary& s, int rep) {
  std::string out;
  append_g6(out, s.veh_demand);
  out += ',';
  append_g6(out, s.ped_demand);
  out += ',';
  out += std::to_string(rep);
  out += ',';
  out += std::to_string(s.seed);
  out += ',';
  append_g6(out, s.mean_tt_s);
  out += ',';
  append_g6(out, s.median_tt_s);
  out += ',';
  append_g6(out, s.p95_tt_s);
  out += ',';
  append_g6(out, s.avg_ped_jam);
  out += ',';
  append_g6(out, s.avg_veh_jam);
  out += ',';
  out += std::to_string(s.inserted);
  out += ',';
  out += std::to_string(s.skipped);
  out += ',';
  out += std::to_string(s.arrived);
  out += ',';
  out += std::to_string(s.collision_events);
  out += '\n';
  return out;
}

}  // namespace crossflow
