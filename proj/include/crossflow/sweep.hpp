#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "crossflow/engine.hpp"
#include "crossflow/metrics.hpp"
#include "crossflow/rng.hpp"
#include "crossflow/scenario.hpp"

namespace crossflow {

// Demand grid; every (veh, ped, rep) cell is one independent run.
struct SweepSpec {
  std::vector<double> ped_demands;
  std::vector<double> veh_demands;
  int replications = 1;
  ScenarioConfig base;
  std::string out_dir;
};

// Fixed published hash for per-cell seeds: a splitmix64 chain over the master
// seed, the demands quantized to 1/1000, and the replication index. Changing
// one cell's demand never changes another cell's seed.
inline std::uint64_t derived_cell_seed(std::uint64_t master, double veh_demand,
                                       double ped_demand, int rep) {
  const auto quantize = [](double v) {
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(v * 1000.0)));
  };
  std::uint64_t state = master;
  std::uint64_t h = splitmix64(state);
  state = h ^ quantize(veh_demand);
  h = splitmix64(state);
  state = h ^ quantize(ped_demand);
  h = splitmix64(state);
  state = h ^ static_cast<std::uint64_t>(rep);
  return splitmix64(state);
}

struct SweepCell {
  double veh_demand = 0.0;
  double ped_demand = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
};

struct SweepCellResult {
  SweepCell cell;
  RunSummary summary;
};

inline std::vector<SweepCell> enumerate_cells(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (const double veh : spec.veh_demands) {
    for (const double ped : spec.ped_demands) {
      for (int rep = 0; rep < spec.replications; ++rep) {
        cells.push_back(
            {veh, ped, rep, derived_cell_seed(spec.base.seed, veh, ped, rep)});
      }
    }
  }
  return cells;
}

// Runs all cells, up to `jobs` concurrently. Cells are isolated runs;
// `on_cell` (may be empty) is invoked from worker threads as cells finish
// and must be safe for that. The returned results are in deterministic
// (veh, ped, rep) order regardless of scheduling.
inline std::vector<SweepCellResult> run_sweep(
    const SweepSpec& spec, int jobs,
    const std::function<void(const SweepCell&, const RunResult&)>& on_cell = {}) {
  if (spec.ped_demands.empty() || spec.veh_demands.empty()) {
    throw std::invalid_argument("sweep needs at least one ped and one veh demand");
  }
  if (spec.replications < 1) {
    throw std::invalid_argument("sweep needs replications >= 1");
  }
  const std::vector<SweepCell> cells = enumerate_cells(spec);
  std::vector<SweepCellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || failed.load()) break;
      const SweepCell& cell = cells[i];
      try {
        ScenarioConfig cfg = spec.base;
        cfg.veh_demand = cell.veh_demand;
        cfg.ped_demand = cell.ped_demand;
        cfg.seed = cell.seed;
        Engine engine(cfg);
        const RunResult run = engine.run();
        results[i] = {cell, run.summary};
        if (on_cell) on_cell(cell, run);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          first_error = "cell veh=" + std::to_string(cell.veh_demand) +
                        " ped=" + std::to_string(cell.ped_demand) +
                        " rep=" + std::to_string(cell.rep) + ": " + e.what();
        }
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("sweep failed: " + first_error);
  return results;
}

inline std::string sweep_csv(const std::vector<SweepCellResult>& results) {
  std::string out = sweep_csv_header();
  for (const auto& r : results) out += sweep_csv_row(r.summary, r.cell.rep);
  return out;
}

// `ped_demands`/`veh_demands` as comma-separated lists, plus `replications`.
inline SweepSpec parse_sweep_text(const std::string& text,
                                  const std::string& source = "<string>") {
  SweepSpec spec;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  const auto parse_list = [&](std::string_view value, int line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
      std::size_t comma = value.find(',', start);
      if (comma == std::string_view::npos) comma = value.size();
      const std::string item{detail::trim(value.substr(start, comma - start))};
      if (!item.empty()) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') {
          throw ScenarioError(source + ":" + std::to_string(line) +
                              ": non-numeric list entry '" + item + "'");
        }
        out.push_back(v);
      }
      start = comma + 1;
    }
    return out;
  };
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
                          ": expected 'key = value'");
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key == "ped_demands") {
      spec.ped_demands = parse_list(value, line_no);
    } else if (key == "veh_demands") {
      spec.veh_demands = parse_list(value, line_no);
    } else if (key == "replications") {
      spec.replications = static_cast<int>(
          detail::parse_number(source, line_no, key, value));
    } else {
      throw ScenarioError(source + ":" + std::to_string(line_no) +
                          ": unknown key '" + std::string(key) + "'");
    }
  }
  if (spec.ped_demands.empty() || spec.veh_demands.empty()) {
    throw ScenarioError(source + ": sweep must set ped_demands and veh_demands");
  }
  for (const auto& list : {spec.ped_demands, spec.veh_demands}) {
    for (const double d : list) {
      if (d < 0.0) throw ScenarioError(source + ": demands must be >= 0");
    }
  }
  if (spec.replications < 1) {
    throw ScenarioError(source + ": replications must be >= 1");
  }
  return spec;
}

inline SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open sweep file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_text(buffer.str(), path);
}

}  // namespace crossflow
