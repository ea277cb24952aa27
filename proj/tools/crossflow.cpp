#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "crossflow/engine.hpp"
#include "crossflow/figures.hpp"
#include "crossflow/metrics.hpp"
#include "crossflow/scenario.hpp"
#include "crossflow/sweep.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string cell_dir_name(double veh, double ped, int rep) {
  return "veh" + crossflow::format_g6(veh) + "_ped" + crossflow::format_g6(ped) +
         "_rep" + std::to_string(rep);
}

void append_summary_row(const fs::path& out_dir, const crossflow::RunSummary& summary,
                        int rep) {
  const fs::path path = out_dir / "sweep.csv";
  fs::create_directories(out_dir);
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (fresh) out << crossflow::sweep_csv_header();
  out << crossflow::sweep_csv_row(summary, rep);
}

int emit_plot_files(const fs::path& out_dir) {
  const auto sweep_text = read_file(out_dir / "sweep.csv");
  if (!sweep_text) {
    std::cerr << "error: " << (out_dir / "sweep.csv").string() << " not found\n";
    return 1;
  }
  std::vector<crossflow::SweepRow> rows;
  try {
    rows = crossflow::parse_sweep_csv(*sweep_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const crossflow::TimeseriesLoader loader =
      [&out_dir](double veh, double ped) -> std::optional<std::string> {
    const fs::path cell = out_dir / cell_dir_name(veh, ped, 0) / "timeseries.csv";
    if (auto text = read_file(cell)) return text;
    return read_file(out_dir / "timeseries.csv");  // single-run layout
  };
  const auto figures = crossflow::make_figures(rows, loader);
  for (const auto& fig : figures) {
    write_file(out_dir / fig.name, fig.svg);
    std::cout << "wrote " << (out_dir / fig.name).string() << "\n";
  }
  return 0;
}

void print_summary(const crossflow::RunSummary& s) {
  std::cout << "veh_demand=" << crossflow::format_g6(s.veh_demand)
            << " ped_demand=" << crossflow::format_g6(s.ped_demand)
            << " seed=" << s.seed << " arrived=" << s.arrived
            << " mean_tt=" << crossflow::format_g6(s.mean_tt_s)
            << "s avg_ped_jam=" << crossflow::format_g6(s.avg_ped_jam)
            << " avg_veh_jam=" << crossflow::format_g6(s.avg_veh_jam)
            << " skipped=" << s.skipped << " collisions=" << s.collision_events
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "crossflow: pedestrians crossing a two-lane street with vehicle "
      "priority, at configurable demand"};

  std::string scenario_path;
  std::string sweep_path;
  std::string out_dir = "out";
  double ped_demand = 0.0;
  double veh_demand = 0.0;
  double duration = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  bool plots = false;
  bool dump_trajectories = false;

  auto* opt_scenario =
      app.add_option("--scenario", scenario_path, "scenario file (key = value lines)");
  auto* opt_ped = app.add_option("--ped-demand", ped_demand, "pedestrians per hour");
  auto* opt_veh =
      app.add_option("--veh-demand", veh_demand, "vehicles per hour per lane");
  auto* opt_duration = app.add_option("--duration", duration, "simulated seconds");
  auto* opt_dt = app.add_option("--dt", dt, "timestep in seconds");
  auto* opt_seed = app.add_option("--seed", seed, "master random seed");
  app.add_option("--out", out_dir, "output directory");
  auto* opt_sweep =
      app.add_option("--sweep", sweep_path, "sweep spec file; runs a demand grid");
  app.add_option("--jobs", jobs, "max concurrent sweep cells");
  app.add_flag("--plots", plots, "emit SVG figures from the output CSVs");
  app.add_flag("--dump-trajectories", dump_trajectories,
               "write trajectories.csv (large)");

  CLI11_PARSE(app, argc, argv);

  try {
    crossflow::ScenarioConfig base;
    if (opt_scenario->count() > 0) base = crossflow::load_scenario(scenario_path);
    if (opt_ped->count() > 0) base.ped_demand = ped_demand;
    if (opt_veh->count() > 0) base.veh_demand = veh_demand;
    if (opt_duration->count() > 0) base.duration = duration;
    if (opt_dt->count() > 0) base.dt = dt;
    if (opt_seed->count() > 0) base.seed = seed;

    const bool run_requested =
        opt_scenario->count() > 0 || opt_ped->count() > 0 || opt_veh->count() > 0 ||
        opt_duration->count() > 0 || opt_dt->count() > 0 || opt_seed->count() > 0 ||
        opt_sweep->count() > 0 || dump_trajectories;
    if (plots && !run_requested) {
      return emit_plot_files(out_dir);  // plot-only invocation
    }

    if (const auto report = crossflow::validate_scenario(base); !report.empty()) {
      std::cerr << "invalid scenario:\n";
      for (const auto& v : report) std::cerr << "  - " << v << "\n";
      return 2;
    }

    if (opt_sweep->count() > 0) {
      crossflow::SweepSpec spec = crossflow::load_sweep(sweep_path);
      spec.base = base;
      spec.out_dir = out_dir;
      if (jobs < 1) jobs = 1;
      const auto on_cell = [&](const crossflow::SweepCell& cell,
                               const crossflow::RunResult& run) {
        const fs::path dir =
            fs::path(out_dir) / cell_dir_name(cell.veh_demand, cell.ped_demand, cell.rep);
        write_file(dir / "travel_times.csv",
                   crossflow::travel_times_csv(run.travel_times));
        write_file(dir / "timeseries.csv", crossflow::timeseries_csv(run.samples));
      };
      const auto results = crossflow::run_sweep(spec, jobs, on_cell);
      write_file(fs::path(out_dir) / "sweep.csv", crossflow::sweep_csv(results));
      for (const auto& r : results) print_summary(r.summary);
      std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << "\n";
    } else {
      crossflow::Engine engine(base);
      std::ofstream traj;
      if (dump_trajectories) {
        fs::create_directories(out_dir);
        traj.open(fs::path(out_dir) / "trajectories.csv",
                  std::ios::binary | std::ios::trunc);
        engine.set_trajectory_sink(&traj);
      }
      const crossflow::RunResult run = engine.run();
      write_file(fs::path(out_dir) / "travel_times.csv",
                 crossflow::travel_times_csv(run.travel_times));
      write_file(fs::path(out_dir) / "timeseries.csv",
                 crossflow::timeseries_csv(run.samples));
      append_summary_row(out_dir, run.summary, 0);
      print_summary(run.summary);
    }

    if (plots) return emit_plot_files(out_dir);
    return 0;
  } catch (const crossflow::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
