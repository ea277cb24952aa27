#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossflow/csv.hpp"
#include "crossflow/plot.hpp"

namespace crossflow {

struct SweepRow {
  double veh_demand = 0.0;
  double ped_demand = 0.0;
  int rep = 0;
  double mean_tt_s = 0.0;
  double avg_ped_jam = 0.0;
  double avg_veh_jam = 0.0;
};

inline std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw std::runtime_error("sweep.csv is empty");
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() < 13) {
      throw std::runtime_error("sweep.csv: malformed row " + std::to_string(i + 1));
    }
    SweepRow row;
    row.veh_demand = parse_double(fields[0]);
    row.ped_demand = parse_double(fields[1]);
    row.rep = static_cast<int>(parse_double(fields[2]));
    row.mean_tt_s = parse_double(fields[4]);
    row.avg_ped_jam = parse_double(fields[7]);
    row.avg_veh_jam = parse_double(fields[8]);
    rows.push_back(row);
  }
  if (rows.empty()) throw std::runtime_error("sweep.csv has no data rows");
  return rows;
}

struct FigureFile {
  std::string name;  // file name, e.g. "travel_time_vs_ped_demand.svg"
  std::string svg;
};

// Loader for a cell's timeseries.csv (replication 0); returns nothing when
// the file is not available, in which case that time-series figure is
// skipped.
using TimeseriesLoader =
    std::function<std::optional<std::string>(double veh_demand, double ped_demand)>;

namespace figures_detail {

// rep-averaged metric per (veh, ped)
inline std::map<double, std::map<double, double>> demand_grid(
    const std::vector<SweepRow>& rows, double SweepRow::* field) {
  std::map<double, std::map<double, std::pair<double, int>>> acc;
  for (const SweepRow& r : rows) {
    auto& cell = acc[r.veh_demand][r.ped_demand];
    cell.first += r.*field;
    cell.second += 1;
  }
  std::map<double, std::map<double, double>> out;
  for (const auto& [veh, by_ped] : acc) {
    for (const auto& [ped, sum_count] : by_ped) {
      out[veh][ped] = sum_count.first / sum_count.second;
    }
  }
  return out;
}

inline std::vector<PlotSeries> grid_to_series(
    const std::map<double, std::map<double, double>>& grid) {
  std::vector<PlotSeries> series;
  for (const auto& [veh, by_ped] : grid) {
    PlotSeries s;
    s.label = format_g6(veh) + " veh/h";
    for (const auto& [ped, value] : by_ped) {
      s.points.push_back({ped, value});
    }
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace figures_detail

// Produces the three standard figures from sweep results:
//   (a) mean pedestrian travel time vs. pedestrian demand, per vehicle demand
//   (b) vehicle jam size over time for the highest vehicle demand cells
//   (c) time-averaged vehicle jam size vs. pedestrian demand, per vehicle demand
// Pure function of the CSV contents.
inline std::vector<FigureFile> make_figures(const std::vector<SweepRow>& rows,
                                            const TimeseriesLoader& load_timeseries) {
  std::vector<FigureFile> figures;

  const auto tt_grid = figures_detail::demand_grid(rows, &SweepRow::mean_tt_s);
  figures.push_back(
      {"travel_time_vs_ped_demand.svg",
       line_plot_svg("Mean pedestrian travel time vs pedestrian demand",
                     "pedestrian demand [1/h]", "mean travel time [s]",
                     figures_detail::grid_to_series(tt_grid))});

  const auto jam_grid = figures_detail::demand_grid(rows, &SweepRow::avg_veh_jam);
  figures.push_back(
      {"veh_jam_avg_vs_ped_demand.svg",
       line_plot_svg("Time-averaged vehicle jam size vs pedestrian demand",
                     "pedestrian demand [1/h]", "avg vehicle jam [veh]",
                     figures_detail::grid_to_series(jam_grid))});

  if (load_timeseries && !jam_grid.empty()) {
    const double top_veh = jam_grid.rbegin()->first;
    for (const auto& [ped, unused] : jam_grid.rbegin()->second) {
      (void)unused;
      const auto csv = load_timeseries(top_veh, ped);
      if (!csv) continue;
      const auto lines = split_lines(*csv);
      PlotSeries veh_series;
      veh_series.label = "vehicle jam";
      PlotSeries ped_series;
      ped_series.label = "pedestrian jam";
      for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() < 5) continue;
        const double t = parse_double(fields[0]);
        ped_series.points.push_back({t, parse_double(fields[1])});
        veh_series.points.push_back({t, parse_double(fields[4])});
      }
      if (veh_series.points.empty()) continue;
      const std::string name =
          "jam_timeseries_veh" + format_g6(top_veh) + "_ped" + format_g6(ped) + ".svg";
      figures.push_back(
          {name, line_plot_svg("Jam size over time (veh " + format_g6(top_veh) +
                                   "/h, ped " + format_g6(ped) + "/h)",
                               "time [s]", "jam size [agents]",
                               {veh_series, ped_series})});
    }
  }
  return figures;
}

}  // namespace crossflow
