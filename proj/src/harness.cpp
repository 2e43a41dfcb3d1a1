// cfisac: cell-free ISAC drone detection simulator
// Copyright (C) 2026 The cfisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfisac/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <json.hpp>
#include <omp.h>

namespace cfisac {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"coverage_vs_time", "coverage_vs_altitude", "blocklength_map",
                                              "table1_comparison"};
  return names;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string label(const std::string& key, double v) { return key + "=" + format_double(v); }

ExperimentRecord make_record(std::string series, std::string param, double value, const ScenarioConfig& cfg,
                             SweepResult sweep) {
  ExperimentRecord r;
  r.series = std::move(series);
  r.param = std::move(param);
  r.value = value;
  r.sinr_db = cfg.sensing.sinr_threshold_db;
  r.altitude_m = cfg.geometry.target_altitude_m;
  r.sweep = std::move(sweep);
  return r;
}

void coverage_vs_time(const ScenarioConfig& cfg, const Scene& scene, std::vector<ExperimentRecord>& out) {
  for (double sinr : cfg.experiment.sinr_grid_db) {
    ScenarioConfig c = cfg;
    c.sensing.sinr_threshold_db = sinr;
    AreaEvaluator ev(scene, SchedulerSettings::from_config(c));
    for (double w0 : cfg.omega0_grid()) out.push_back(make_record(label("sinr_db", sinr), "omega0", w0, c, ev.fixed(w0)));
  }
}

void coverage_vs_altitude(const ScenarioConfig& cfg, const Scene& scene, std::vector<ExperimentRecord>& out) {
  for (double alt : cfg.experiment.altitude_grid_m) {
    ScenarioConfig c = cfg;
    c.geometry.target_altitude_m = alt;
    AreaEvaluator ev(scene.with_altitude(alt), SchedulerSettings::from_config(c));
    for (double p_th : cfg.experiment.p_th_grid)
      out.push_back(make_record(label("p_th", p_th), "altitude_m", alt, c, ev.fixed(cfg.experiment.altitude_omega0, p_th)));
  }
}

void blocklength_map(const ScenarioConfig& cfg, const Scene& scene, std::vector<ExperimentRecord>& out) {
  AreaEvaluator ev(scene, SchedulerSettings::from_config(cfg));
  out.push_back(make_record("adaptive", "p_th", cfg.sensing.p_th, cfg, ev.adaptive()));
}

void table1_comparison(const ScenarioConfig& cfg, const Scene& scene, std::vector<ExperimentRecord>& out) {
  AreaEvaluator ev(scene, SchedulerSettings::from_config(cfg));
  SweepResult adaptive = ev.adaptive();
  std::vector<std::pair<double, SweepResult>> fixed;
  for (double w0 : cfg.omega0_grid()) fixed.emplace_back(w0, ev.fixed(w0));

  // Fixed weights at (nearly) the adaptive AoS, and the cheapest fixed
  // weights whose coverage is within one point of the adaptive coverage.
  const std::pair<double, SweepResult>* same_aos = nullptr;
  const std::pair<double, SweepResult>* same_cov = nullptr;
  for (const auto& f : fixed) {
    const double gap = std::abs(f.second.aos_total_s - adaptive.aos_total_s);
    if (!same_aos || gap < std::abs(same_aos->second.aos_total_s - adaptive.aos_total_s)) same_aos = &f;
    if (f.second.coverage_pct >= adaptive.coverage_pct - 1.0 &&
        (!same_cov || f.second.aos_total_s < same_cov->second.aos_total_s))
      same_cov = &f;
  }

  out.push_back(make_record("adaptive", "p_th", cfg.sensing.p_th, cfg, std::move(adaptive)));
  if (same_aos) out.push_back(make_record("fixed_same_aos", "omega0", same_aos->first, cfg, same_aos->second));
  if (same_cov) out.push_back(make_record("fixed_same_coverage", "omega0", same_cov->first, cfg, same_cov->second));
  for (auto& f : fixed) out.push_back(make_record("fixed", "omega0", f.first, cfg, std::move(f.second)));
}

} // namespace

ExperimentRun run_experiment(const std::string& name, const ScenarioConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown experiment: " + name);
  require_valid(cfg);

  const auto start = std::chrono::steady_clock::now();
  ExperimentRun run;
  run.name = name;
  run.config_hash = config_hash(cfg);
  run.seed = cfg.seed;
  const Scene scene = build_scene(cfg, cfg.seed);
  if (name == "coverage_vs_time")
    coverage_vs_time(cfg, scene, run.records);
  else if (name == "coverage_vs_altitude")
    coverage_vs_altitude(cfg, scene, run.records);
  else if (name == "blocklength_map")
    blocklength_map(cfg, scene, run.records);
  else
    table1_comparison(cfg, scene, run.records);
  run.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "experiment", "series", "param",  "value",    "sinr_db", "altitude_m", "p_th",     "coverage_pct",
      "aos_total_ms", "point", "x_m",   "y_m",      "z_m",     "tau",        "omega0",   "zeta",
      "rho0_w",     "p_d",    "outage", "feasible", "ccp_iterations", "config_hash", "seed"};
  return cols;
}

void write_csv(const ExperimentRun& run, std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  const std::string hash = hex64(run.config_hash);
  for (const auto& rec : run.records) {
    const auto& sw = rec.sweep;
    for (const auto& p : sw.points) {
      os << run.name << ',' << rec.series << ',' << rec.param << ',' << format_double(rec.value) << ','
         << format_double(rec.sinr_db) << ',' << format_double(rec.altitude_m) << ',' << format_double(sw.p_th)
         << ',' << format_double(sw.coverage_pct) << ',' << format_double(sw.aos_total_s * 1e3) << ',' << p.point
         << ',' << format_double(p.position.x()) << ',' << format_double(p.position.y()) << ','
         << format_double(p.position.z()) << ',' << p.tau << ',' << format_double(p.omega0) << ',' << p.zeta << ','
         << format_double(p.rho0()) << ',' << format_double(p.p_d) << ',' << (p.outage ? 1 : 0) << ','
         << (p.feasible ? 1 : 0) << ',' << p.ccp_iterations << ',' << hash << ',' << run.seed << '\n';
    }
  }
}

void emit_results(const std::vector<ExperimentRun>& runs, const ScenarioConfig& cfg,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

  nlohmann::json manifest;
  manifest["config"] = cfg;
  manifest["config_hash"] = hex64(config_hash(cfg));
  manifest["seed"] = cfg.seed;
  manifest["versions"] = {{"cfisac", "1.0.0"},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"compiler", __VERSION__},
                          {"openmp", _OPENMP}};
  manifest["threads"] = omp_get_max_threads();
  manifest["experiments"] = nlohmann::json::array();

  for (const auto& run : runs) {
    const auto path = out_dir / (run.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(run, f);
    f.close();
    if (!f) throw std::runtime_error("write failed for " + path.string());

    nlohmann::json summary = nlohmann::json::array();
    for (const auto& rec : run.records)
      summary.push_back({{"series", rec.series},
                         {"param", rec.param},
                         {"value", rec.value},
                         {"coverage_pct", rec.sweep.coverage_pct},
                         {"aos_total_ms", rec.sweep.aos_total_s * 1e3}});
    manifest["experiments"].push_back({{"name", run.name},
                                       {"csv", path.filename().string()},
                                       {"config_hash", hex64(run.config_hash)},
                                       {"seed", run.seed},
                                       {"wall_clock_s", run.wall_clock_s},
                                       {"records", summary}});
  }

  const auto mpath = out_dir / "manifest.json";
  std::ofstream m(mpath);
  if (!m) throw std::runtime_error("cannot open " + mpath.string() + " for writing");
  m << manifest.dump(2) << '\n';
  if (!m) throw std::runtime_error("write failed for " + mpath.string());
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  if (!std::getline(f, line)) return {};
  const auto header = split(line);
  std::vector<CsvRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path.string() + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    CsvRow row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace cfisac
