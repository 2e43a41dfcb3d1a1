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

#include "cfisac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cfisac {

using nlohmann::json;

std::vector<Vec3> GeometryConfig::default_tx_aps() {
  return {Vec3(0, 0, 20), Vec3(200, 0, 20), Vec3(-200, 0, 20), Vec3(0, 200, 20), Vec3(0, -200, 20)};
}

std::vector<Vec3> GeometryConfig::default_rx_aps() {
  std::vector<Vec3> out;
  for (double y : {-150.0, -50.0, 50.0, 150.0})
    for (double x : {-150.0, -50.0, 50.0, 150.0}) out.emplace_back(x, y, 50.0);
  return out;
}

ScenarioConfig::ScenarioConfig() {
  geometry.tx_aps = GeometryConfig::default_tx_aps();
  geometry.rx_aps = GeometryConfig::default_rx_aps();
}

std::vector<double> ScenarioConfig::omega0_grid() const {
  if (!experiment.omega0_grid.empty()) return experiment.omega0_grid;
  std::vector<double> grid;
  const int n = sensing.weight_iterations;
  for (int z = 1; z <= n; ++z) {
    const double w0 = std::round((1.0 - sensing.weight_step * (n - z)) * 1e12) / 1e12;
    grid.push_back(std::clamp(w0, 0.0, 1.0));
  }
  return grid;
}

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& s : issues) os << "\n  - " << s;
  return os.str();
}

bool finite_all(const Vec3& v) { return v.allFinite(); }

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  const auto& g = c.geometry;
  need(!g.tx_aps.empty(), "geometry.tx_aps must contain at least one AP");
  need(!g.rx_aps.empty(), "geometry.rx_aps must contain at least one AP");
  for (const auto& p : g.tx_aps) need(finite_all(p) && p.z() > 0, "geometry.tx_aps heights must be positive");
  for (const auto& p : g.rx_aps) need(finite_all(p) && p.z() > 0, "geometry.rx_aps heights must be positive");
  need(g.antennas_per_ap >= 1, "geometry.antennas_per_ap must be >= 1");
  need(g.num_ues >= 0, "geometry.num_ues must be >= 0");
  need(g.ue_area_side_m > 0, "geometry.ue_area_side_m must be positive");
  need(g.ue_height_m > 0, "geometry.ue_height_m must be positive");
  need(g.sensing_area_side_m > 0, "geometry.sensing_area_side_m must be positive");
  need(g.grid_side >= 1, "geometry.grid_side must be >= 1");
  need(g.target_altitude_m > 0, "geometry.target_altitude_m must be positive");

  const auto& rf = c.rf;
  need(rf.carrier_hz > 0, "rf.carrier_hz must be positive");
  need(rf.bandwidth_hz > 0, "rf.bandwidth_hz must be positive");
  need(std::isfinite(rf.noise_figure_db), "rf.noise_figure_db must be finite");
  need(rf.rho_max_w > 0, "rf.rho_max_w must be positive");
  need(rf.rcs_m2 > 0, "rf.rcs_m2 must be positive");
  need(std::isfinite(rf.path_loss_ref_db), "rf.path_loss_ref_db must be finite");
  need(rf.path_loss_exponent > 0, "rf.path_loss_exponent must be positive");
  need(rf.path_loss_ref_m > 0, "rf.path_loss_ref_m must be positive");
  need(std::isfinite(rf.rzf_regularizer), "rf.rzf_regularizer must be finite");

  const auto& s = c.sensing;
  need(s.tau_min >= 1, "sensing.tau_min must be >= 1");
  need(s.tau_max >= s.tau_min, "sensing.tau_max must be >= sensing.tau_min");
  need(std::isfinite(s.sinr_threshold_db), "sensing.sinr_threshold_db must be finite");
  need(s.p_fa > 0 && s.p_fa < 1, "sensing.p_fa must lie in (0, 1)");
  need(s.p_th > 0 && s.p_th < 1, "sensing.p_th must lie in (0, 1)");
  need(s.weight_step > 0 && s.weight_step <= 1, "sensing.weight_step must lie in (0, 1]");
  need(s.weight_iterations >= 1, "sensing.weight_iterations must be >= 1");

  const auto& o = c.solver;
  need(o.tol > 0, "solver.tol must be positive");
  need(o.max_iters >= 1, "solver.max_iters must be >= 1");
  need(o.fpp_penalty > 0, "solver.fpp_penalty must be positive");
  need(o.slack_tol > 0, "solver.slack_tol must be positive");
  need(o.init == "multi_start" || o.init == "tau_max" || o.init == "tau_min",
       "solver.init must be one of multi_start, tau_max, tau_min");

  need(c.mc.loop_trials >= 1000, "mc.loop_trials must be >= 1000");
  need(c.mc.report_trials >= 1000, "mc.report_trials must be >= 1000");

  const auto& e = c.experiment;
  for (double v : e.altitude_grid_m) need(v > 0, "experiment.altitude_grid_m entries must be positive");
  for (double v : e.p_th_grid) need(v > 0 && v < 1, "experiment.p_th_grid entries must lie in (0, 1)");
  for (double v : e.omega0_grid) need(v >= 0 && v <= 1, "experiment.omega0_grid entries must lie in [0, 1]");
  for (double v : e.sinr_grid_db) need(std::isfinite(v), "experiment.sinr_grid_db entries must be finite");
  need(e.altitude_omega0 >= 0 && e.altitude_omega0 <= 1, "experiment.altitude_omega0 must lie in [0, 1]");
  return bad;
}

void require_valid(const ScenarioConfig& cfg) {
  auto issues = validate(cfg);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

namespace {

json points_to_json(const std::vector<Vec3>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x(), p.y(), p.z()});
  return arr;
}

std::vector<Vec3> points_from_json(const json& j) {
  std::vector<Vec3> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3) throw ConfigError({"AP positions must be [x, y, z] triples"});
    out.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return out;
}

// Reads the keys of one section, rejecting unknown names.
class Section {
public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError({name_ + " must be an object"});
  }

  template <typename T>
  Section& get(const char* key, T& field) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) {
      try {
        field = it->template get<T>();
      } catch (const json::exception& e) {
        throw ConfigError({name_ + "." + key + ": " + e.what()});
      }
    }
    return *this;
  }

  Section& points(const char* key, std::vector<Vec3>& field) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) field = points_from_json(*it);
    return *this;
  }

  void finish() const {
    std::vector<std::string> unknown;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) unknown.push_back("unknown key " + name_ + "." + it.key());
    if (!unknown.empty()) throw ConfigError(std::move(unknown));
  }

private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

} // namespace

void to_json(json& j, const ScenarioConfig& c) {
  const auto& g = c.geometry;
  j["seed"] = c.seed;
  j["geometry"] = {{"tx_aps", points_to_json(g.tx_aps)},
                   {"rx_aps", points_to_json(g.rx_aps)},
                   {"antennas_per_ap", g.antennas_per_ap},
                   {"num_ues", g.num_ues},
                   {"ue_area_side_m", g.ue_area_side_m},
                   {"ue_height_m", g.ue_height_m},
                   {"sensing_area_side_m", g.sensing_area_side_m},
                   {"grid_side", g.grid_side},
                   {"target_altitude_m", g.target_altitude_m}};
  const auto& rf = c.rf;
  j["rf"] = {{"carrier_hz", rf.carrier_hz},
             {"bandwidth_hz", rf.bandwidth_hz},
             {"noise_figure_db", rf.noise_figure_db},
             {"rho_max_w", rf.rho_max_w},
             {"rcs_m2", rf.rcs_m2},
             {"path_loss_ref_db", rf.path_loss_ref_db},
             {"path_loss_exponent", rf.path_loss_exponent},
             {"path_loss_ref_m", rf.path_loss_ref_m},
             {"rzf_regularizer", rf.rzf_regularizer}};
  const auto& s = c.sensing;
  j["sensing"] = {{"tau_min", s.tau_min},
                  {"tau_max", s.tau_max},
                  {"sinr_threshold_db", s.sinr_threshold_db},
                  {"p_fa", s.p_fa},
                  {"p_th", s.p_th},
                  {"weight_step", s.weight_step},
                  {"weight_iterations", s.weight_iterations}};
  const auto& o = c.solver;
  j["solver"] = {{"tol", o.tol},
                 {"max_iters", o.max_iters},
                 {"fpp_penalty", o.fpp_penalty},
                 {"slack_tol", o.slack_tol},
                 {"init", o.init}};
  j["mc"] = {{"loop_trials", c.mc.loop_trials}, {"report_trials", c.mc.report_trials}};
  const auto& e = c.experiment;
  j["experiment"] = {{"sinr_grid_db", e.sinr_grid_db},
                     {"altitude_grid_m", e.altitude_grid_m},
                     {"p_th_grid", e.p_th_grid},
                     {"omega0_grid", e.omega0_grid},
                     {"altitude_omega0", e.altitude_omega0}};
}

void from_json(const json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError({"configuration root must be an object"});
  std::set<std::string> sections{"seed", "geometry", "rf", "sensing", "solver", "mc", "experiment"};
  std::vector<std::string> unknown;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!sections.count(it.key())) unknown.push_back("unknown key " + it.key());
  if (!unknown.empty()) throw ConfigError(std::move(unknown));

  if (auto it = j.find("seed"); it != j.end()) c.seed = it->get<std::uint64_t>();
  if (auto it = j.find("geometry"); it != j.end()) {
    auto& g = c.geometry;
    Section(*it, "geometry")
        .points("tx_aps", g.tx_aps)
        .points("rx_aps", g.rx_aps)
        .get("antennas_per_ap", g.antennas_per_ap)
        .get("num_ues", g.num_ues)
        .get("ue_area_side_m", g.ue_area_side_m)
        .get("ue_height_m", g.ue_height_m)
        .get("sensing_area_side_m", g.sensing_area_side_m)
        .get("grid_side", g.grid_side)
        .get("target_altitude_m", g.target_altitude_m)
        .finish();
  }
  if (auto it = j.find("rf"); it != j.end()) {
    auto& rf = c.rf;
    Section(*it, "rf")
        .get("carrier_hz", rf.carrier_hz)
        .get("bandwidth_hz", rf.bandwidth_hz)
        .get("noise_figure_db", rf.noise_figure_db)
        .get("rho_max_w", rf.rho_max_w)
        .get("rcs_m2", rf.rcs_m2)
        .get("path_loss_ref_db", rf.path_loss_ref_db)
        .get("path_loss_exponent", rf.path_loss_exponent)
        .get("path_loss_ref_m", rf.path_loss_ref_m)
        .get("rzf_regularizer", rf.rzf_regularizer)
        .finish();
  }
  if (auto it = j.find("sensing"); it != j.end()) {
    auto& s = c.sensing;
    Section(*it, "sensing")
        .get("tau_min", s.tau_min)
        .get("tau_max", s.tau_max)
        .get("sinr_threshold_db", s.sinr_threshold_db)
        .get("p_fa", s.p_fa)
        .get("p_th", s.p_th)
        .get("weight_step", s.weight_step)
        .get("weight_iterations", s.weight_iterations)
        .finish();
  }
  if (auto it = j.find("solver"); it != j.end()) {
    auto& o = c.solver;
    Section(*it, "solver")
        .get("tol", o.tol)
        .get("max_iters", o.max_iters)
        .get("fpp_penalty", o.fpp_penalty)
        .get("slack_tol", o.slack_tol)
        .get("init", o.init)
        .finish();
  }
  if (auto it = j.find("mc"); it != j.end()) {
    Section(*it, "mc").get("loop_trials", c.mc.loop_trials).get("report_trials", c.mc.report_trials).finish();
  }
  if (auto it = j.find("experiment"); it != j.end()) {
    auto& e = c.experiment;
    Section(*it, "experiment")
        .get("sinr_grid_db", e.sinr_grid_db)
        .get("altitude_grid_m", e.altitude_grid_m)
        .get("p_th_grid", e.p_th_grid)
        .get("omega0_grid", e.omega0_grid)
        .get("altitude_omega0", e.altitude_omega0)
        .finish();
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  ScenarioConfig cfg;
  from_json(j, cfg);
  require_valid(cfg);
  return cfg;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string text = json(cfg).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

} // namespace cfisac
