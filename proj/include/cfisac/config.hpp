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

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfisac/types.hpp"

namespace cfisac {

struct GeometryConfig {
  std::vector<Vec3> tx_aps;
  std::vector<Vec3> rx_aps;
  int antennas_per_ap = 16;
  int num_ues = 8;
  double ue_area_side_m = 500.0;
  double ue_height_m = 1.5;
  double sensing_area_side_m = 400.0;
  int grid_side = 10; // S = grid_side^2 sensing points
  double target_altitude_m = 100.0;

  // Five transmit APs (centre + four mid-edge) at 20 m, sixteen receive APs
  // on a 4x4 lattice at 50 m; coordinates relative to the area centre.
  static std::vector<Vec3> default_tx_aps();
  static std::vector<Vec3> default_rx_aps();
};

struct RfConfig {
  double carrier_hz = 1.9e9;
  double bandwidth_hz = 20e6;
  double noise_figure_db = 7.0;
  double rho_max_w = 1.0;
  double rcs_m2 = 1e-3; // effective mean RCS incl. unmodelled losses
  double path_loss_ref_db = 30.5;
  double path_loss_exponent = 3.67;
  double path_loss_ref_m = 1.0;
  // Negative means "use K * noise / rho_max".
  double rzf_regularizer = -1.0;
};

struct SensingConfig {
  double tau_min = 50.0;
  double tau_max = 300.0;
  double sinr_threshold_db = 10.0;
  double p_fa = 0.1;
  double p_th = 0.9;
  double weight_step = 0.05;
  int weight_iterations = 20;
};

struct SolverConfig {
  double tol = 1e-4;
  int max_iters = 50;
  double fpp_penalty = 1e3;
  double slack_tol = 1e-8;
  std::string init = "multi_start"; // multi_start | tau_max | tau_min
};

struct MonteCarloConfig {
  std::uint64_t loop_trials = 10000;
  std::uint64_t report_trials = 100000;
};

struct ExperimentConfig {
  std::vector<double> sinr_grid_db{5.0, 10.0, 15.0};
  std::vector<double> altitude_grid_m{60.0, 100.0, 150.0, 200.0, 250.0, 300.0};
  std::vector<double> p_th_grid{0.8, 0.9, 0.99};
  // Empty means the adaptive-weight grid (step, 2*step, ..., 1).
  std::vector<double> omega0_grid;
  double altitude_omega0 = 1.0;
};

struct ScenarioConfig {
  GeometryConfig geometry;
  RfConfig rf;
  SensingConfig sensing;
  SolverConfig solver;
  MonteCarloConfig mc;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;

  ScenarioConfig();

  std::size_t num_points() const {
    return static_cast<std::size_t>(geometry.grid_side) * geometry.grid_side;
  }
  double symbol_rate() const { return rf.bandwidth_hz; }
  std::vector<double> omega0_grid() const;
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

private:
  std::vector<std::string> issues_;
};

// Empty result means the configuration is valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);
void require_valid(const ScenarioConfig& cfg);

void to_json(nlohmann::json& j, const ScenarioConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ScenarioConfig& cfg);

ScenarioConfig load_config(const std::filesystem::path& path);

// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const ScenarioConfig& cfg);
std::string hex64(std::uint64_t v);

} // namespace cfisac
