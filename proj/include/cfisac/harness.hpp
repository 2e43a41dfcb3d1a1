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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cfisac/config.hpp"
#include "cfisac/scheduler.hpp"

namespace cfisac {

// One sweep at one parameter point of an experiment.
struct ExperimentRecord {
  std::string series; // e.g. "sinr_db=10", "p_th=0.9", "adaptive"
  std::string param;  // swept parameter name
  double value = 0.0; // swept parameter value
  double sinr_db = 0.0;
  double altitude_m = 0.0;
  SweepResult sweep;
};

struct ExperimentRun {
  std::string name;
  std::vector<ExperimentRecord> records;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_clock_s = 0.0;
};

const std::vector<std::string>& experiment_names();

// Throws std::invalid_argument for an unknown name.
ExperimentRun run_experiment(const std::string& name, const ScenarioConfig& cfg);

// Long-format table: one row per (record, point), aggregates repeated on
// every row. A run without records yields the header only.
const std::vector<std::string>& csv_columns();
void write_csv(const ExperimentRun& run, std::ostream& os);

// Writes <name>.csv for every run plus manifest.json. Wall-clock times go
// to the manifest only, so the CSVs are reproducible byte for byte.
void emit_results(const std::vector<ExperimentRun>& runs, const ScenarioConfig& cfg,
                  const std::filesystem::path& out_dir);

using CsvRow = std::map<std::string, std::string>;
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

} // namespace cfisac
