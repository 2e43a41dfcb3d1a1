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

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "cfisac/config.hpp"
#include "cfisac/harness.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<std::uint64_t> trials;
};

int print_issues(const cfisac::ConfigError& e) {
  std::cerr << "invalid configuration:\n";
  for (const auto& issue : e.issues()) std::cerr << "  - " << issue << '\n';
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfisac: cell-free ISAC drone detection simulator"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string experiment;
  auto* run = app.add_subcommand("run", "Run an experiment (or 'all') and write CSV + manifest");
  run->add_option("experiment", experiment, "coverage_vs_time | coverage_vs_altitude | blocklength_map | "
                                            "table1_comparison | all")
      ->required();
  run->add_option("--config", opt.config, "JSON scenario file (defaults used when omitted)");
  run->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run->add_option("--seed", opt.seed, "Master seed override");
  run->add_option("--threads", opt.threads, "OpenMP worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--trials", opt.trials, "Monte Carlo trials per evaluation (loop and report)")
      ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario file and print its hash");
  validate->add_option("config", validate_path, "JSON scenario file")->required();

  auto* defaults = app.add_subcommand("defaults", "Print the default scenario as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*defaults) {
      std::cout << nlohmann::json(cfisac::ScenarioConfig{}).dump(2) << '\n';
      return 0;
    }

    if (*validate) {
      const auto cfg = cfisac::load_config(validate_path);
      std::cout << "valid, config hash " << cfisac::hex64(cfisac::config_hash(cfg)) << '\n';
      return 0;
    }

    cfisac::ScenarioConfig cfg = opt.config.empty() ? cfisac::ScenarioConfig{} : cfisac::load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.trials) cfg.mc.loop_trials = cfg.mc.report_trials = *opt.trials;
    cfisac::require_valid(cfg);
    if (opt.threads > 0) omp_set_num_threads(opt.threads);

    std::vector<std::string> names;
    if (experiment == "all")
      names = cfisac::experiment_names();
    else
      names.push_back(experiment);

    std::vector<cfisac::ExperimentRun> runs;
    for (const auto& name : names) {
      std::cerr << "running " << name << " ..." << std::flush;
      runs.push_back(cfisac::run_experiment(name, cfg));
      std::cerr << " done in " << runs.back().wall_clock_s << " s\n";
      for (const auto& rec : runs.back().records)
        std::cerr << "  " << rec.series << ' ' << rec.param << '=' << rec.value << "  coverage "
                  << rec.sweep.coverage_pct << " %  AoS " << rec.sweep.aos_total_s * 1e3 << " ms\n";
    }
    cfisac::emit_results(runs, cfg, opt.out);
    std::cerr << "wrote " << opt.out << '\n';
    return 0;
  } catch (const cfisac::ConfigError& e) {
    return print_issues(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
