// Copyright 2026 The pdesmooth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdesmooth/config.hpp"
#include "pdesmooth/optimizers.hpp"
#include "pdesmooth/stats.hpp"

namespace pdesmooth {

struct ExperimentOutcome {
  std::vector<std::string> failures;  // failing assertions; empty means success
  std::vector<std::string> files;     // everything written, relative to cfg.out
  nlohmann::json summary;

  bool passed() const { return failures.empty(); }
  int exit_code() const { return passed() ? 0 : 1; }
};

/// Row of a ComparisonTable: final loss over seeds at a common budget.
struct ComparisonRow {
  std::string algorithm;
  MeanStd final_loss;
  double effective_epochs = 0;
  std::size_t grad_evals = 0;
  double wall_time = 0;  // seconds summed over repeats; kept out of the CSV
};

/// Sorted by algorithm name. Wall time is left out so reruns are byte-identical.
void write_comparison_csv(std::vector<ComparisonRow> rows, const std::string& path);

/// Runs the experiment named by cfg.kind and writes its artifacts under
/// cfg.out: manifest.json with the resolved configuration, the kind's CSV
/// tables, summary.json and, when cfg.plot is set, plot.svg. Progress goes
/// to `log`. Throws ConfigError for an invalid configuration.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Manifest contents; parse_config_json(manifest["config"]) gives back cfg.
nlohmann::json make_manifest(const ExperimentConfig& cfg);

}  // namespace pdesmooth
