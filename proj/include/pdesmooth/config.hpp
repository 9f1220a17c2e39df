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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pdesmooth/optimizers.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {

enum class ExperimentKind {
  solve_pde,
  optimize,
  compare,
  verify_homogenization,
  control_improvement,
  spectrum,
  invariant_measure,
  reproduce_figure1,
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view name);

/// Configuration error tied to one key, e.g. "optimizer.gamm0".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Optimizer keys given explicitly; everything else falls back to the
/// per-algorithm defaults of default_config().
struct OptimizerOverrides {
  std::optional<double> eta, eta_y, gamma0, gamma1, beta_inv_ex, alpha, delta;
  std::optional<double> anneal_factor, anneal_period;
  std::optional<int> L, workers, worker_threads;
  std::optional<bool> gamma_per_dim;

  friend bool operator==(const OptimizerOverrides&, const OptimizerOverrides&) = default;
};

OptimizerConfig resolve(Algorithm a, const OptimizerOverrides& o);

struct AnalysisSettings {
  double gamma = 1.0;
  double beta_inv = 1.0;
  Vector x;                    // probe point (invariant measure, control start, spectrum)
  std::vector<double> probes;  // homogenization probe points
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::size_t n_steps = 1'010'000;
  std::size_t burn_in = 10'000;
  double eta_y = 2e-3;
  std::size_t n_paths = 10'000;
  double horizon = 2.0;
  std::size_t n_seeds = 32;
  std::size_t trials = 100;
  int matrix_dim = 8;
  double window = 0.4;  // Figure-1 mass window half-width
  std::string reference = "cole_hopf";  // homogenization drift reference: cole_hopf or hopf_lax
  double tolerance = 0.05;  // homogenization relative error at the smallest epsilon

  friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

struct PdeSettings {
  PdeSolveConfig solve;
  std::size_t grid_n = 401;
  double lower = -2.0;
  double upper = 2.0;
  int dim = 1;

  GridGeometry geometry() const;
  friend bool operator==(const PdeSettings& a, const PdeSettings& b);
};

struct ExperimentConfig {
  std::optional<ExperimentKind> kind;
  std::string objective = "quadratic_c1_n2";
  std::vector<Algorithm> algorithms{Algorithm::sgd};
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string run_csv;  // optional explicit path for the first run's CSV
  int repeat = 1;
  std::size_t steps = 1000;  // outer updates per run
  std::size_t budget = 0;    // gradient evaluations per run; replaces steps when > 0
  std::size_t log_every = 1;
  int threads = 1;
  bool deterministic = false;
  bool plot = true;
  OptimizerOverrides optimizer;
  PdeSettings pde;
  AnalysisSettings analysis;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Flat sections of `key = value` lines; `#` starts a comment.
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base = {});
ExperimentConfig parse_config_json(const nlohmann::json& j, ExperimentConfig base = {});
/// JSON when the file ends in .json or starts with '{', key-value text otherwise.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Sets one "section.key" from its textual value, as a command-line flag would.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Range checks across fields; throws ConfigError naming the key.
void validate(const ExperimentConfig& cfg);
/// Throws ConfigError("experiment.kind") when no kind was given.
ExperimentKind require_kind(const ExperimentConfig& cfg);

/// Every key with its value; optimizer keys left to the algorithm default are null.
nlohmann::json to_json(const ExperimentConfig& cfg);
std::string to_text(const ExperimentConfig& cfg);

/// Keys in schema order with a one-line description, for --help output and docs.
std::vector<std::pair<std::string, std::string>> config_keys();

}  // namespace pdesmooth
