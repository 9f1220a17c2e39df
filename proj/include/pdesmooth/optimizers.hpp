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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdesmooth/objective.hpp"
#include "pdesmooth/rng.hpp"

namespace pdesmooth {

enum class Algorithm { sgd, entropy_sgd, hj, hj2, heat, elastic };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

struct OptimizerConfig {
  double eta = 0.1;           // outer step
  double eta_y = 0.1;         // inner step, capped at gamma(k) for stability
  int L = 20;                 // inner steps per outer update
  double gamma0 = 0.1;
  double gamma1 = 1e-3;
  double beta_inv_ex = 1e-8;  // extrinsic noise of the inner chain
  double alpha = 0.75;        // exponential averaging weight of <y>
  double delta = 0.9;         // momentum; 0 disables the wrapper
  int n_workers = 4;          // Elastic-SGD
  double anneal_factor = 1.0; // eta is divided by this every anneal_period epochs
  double anneal_period = 0.0; // in effective epochs; 0 disables annealing
  bool gamma_per_dim = false; // use gamma0 / dim
  int worker_threads = 1;     // Elastic-SGD workers run concurrently when > 1

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

/// Stated defaults per algorithm: Entropy-SGD L=20, alpha=0.75, eta_y=0.1,
/// beta_inv_ex=1e-8; HJ and hj2 L=5 with no extrinsic noise and the last
/// iterate in place of the average; HEAT L=20; SGD L=1.
OptimizerConfig default_config(Algorithm a);

/// gamma(k) = gamma0 (1 - gamma1)^floor(k / L).
double gamma_schedule(std::size_t k, const OptimizerConfig& cfg, std::size_t dim = 1);

struct OptimizerState {
  Vector x;      // point at which the dynamics evaluate (the lookahead under momentum)
  Vector y;      // inner iterate
  Vector y_avg;  // <y>, or <y-bar> for Elastic-SGD
  Vector z;      // outer iterate x^k; differs from x only under momentum
  std::vector<Vector> workers;
  std::size_t k = 0;  // inner iteration counter
  std::size_t grad_evals = 0;
  double control_energy = 0.0;
  Vector grad_buffer;  // HEAT: gradient sum of the block; hj2: last inner gradient
  Rng rng;
  std::vector<Rng> worker_rngs;

  const Vector& iterate() const { return z; }
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const OptimizerConfig& cfg);

OptimizerState init_state(Algorithm a, const Vector& x0, const OptimizerConfig& cfg,
                          std::uint64_t seed);

/// One step of an optimizer: advances the inner counter k by one and
/// returns true when the outer iterate was updated.
using StepFn = std::function<bool(OptimizerState&, const Objective&, const OptimizerConfig&)>;

bool step_sgd(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg);
bool step_entropy_sgd(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg);
/// Entropy-SGD inner dynamics with beta_inv_ex = 0 and <y> = last iterate.
bool step_hj(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg);
/// The y <- (1 - eta_y/gamma) y + eta_y grad f(x - y) form; the outer step
/// uses the gradient of the block's last inner step, then y resets to 0.
bool step_hj2(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg);
bool step_heat(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg);
/// Workers follow the inner Entropy-SGD dynamics coupled to the center x,
/// each with its own stream; the center moves toward <y-bar>.
bool step_elastic(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg);

StepFn step_function(Algorithm a);
/// Nesterov lookahead at outer updates: the wrapped step evaluates at the
/// lookahead point held in s.x, and after an outer update
/// s.x <- x_new + delta (x_new - x_old) while s.z keeps x_new.
StepFn wrap_momentum(StepFn step, double delta);

/// Gradient evaluations consumed by one outer update.
std::size_t grad_evals_per_outer(Algorithm a, const OptimizerConfig& cfg);

struct RunRow {
  std::size_t outer_step = 0;
  std::size_t k = 0;
  std::size_t grad_evals = 0;
  double effective_epoch = 0;
  double loss = 0;
  double grad_norm = 0;
  double gamma = 0;
  double control_energy = 0;
  double wall_clock = 0;  // seconds since the start of the run; not part of replay equality

  bool same_as(const RunRow& o) const;
};

struct RunRecord {
  Algorithm algorithm = Algorithm::sgd;
  std::uint64_t seed = 0;
  OptimizerConfig config;
  std::vector<RunRow> rows;
  Vector terminal_x;
  bool aborted = false;
  std::string abort_reason;

  /// Rows and terminal iterate equal (wall-clock ignored).
  bool replays(const RunRecord& o) const;
};

struct RunOptions {
  std::size_t log_every = 1;       // log every n-th outer update (the last one is always logged)
  double steps_per_epoch = 0;      // 0 derives it from the objective's minibatch size
  std::optional<Vector> x0;        // default: zeros, or the MLP's initialization
};

RunRecord run(Algorithm a, const Objective& f, const OptimizerConfig& cfg, std::uint64_t seed,
              std::size_t n_outer_steps, const RunOptions& opts = {});
/// Runs as many outer updates as fit in the gradient-evaluation budget.
RunRecord run_budget(Algorithm a, const Objective& f, const OptimizerConfig& cfg,
                     std::uint64_t seed, std::size_t grad_budget, const RunOptions& opts = {});

/// CSV with one row per logged outer update; wall-clock is left out so that
/// reruns produce identical files.
void write_run_csv(const RunRecord& r, std::ostream& out);

}  // namespace pdesmooth
