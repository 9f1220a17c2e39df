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

#include "pdesmooth/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace pdesmooth {
namespace {

double block_gamma(const OptimizerState& s, const OptimizerConfig& cfg) {
  const double gamma = gamma_schedule(s.k, cfg, s.x.size());
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  return gamma;
}

// The coupling term alone is an explicit step of size eta_y / gamma; past 2
// the inner chain diverges, and scoping keeps shrinking gamma, so the inner
// step is capped at gamma.
double inner_rate(const OptimizerConfig& cfg, double gamma) { return std::min(cfg.eta_y, gamma); }

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double a : v) acc += a * a;
  return std::sqrt(acc);
}

// Energy of the control that separates the outer update from a plain
// gradient step: alpha = g_outer - grad f(x), integrated over dt = eta.
void add_control(OptimizerState& s, const Objective& f, std::span<const double> x_before,
                 std::span<const double> g_outer, double eta) {
  const Vector g = f.gradient(x_before);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += (g_outer[i] - g[i]) * (g_outer[i] - g[i]);
  s.control_energy += 0.5 * acc * eta;
}

void finish_outer(OptimizerState& s, const Objective& f, const Vector& g_outer, double eta) {
  add_control(s, f, s.x, g_outer, eta);
  for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] -= eta * g_outer[i];
  s.z = s.x;
}

// One inner Euler-Maruyama step of y coupled to `anchor`.
void inner_step(const Objective& f, Rng& rng, std::span<const double> anchor, Vector& y,
                Vector& g, double eta_y, double gamma, double beta_inv_ex) {
  f.stochastic_gradient(y, rng, g);
  const double noise = std::sqrt(eta_y * beta_inv_ex);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] -= eta_y * (g[i] + (y[i] - anchor[i]) / gamma);
    if (beta_inv_ex > 0) y[i] += noise * rng.normal();
  }
}

bool entropy_like(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg,
                  double alpha, double beta_inv_ex) {
  const std::size_t L = static_cast<std::size_t>(cfg.L);
  if (s.k % L == 0) {
    s.y = s.x;
    s.y_avg = s.x;
  }
  const double gamma = block_gamma(s, cfg);
  Vector g(s.x.size());
  inner_step(f, s.rng, s.x, s.y, g, inner_rate(cfg, gamma), gamma, beta_inv_ex);
  for (std::size_t i = 0; i < s.y.size(); ++i)
    s.y_avg[i] = alpha * s.y_avg[i] + (1.0 - alpha) * s.y[i];
  ++s.k;
  ++s.grad_evals;
  if (s.k % L != 0) return false;

  Vector g_outer(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) g_outer[i] = (s.x[i] - s.y_avg[i]) / gamma;
  finish_outer(s, f, g_outer, cfg.eta);
  s.y = s.x;
  s.y_avg = s.x;
  return true;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sgd: return "sgd";
    case Algorithm::entropy_sgd: return "entropy_sgd";
    case Algorithm::hj: return "hj";
    case Algorithm::hj2: return "hj2";
    case Algorithm::heat: return "heat";
    case Algorithm::elastic: return "elastic";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : all_algorithms())
    if (to_string(a) == name) return a;
  if (name == "entropy-sgd" || name == "esgd") return Algorithm::entropy_sgd;
  if (name == "elastic_sgd" || name == "elastic-sgd") return Algorithm::elastic;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::sgd, Algorithm::entropy_sgd, Algorithm::hj,
                                          Algorithm::hj2, Algorithm::heat, Algorithm::elastic};
  return all;
}

OptimizerConfig default_config(Algorithm a) {
  OptimizerConfig cfg;
  switch (a) {
    case Algorithm::sgd:
      cfg.L = 1;
      cfg.beta_inv_ex = 0.0;
      break;
    case Algorithm::entropy_sgd:
      break;
    case Algorithm::heat:
      cfg.beta_inv_ex = 0.0;
      break;
    case Algorithm::hj:
    case Algorithm::hj2:
      cfg.L = 5;
      cfg.beta_inv_ex = 0.0;
      cfg.alpha = 0.0;
      break;
    case Algorithm::elastic:
      cfg.n_workers = 4;
      break;
  }
  return cfg;
}

void validate(const OptimizerConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(cfg.eta > 0, "eta must be positive");
  require(cfg.eta_y > 0, "eta_y must be positive");
  require(cfg.L >= 1, "L must be at least 1");
  require(cfg.gamma0 > 0, "gamma0 must be positive");
  require(cfg.gamma1 >= 0 && cfg.gamma1 < 1, "gamma1 must lie in [0, 1)");
  require(cfg.beta_inv_ex >= 0, "beta_inv_ex must be non-negative");
  require(cfg.alpha >= 0 && cfg.alpha <= 1, "alpha must lie in [0, 1]");
  require(cfg.delta >= 0 && cfg.delta < 1, "delta must lie in [0, 1)");
  require(cfg.n_workers >= 1, "n_workers must be at least 1");
  require(cfg.anneal_factor >= 1, "anneal factor must be at least 1");
  require(cfg.anneal_period >= 0, "anneal period must be non-negative");
  require(cfg.worker_threads >= 1, "worker_threads must be at least 1");
}

double gamma_schedule(std::size_t k, const OptimizerConfig& cfg, std::size_t dim) {
  const auto L = static_cast<std::size_t>(std::max(cfg.L, 1));
  const double g0 = cfg.gamma_per_dim ? cfg.gamma0 / static_cast<double>(dim) : cfg.gamma0;
  return g0 * std::pow(1.0 - cfg.gamma1, static_cast<double>(k / L));
}

OptimizerState init_state(Algorithm a, const Vector& x0, const OptimizerConfig& cfg,
                          std::uint64_t seed) {
  validate(cfg);
  OptimizerState s;
  s.x = x0;
  s.y = x0;
  s.y_avg = x0;
  s.z = x0;
  s.grad_buffer.assign(x0.size(), 0.0);
  s.rng = Rng(derive_seed(seed, "optimizer"));
  if (a == Algorithm::hj2) std::fill(s.y.begin(), s.y.end(), 0.0);
  if (a == Algorithm::elastic) {
    s.workers.assign(static_cast<std::size_t>(cfg.n_workers), x0);
    for (int i = 0; i < cfg.n_workers; ++i)
      s.worker_rngs.emplace_back(derive_seed(seed, "worker", static_cast<std::uint64_t>(i)));
  }
  return s;
}

bool step_sgd(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg) {
  if (!(cfg.eta > 0)) throw std::invalid_argument("eta must be positive");
  Vector g(s.x.size());
  f.stochastic_gradient(s.x, s.rng, g);
  const double noise = std::sqrt(cfg.eta * cfg.beta_inv_ex);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    s.x[i] -= cfg.eta * g[i];
    if (cfg.beta_inv_ex > 0) s.x[i] += noise * s.rng.normal();
  }
  s.z = s.x;
  ++s.k;
  ++s.grad_evals;
  return true;
}

bool step_entropy_sgd(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg) {
  return entropy_like(s, f, cfg, cfg.alpha, cfg.beta_inv_ex);
}

bool step_hj(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg) {
  return entropy_like(s, f, cfg, 0.0, 0.0);
}

bool step_hj2(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg) {
  const std::size_t L = static_cast<std::size_t>(cfg.L);
  const std::size_t n = s.x.size();
  if (s.k % L == 0) std::fill(s.y.begin(), s.y.end(), 0.0);
  const double gamma = block_gamma(s, cfg);
  Vector shifted(n);
  for (std::size_t i = 0; i < n; ++i) shifted[i] = s.x[i] - s.y[i];
  f.stochastic_gradient(shifted, s.rng, s.grad_buffer);
  const double eta_y = inner_rate(cfg, gamma);
  for (std::size_t i = 0; i < n; ++i)
    s.y[i] = (1.0 - eta_y / gamma) * s.y[i] + eta_y * s.grad_buffer[i];
  ++s.k;
  ++s.grad_evals;
  if (s.k % L != 0) return false;

  finish_outer(s, f, s.grad_buffer, cfg.eta);
  std::fill(s.y.begin(), s.y.end(), 0.0);
  return true;
}

bool step_heat(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg) {
  const std::size_t L = static_cast<std::size_t>(cfg.L);
  const std::size_t n = s.x.size();
  if (s.k % L == 0) std::fill(s.grad_buffer.begin(), s.grad_buffer.end(), 0.0);
  const double sd = std::sqrt(block_gamma(s, cfg));
  Vector perturbed(n), g(n);
  for (std::size_t i = 0; i < n; ++i) perturbed[i] = s.x[i] + sd * s.rng.normal();
  f.stochastic_gradient(perturbed, s.rng, g);
  for (std::size_t i = 0; i < n; ++i) s.grad_buffer[i] += g[i];
  ++s.k;
  ++s.grad_evals;
  if (s.k % L != 0) return false;

  Vector g_outer(n);
  for (std::size_t i = 0; i < n; ++i) g_outer[i] = s.grad_buffer[i] / static_cast<double>(L);
  finish_outer(s, f, g_outer, cfg.eta);
  std::fill(s.grad_buffer.begin(), s.grad_buffer.end(), 0.0);
  return true;
}

bool step_elastic(OptimizerState& s, const Objective& f, const OptimizerConfig& cfg) {
  if (cfg.n_workers < 1 || s.workers.empty())
    throw std::invalid_argument("Elastic-SGD needs at least one worker");
  if (s.worker_rngs.size() != s.workers.size())
    throw std::invalid_argument("Elastic-SGD needs one stream per worker");
  const std::size_t L = static_cast<std::size_t>(cfg.L);
  const std::size_t n = s.x.size();
  const std::size_t np = s.workers.size();
  if (s.k % L == 0) {
    for (Vector& w : s.workers) w = s.x;
    s.y_avg = s.x;
  }
  const double gamma = block_gamma(s, cfg);

  // Workers only read the center, so any execution order gives the same result.
  auto run_workers = [&](std::size_t first, std::size_t last) {
    Vector g(n);
    for (std::size_t w = first; w < last; ++w)
      inner_step(f, s.worker_rngs[w], s.x, s.workers[w], g, inner_rate(cfg, gamma), gamma,
                 cfg.beta_inv_ex);
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.worker_threads), np);
  if (threads <= 1) {
    run_workers(0, np);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(run_workers, t * np / threads, (t + 1) * np / threads);
  }

  Vector mean(n, 0.0);
  for (std::size_t w = 0; w < np; ++w)
    for (std::size_t i = 0; i < n; ++i)
      mean[i] += (s.workers[w][i] - mean[i]) / static_cast<double>(w + 1);
  for (std::size_t i = 0; i < n; ++i)
    s.y_avg[i] = cfg.alpha * s.y_avg[i] + (1.0 - cfg.alpha) * mean[i];
  s.y = mean;
  ++s.k;
  s.grad_evals += np;
  if (s.k % L != 0) return false;

  Vector g_outer(n);
  for (std::size_t i = 0; i < n; ++i) g_outer[i] = (s.x[i] - s.y_avg[i]) / gamma;
  finish_outer(s, f, g_outer, cfg.eta);
  for (Vector& w : s.workers) w = s.x;
  s.y = s.x;
  s.y_avg = s.x;
  return true;
}

StepFn step_function(Algorithm a) {
  switch (a) {
    case Algorithm::sgd: return step_sgd;
    case Algorithm::entropy_sgd: return step_entropy_sgd;
    case Algorithm::hj: return step_hj;
    case Algorithm::hj2: return step_hj2;
    case Algorithm::heat: return step_heat;
    case Algorithm::elastic: return step_elastic;
  }
  throw std::invalid_argument("unknown algorithm");
}

StepFn wrap_momentum(StepFn step, double delta) {
  if (!(delta >= 0 && delta < 1)) throw std::invalid_argument("delta must lie in [0, 1)");
  return [step = std::move(step), delta](OptimizerState& s, const Objective& f,
                                         const OptimizerConfig& cfg) {
    const Vector x_old = s.z;
    if (!step(s, f, cfg)) return false;
    const Vector x_new = s.x;
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] = x_new[i] + delta * (x_new[i] - x_old[i]);
    s.z = x_new;
    return true;
  };
}

std::size_t grad_evals_per_outer(Algorithm a, const OptimizerConfig& cfg) {
  const auto L = static_cast<std::size_t>(cfg.L);
  switch (a) {
    case Algorithm::sgd: return 1;
    case Algorithm::elastic: return L * static_cast<std::size_t>(cfg.n_workers);
    default: return L;
  }
}

bool RunRow::same_as(const RunRow& o) const {
  return outer_step == o.outer_step && k == o.k && grad_evals == o.grad_evals &&
         effective_epoch == o.effective_epoch && loss == o.loss && grad_norm == o.grad_norm &&
         gamma == o.gamma && control_energy == o.control_energy;
}

bool RunRecord::replays(const RunRecord& o) const {
  if (algorithm != o.algorithm || seed != o.seed || !(config == o.config)) return false;
  if (rows.size() != o.rows.size() || aborted != o.aborted) return false;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!rows[i].same_as(o.rows[i])) return false;
  return terminal_x == o.terminal_x;
}

RunRecord run(Algorithm a, const Objective& f, const OptimizerConfig& cfg, std::uint64_t seed,
              std::size_t n_outer_steps, const RunOptions& opts) {
  validate(cfg);
  if (opts.log_every == 0) throw std::invalid_argument("log_every must be positive");

  double per_epoch = opts.steps_per_epoch;
  if (per_epoch <= 0) {
    per_epoch = 1.0;
    if (const auto* mlp = dynamic_cast<const TinyMlp*>(&f))
      per_epoch = static_cast<double>(mlp->n_samples()) / mlp->batch_size();
  }
  Vector x0 = opts.x0.value_or(Vector(f.dim(), 0.0));
  if (!opts.x0)
    if (const auto* mlp = dynamic_cast<const TinyMlp*>(&f)) x0 = mlp->initial_parameters();
  if (x0.size() != f.dim()) throw std::invalid_argument("initial iterate has the wrong size");

  RunRecord rec;
  rec.algorithm = a;
  rec.seed = seed;
  rec.config = cfg;
  OptimizerState s = init_state(a, x0, cfg, seed);
  StepFn step = step_function(a);
  if (cfg.delta > 0) step = wrap_momentum(std::move(step), cfg.delta);

  const auto start = std::chrono::steady_clock::now();
  auto log_row = [&](std::size_t outer, double loss) {
    RunRow r;
    r.outer_step = outer;
    r.k = s.k;
    r.grad_evals = s.grad_evals;
    r.effective_epoch = static_cast<double>(s.grad_evals) / per_epoch;
    r.loss = loss;
    r.grad_norm = norm(f.gradient(s.iterate()));
    r.gamma = gamma_schedule(s.k == 0 ? 0 : s.k - 1, cfg, f.dim());
    r.control_energy = s.control_energy;
    r.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.rows.push_back(r);
  };

  log_row(0, f.value(s.iterate()));
  OptimizerConfig current = cfg;
  for (std::size_t outer = 1; outer <= n_outer_steps; ++outer) {
    if (cfg.anneal_period > 0) {
      const double epoch = static_cast<double>(s.grad_evals) / per_epoch;
      current.eta = cfg.eta / std::pow(cfg.anneal_factor, std::floor(epoch / cfg.anneal_period));
    }
    while (!step(s, f, current)) {
    }
    const double loss = f.value(s.iterate());
    if (!std::isfinite(loss)) {
      rec.aborted = true;
      rec.abort_reason = "non-finite loss at outer step " + std::to_string(outer);
      break;
    }
    if (outer % opts.log_every == 0 || outer == n_outer_steps) log_row(outer, loss);
  }
  rec.terminal_x = s.iterate();
  return rec;
}

RunRecord run_budget(Algorithm a, const Objective& f, const OptimizerConfig& cfg,
                     std::uint64_t seed, std::size_t grad_budget, const RunOptions& opts) {
  validate(cfg);
  return run(a, f, cfg, seed, grad_budget / grad_evals_per_outer(a, cfg), opts);
}

void write_run_csv(const RunRecord& r, std::ostream& out) {
  out << "outer_step,k,grad_evals,effective_epoch,loss,grad_norm,gamma,control_energy\n";
  out << std::setprecision(17);
  for (const RunRow& row : r.rows)
    out << row.outer_step << ',' << row.k << ',' << row.grad_evals << ',' << row.effective_epoch
        << ',' << row.loss << ',' << row.grad_norm << ',' << row.gamma << ','
        << row.control_energy << '\n';
}

}  // namespace pdesmooth
