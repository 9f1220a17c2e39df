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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pdesmooth/optimizers.hpp"
#include "pdesmooth/pde.hpp"

using namespace pdesmooth;

namespace {

OptimizerConfig plain(Algorithm a) {
  OptimizerConfig cfg = default_config(a);
  cfg.delta = 0.0;
  cfg.gamma1 = 0.0;
  return cfg;
}

// Runs until one outer update has happened and returns x_new - x_old.
double outer_drift(Algorithm a, const Objective& f, const OptimizerConfig& cfg, double x0,
                   std::uint64_t seed) {
  OptimizerState s = init_state(a, {x0}, cfg, seed);
  const StepFn step = step_function(a);
  while (!step(s, f, cfg)) {
  }
  return s.x[0] - x0;
}

double mean(const std::vector<double>& v) {
  double m = 0;
  for (double a : v) m += a;
  return m / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0;
  for (double a : v) acc += (a - m) * (a - m);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("sgd leaves x alone when the gradient vanishes") {
  auto f = make_affine({0.0, 0.0});
  OptimizerConfig cfg = plain(Algorithm::sgd);
  OptimizerState s = init_state(Algorithm::sgd, {0.3, -1.2}, cfg, 1);
  step_sgd(s, *f, cfg);
  CHECK(s.x == Vector{0.3, -1.2});
}

TEST_CASE("sgd on the unit quadratic contracts by 1 - eta") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  OptimizerConfig cfg = plain(Algorithm::sgd);
  cfg.eta = 0.1;
  OptimizerState s = init_state(Algorithm::sgd, {1.0}, cfg, 1);
  step_sgd(s, *f, cfg);
  CHECK(s.x[0] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("sgd extrinsic noise has variance eta * beta_inv_ex") {
  auto f = make_double_well(1.0);
  OptimizerConfig cfg = plain(Algorithm::sgd);
  cfg.eta = 0.1;
  cfg.beta_inv_ex = 0.01;
  std::vector<double> x1;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    OptimizerState s = init_state(Algorithm::sgd, {0.5}, cfg, seed);
    step_sgd(s, *f, cfg);
    x1.push_back(s.x[0]);
  }
  CHECK(variance(x1) == doctest::Approx(cfg.eta * cfg.beta_inv_ex).epsilon(0.05));
}

TEST_CASE("entropy-sgd is stationary without a gradient or noise") {
  auto f = make_affine({0.0});
  OptimizerConfig cfg = plain(Algorithm::entropy_sgd);
  cfg.beta_inv_ex = 0.0;
  OptimizerState s = init_state(Algorithm::entropy_sgd, {0.7}, cfg, 3);
  for (int k = 0; k < 3 * cfg.L; ++k) {
    step_entropy_sgd(s, *f, cfg);
    CHECK(s.y_avg[0] == 0.7);
  }
  CHECK(s.x[0] == 0.7);
}

TEST_CASE("entropy-sgd outer drift on the quadratic is -eta x / (1 + gamma)") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  OptimizerConfig cfg = plain(Algorithm::entropy_sgd);
  cfg.gamma0 = 1.0;
  cfg.beta_inv_ex = 0.0;
  cfg.L = 400;
  cfg.eta_y = 0.05;
  cfg.eta = 0.1;
  for (double x : {1.0, -0.4, 2.5}) {
    const double drift = outer_drift(Algorithm::entropy_sgd, *f, cfg, x, 1);
    CHECK(drift == doctest::Approx(-cfg.eta * x / 2).epsilon(0.05));
  }
}

TEST_CASE("entropy-sgd defaults") {
  const OptimizerConfig cfg = default_config(Algorithm::entropy_sgd);
  CHECK(cfg.L == 20);
  CHECK(cfg.alpha == 0.75);
  CHECK(cfg.eta_y == 0.1);
  CHECK(cfg.beta_inv_ex == 1e-8);
  CHECK(cfg.delta == 0.9);
  CHECK_NOTHROW(validate(cfg));
  CHECK(default_config(Algorithm::hj).L == 5);
  CHECK(default_config(Algorithm::hj).beta_inv_ex == 0.0);
}

TEST_CASE("non-positive gamma is rejected") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  OptimizerConfig cfg = plain(Algorithm::entropy_sgd);
  OptimizerState s = init_state(Algorithm::entropy_sgd, {1.0}, cfg, 1);
  cfg.gamma0 = 0.0;
  CHECK_THROWS_AS(step_entropy_sgd(s, *f, cfg), std::invalid_argument);
  CHECK_THROWS_AS(step_heat(s, *f, cfg), std::invalid_argument);
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("hj variants are stationary without a gradient") {
  auto f = make_affine({0.0});
  for (Algorithm a : {Algorithm::hj, Algorithm::hj2}) {
    const OptimizerConfig cfg = plain(a);
    CHECK(outer_drift(a, *f, cfg, 1.3, 2) == 0.0);
  }
}

TEST_CASE("hj variants move toward the minimum at the prox rate") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  for (Algorithm a : {Algorithm::hj, Algorithm::hj2}) {
    OptimizerConfig cfg = plain(a);
    cfg.gamma0 = 0.5;
    cfg.L = 200;
    cfg.eta_y = 0.02;
    for (double x : {1.0, -2.0}) {
      const double drift = outer_drift(a, *f, cfg, x, 1);
      CHECK(drift * x < 0);
      // Gradient of the smoothed quadratic: x / (1 + gamma).
      CHECK(drift == doctest::Approx(-cfg.eta * x / 1.5).epsilon(1e-3));
    }
  }
}

TEST_CASE("heat with vanishing gamma is a plain gradient step") {
  auto f = make_quadratic(1.0, {0.0, 0.0}, 2);
  OptimizerConfig cfg = plain(Algorithm::heat);
  cfg.gamma0 = 1e-12;
  OptimizerState heat = init_state(Algorithm::heat, {0.8, -0.3}, cfg, 4);
  OptimizerState sgd = init_state(Algorithm::sgd, {0.8, -0.3}, cfg, 4);
  while (!step_heat(heat, *f, cfg)) {
  }
  step_sgd(sgd, *f, cfg);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(heat.x[i] - sgd.x[i]) <= 1e-6);
}

TEST_CASE("heat on an affine function takes exactly the gradient step") {
  auto f = make_affine({3.0});
  for (double gamma : {1e-6, 0.1, 10.0}) {
    OptimizerConfig cfg = plain(Algorithm::heat);
    cfg.gamma0 = gamma;
    CHECK(outer_drift(Algorithm::heat, *f, cfg, 0.0, 5) == -cfg.eta * 3.0);
  }
}

TEST_CASE("heat is unbiased on the quadratic") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  OptimizerConfig cfg = plain(Algorithm::heat);
  cfg.L = 1;
  cfg.gamma0 = 0.1;
  std::vector<double> updates;
  for (std::uint64_t seed = 0; seed < 10000; ++seed)
    updates.push_back(outer_drift(Algorithm::heat, *f, cfg, 1.0, seed));
  CHECK(mean(updates) == doctest::Approx(-cfg.eta).epsilon(0.03));
}

TEST_CASE("elastic is stationary without a gradient or noise") {
  auto f = make_affine({0.0, 0.0});
  OptimizerConfig cfg = plain(Algorithm::elastic);
  cfg.beta_inv_ex = 0.0;
  OptimizerState s = init_state(Algorithm::elastic, {0.2, 0.4}, cfg, 1);
  for (int k = 0; k < 2 * cfg.L; ++k) step_elastic(s, *f, cfg);
  CHECK(s.x == Vector{0.2, 0.4});
  for (const Vector& w : s.workers) CHECK(w == Vector{0.2, 0.4});
}

TEST_CASE("elastic with identical workers and streams reproduces entropy-sgd") {
  auto f = with_gradient_noise(make_double_well(1.0), 0.5);
  OptimizerConfig cfg = plain(Algorithm::elastic);
  cfg.beta_inv_ex = 0.01;
  cfg.n_workers = 5;
  const std::uint64_t seed = 11;
  OptimizerState el = init_state(Algorithm::elastic, {0.4}, cfg, seed);
  OptimizerState es = init_state(Algorithm::entropy_sgd, {0.4}, cfg, seed);
  for (Rng& r : el.worker_rngs) r = es.rng;
  for (int k = 0; k < 10 * cfg.L; ++k) {
    CHECK(step_elastic(el, *f, cfg) == step_entropy_sgd(es, *f, cfg));
    REQUIRE(el.x == es.x);
    REQUIRE(el.y_avg == es.y_avg);
  }
}

TEST_CASE("elastic rejects an empty worker set") {
  auto f = make_affine({1.0});
  OptimizerConfig cfg = plain(Algorithm::elastic);
  cfg.n_workers = 0;
  CHECK_THROWS_AS(init_state(Algorithm::elastic, {0.0}, cfg, 1), std::invalid_argument);
  OptimizerState s = init_state(Algorithm::sgd, {0.0}, plain(Algorithm::sgd), 1);
  CHECK_THROWS_AS(step_elastic(s, *f, plain(Algorithm::elastic)), std::invalid_argument);
}

TEST_CASE("elastic center drift matches entropy-sgd on the quadratic") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  OptimizerConfig cfg = plain(Algorithm::elastic);
  cfg.gamma0 = 1.0;
  cfg.n_workers = 8;
  cfg.beta_inv_ex = 0.05;
  cfg.L = 100;
  std::vector<double> el, es;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    el.push_back(outer_drift(Algorithm::elastic, *f, cfg, 1.0, seed));
    es.push_back(outer_drift(Algorithm::entropy_sgd, *f, cfg, 1.0, seed));
  }
  CHECK(mean(el) == doctest::Approx(mean(es)).epsilon(0.05));
  // Averaging over eight workers shrinks the drift noise.
  CHECK(variance(el) < variance(es) / 4);
}

TEST_CASE("concurrent elastic workers match the sequential order bit for bit") {
  auto f = with_gradient_noise(make_quadratic(2.0, {0.5, -0.5}, 2), 0.3);
  OptimizerConfig cfg = plain(Algorithm::elastic);
  cfg.n_workers = 6;
  cfg.beta_inv_ex = 0.01;
  OptimizerConfig threaded = cfg;
  threaded.worker_threads = 3;
  OptimizerState a = init_state(Algorithm::elastic, {1.0, 1.0}, cfg, 9);
  OptimizerState b = init_state(Algorithm::elastic, {1.0, 1.0}, threaded, 9);
  for (int k = 0; k < 5 * cfg.L; ++k) {
    step_elastic(a, *f, cfg);
    step_elastic(b, *f, threaded);
  }
  CHECK(a.x == b.x);
  CHECK(a.workers == b.workers);
}

TEST_CASE("momentum with delta 0 is the unwrapped optimizer") {
  auto f = with_gradient_noise(make_double_well(1.0), 0.4);
  for (Algorithm a : all_algorithms()) {
    OptimizerConfig cfg = plain(a);
    cfg.beta_inv_ex = a == Algorithm::hj || a == Algorithm::hj2 ? 0.0 : 0.01;
    OptimizerState s1 = init_state(a, {0.3}, cfg, 21);
    OptimizerState s2 = s1;
    const StepFn bare = step_function(a);
    const StepFn wrapped = wrap_momentum(step_function(a), 0.0);
    for (int k = 0; k < 200; ++k) {
      bare(s1, *f, cfg);
      wrapped(s2, *f, cfg);
    }
    CHECK(s1.x == s2.x);
    CHECK(s1.iterate() == s2.iterate());
  }
}

TEST_CASE("momentum reaches a tolerance in fewer outer steps") {
  auto f = make_quadratic(1.0, {0.0, 0.0}, 2);
  auto steps_to = [&](double delta) {
    OptimizerConfig cfg = plain(Algorithm::sgd);
    cfg.eta = 0.01;
    OptimizerState s = init_state(Algorithm::sgd, {1.0, -1.0}, cfg, 1);
    StepFn step = wrap_momentum(step_sgd, delta);
    int n = 0;
    while (std::hypot(s.iterate()[0], s.iterate()[1]) > 1e-3 && n < 100000) {
      step(s, *f, cfg);
      ++n;
    }
    return n;
  };
  const int without = steps_to(0.0);
  const int with = steps_to(0.9);
  CHECK(with < without);
  CHECK(default_config(Algorithm::sgd).delta == 0.9);
  CHECK_THROWS_AS(wrap_momentum(step_sgd, 1.0), std::invalid_argument);
}

TEST_CASE("gamma schedule") {
  OptimizerConfig cfg;
  cfg.gamma0 = 0.1;
  cfg.gamma1 = 1e-3;
  cfg.L = 20;
  CHECK(gamma_schedule(0, cfg) == 0.1);
  CHECK(gamma_schedule(19, cfg) == 0.1);
  CHECK(gamma_schedule(100 * 20, cfg) == doctest::Approx(0.090479).epsilon(1e-5));
  double prev = gamma_schedule(0, cfg);
  for (std::size_t k = 1; k < 50000; k += 7) {
    const double g = gamma_schedule(k, cfg);
    CHECK(g <= prev);
    CHECK(g > 0);
    prev = g;
  }
  cfg.gamma_per_dim = true;
  CHECK(gamma_schedule(0, cfg, 4) == doctest::Approx(0.025));
}

TEST_CASE("runs replay from config and seed") {
  auto f = make_tiny_mlp(3, 4, 64, 8);
  for (Algorithm a : all_algorithms()) {
    OptimizerConfig cfg = default_config(a);
    cfg.gamma0 = 0.5;
    cfg.n_workers = 2;
    const RunRecord r1 = run(a, *f, cfg, 17, 6);
    const RunRecord r2 = run(a, *f, cfg, 17, 6);
    CHECK(r1.replays(r2));
    CHECK(r1.rows.size() == 7);
    for (std::size_t i = 1; i < r1.rows.size(); ++i) CHECK(r1.rows[i].k > r1.rows[i - 1].k);
    std::ostringstream c1, c2;
    write_run_csv(r1, c1);
    write_run_csv(r2, c2);
    CHECK(c1.str() == c2.str());
    CHECK(!run(a, *f, cfg, 18, 6).replays(r1));
  }
}

TEST_CASE("sgd run converges on the quadratic") {
  auto f = make_quadratic(1.0, {0.0, 0.0, 0.0}, 3);
  OptimizerConfig cfg = plain(Algorithm::sgd);
  cfg.eta = 0.1;
  RunOptions opts;
  opts.x0 = Vector{1.0, -2.0, 0.5};
  const RunRecord r = run(Algorithm::sgd, *f, cfg, 1, 500, opts);
  CHECK(!r.aborted);
  CHECK(r.rows.back().loss <= 1e-6);
  CHECK(f->value(r.terminal_x) <= 1e-6);
}

TEST_CASE("equal gradient budgets give L times fewer outer rows") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  const std::size_t budget = 2000;
  RunOptions opts;
  opts.x0 = Vector{1.0};
  const RunRecord sgd = run_budget(Algorithm::sgd, *f, plain(Algorithm::sgd), 1, budget, opts);
  const RunRecord esgd =
      run_budget(Algorithm::entropy_sgd, *f, plain(Algorithm::entropy_sgd), 1, budget, opts);
  CHECK(sgd.rows.size() - 1 == 20 * (esgd.rows.size() - 1));
  CHECK(sgd.rows.back().grad_evals == budget);
  CHECK(esgd.rows.back().grad_evals == budget);
  CHECK(sgd.rows.back().effective_epoch == esgd.rows.back().effective_epoch);
}

TEST_CASE("effective epochs follow the minibatch size") {
  auto f = make_tiny_mlp(1, 4, 64, 16);
  const RunRecord r = run(Algorithm::entropy_sgd, *f, plain(Algorithm::entropy_sgd), 1, 2);
  // 64 samples at batch 16 is four gradient evaluations per epoch.
  CHECK(r.rows.back().effective_epoch == doctest::Approx(2.0 * 20 / 4));
}

TEST_CASE("annealing divides eta at the stated period") {
  auto f = make_affine({1.0});
  OptimizerConfig cfg = plain(Algorithm::sgd);
  cfg.eta = 0.5;
  cfg.anneal_factor = 5.0;
  cfg.anneal_period = 3.0;
  RunOptions opts;
  opts.steps_per_epoch = 1.0;
  const RunRecord r = run(Algorithm::sgd, *f, cfg, 1, 7, opts);
  // Steps 1-3 use eta, 4-6 use eta/5, 7 uses eta/25.
  CHECK(r.terminal_x[0] == doctest::Approx(-(3 * 0.5 + 3 * 0.1 + 0.02)));
}

TEST_CASE("a diverging run stops with a flagged partial record") {
  auto f = make_function_1d(
      "quartic", [](double x) { return x * x * x * x; },
      [](double x) { return 4 * x * x * x; });
  OptimizerConfig cfg = plain(Algorithm::sgd);
  cfg.eta = 1.0;
  RunOptions opts;
  opts.x0 = Vector{3.0};
  const RunRecord r = run(Algorithm::sgd, *f, cfg, 1, 100, opts);
  CHECK(r.aborted);
  CHECK(!r.abort_reason.empty());
  CHECK(r.rows.size() < 101);
}

TEST_CASE("only sgd has zero control energy") {
  auto f = make_double_well(1.0);
  RunOptions opts;
  opts.x0 = Vector{0.4};
  CHECK(run(Algorithm::sgd, *f, plain(Algorithm::sgd), 1, 20, opts).rows.back().control_energy ==
        0.0);
  OptimizerConfig cfg = plain(Algorithm::entropy_sgd);
  cfg.gamma0 = 0.3;
  CHECK(run(Algorithm::entropy_sgd, *f, cfg, 1, 20, opts).rows.back().control_energy > 0.0);
}

TEST_CASE("entropy-sgd drift matches the smoothed gradient on the double well") {
  auto f = make_double_well(1.0);
  OptimizerConfig cfg = plain(Algorithm::entropy_sgd);
  cfg.gamma0 = 0.1;
  cfg.beta_inv_ex = 0.0;
  cfg.L = 800;
  cfg.eta_y = 0.01;
  cfg.eta = 0.01;
  for (double x : {-1.4, -0.3, 0.2, 0.9, 1.6}) {
    const double drift = outer_drift(Algorithm::entropy_sgd, *f, cfg, x, 1) / cfg.eta;
    const ProxResult p = prox_point(*f, std::span<const double>(&x, 1), cfg.gamma0);
    CHECK(drift == doctest::Approx(-p.gradient[0]).epsilon(0.05));
  }
}

TEST_CASE("inner chain contracts at the strong-convexity rate") {
  Matrix q(2, 2);
  q << 1.0, 0.0, 0.0, 3.0;
  auto f = make_quadratic(q, {0.2, -0.1});
  OptimizerConfig cfg = plain(Algorithm::hj);
  cfg.gamma0 = 0.5;
  cfg.eta_y = 0.01;
  cfg.L = 100000;
  const Vector x{1.0, 1.0};
  // y* solves (Q + I/gamma) y = x/gamma - p.
  const Eigen::Vector2d rhs(x[0] / 0.5 - 0.2, x[1] / 0.5 + 0.1);
  const Eigen::Vector2d ystar = (q + Matrix::Identity(2, 2) / 0.5).ldlt().solve(rhs);
  const double lambda = 1.0 + 1.0 / 0.5;

  OptimizerState s = init_state(Algorithm::hj, x, cfg, 1);
  std::vector<double> t, logd;
  for (int k = 1; k <= 300; ++k) {
    step_hj(s, *f, cfg);
    t.push_back(k * cfg.eta_y);
    logd.push_back(std::log(std::hypot(s.y[0] - ystar[0], s.y[1] - ystar[1])));
  }
  const double tm = mean(t), lm = mean(logd);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - tm) * (logd[i] - lm);
    den += (t[i] - tm) * (t[i] - tm);
  }
  CHECK(-num / den >= 0.9 * lambda);
}

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : all_algorithms()) CHECK(parse_algorithm(to_string(a)) == a);
  CHECK(parse_algorithm("entropy-sgd") == Algorithm::entropy_sgd);
  CHECK_THROWS_AS(parse_algorithm("adam"), std::invalid_argument);
}

TEST_CASE("inner steps stay stable when gamma falls below eta_y") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  OptimizerConfig cfg = plain(Algorithm::entropy_sgd);
  cfg.gamma0 = 0.01;
  cfg.eta_y = 0.1;
  cfg.eta = 0.001;
  for (Algorithm a : {Algorithm::entropy_sgd, Algorithm::hj2, Algorithm::elastic}) {
    RunOptions opts;
    opts.x0 = Vector{1.0};
    const RunRecord r = run(a, *f, cfg, 1, 50, opts);
    CHECK(!r.aborted);
    CHECK(std::abs(r.terminal_x[0]) < 1.0);
  }
}
