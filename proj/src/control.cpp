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

#include <cmath>
#include <thread>

#include "pdesmooth/analysis.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {
namespace {

struct PathOutcome {
  double v_sgd = 0, v_csgd = 0, energy = 0;
  bool exited = false;
};

// Mirror a coordinate back into [lo, hi].
bool reflect(double& x, double lo, double hi) {
  bool hit = false;
  while (x < lo || x > hi) {
    hit = true;
    x = x < lo ? 2 * lo - x : 2 * hi - x;
  }
  return hit;
}

MeanStd summarize(const std::vector<PathOutcome>& paths, std::size_t n_batches,
                  double (*pick)(const PathOutcome&)) {
  std::vector<double> all, batch_means;
  for (const PathOutcome& p : paths) all.push_back(pick(p));
  MeanStd m = mean_std(all);
  const std::size_t per = paths.size() / n_batches;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double acc = 0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) acc += all[i];
    batch_means.push_back(acc / static_cast<double>(per));
  }
  if (n_batches > 1) m.std_error = mean_std(batch_means).std_error;
  return m;
}

}  // namespace

ControlComparison control_improvement_experiment(const Objective& f, const Objective& v,
                                                 double horizon, double beta_inv,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 const ControlOptions& opts) {
  const std::size_t dim = f.dim();
  if (dim < 1 || dim > 2 || v.dim() != dim)
    throw std::invalid_argument("control experiment needs matching 1D or 2D objective and cost");
  if (horizon < 0 || beta_inv < 0) throw std::invalid_argument("horizon and beta_inv must be non-negative");
  if (opts.n_batches == 0 || n_paths < opts.n_batches || n_paths % opts.n_batches != 0)
    throw std::invalid_argument("n_paths must be a positive multiple of n_batches");
  const Vector x0 = opts.x0.empty() ? Vector(dim, 0.0) : opts.x0;
  if (x0.size() != dim) throw std::invalid_argument("x0 has the wrong dimension");

  ControlComparison out;
  out.n_paths = n_paths;
  std::vector<PathOutcome> paths(n_paths);

  if (horizon == 0.0) {
    const double v0 = v.value(x0);
    for (PathOutcome& p : paths) p = {v0, v0, 0.0, false};
  } else {
    const std::size_t n_axis = dim == 1 ? opts.grid_points : opts.grid_points_2d;
    const double w = opts.box_half_width;
    std::vector<Axis> axes;
    for (std::size_t d = 0; d < dim; ++d) axes.push_back({x0[d] - w, x0[d] + w, n_axis});
    const GridGeometry grid(axes);
    const HjbSolution hjb = solve_hjb_backward(f, v, beta_inv, horizon, grid, opts.n_snapshots);

    const double ds = horizon / static_cast<double>(opts.n_time_steps);
    const double sq = std::sqrt(beta_inv * ds);
    const std::size_t per = n_paths / opts.n_batches;
    auto run_batch = [&](std::size_t b) {
      Rng rng(derive_seed(seed, "paths", b));
      Vector xs(dim), xc(dim), gs(dim), gc(dim), alpha(dim), xi(dim);
      for (std::size_t i = b * per; i < (b + 1) * per; ++i) {
        PathOutcome& out_path = paths[i];
        xs = x0;
        xc = x0;
        for (std::size_t k = 0; k < opts.n_time_steps; ++k) {
          const double s = static_cast<double>(k) * ds;
          hjb.gradient(xc, s, alpha);
          f.gradient(xs, gs);
          f.gradient(xc, gc);
          rng.fill_normal(xi);
          for (std::size_t d = 0; d < dim; ++d) {
            out_path.energy += 0.5 * alpha[d] * alpha[d] * ds;
            xs[d] += -gs[d] * ds + sq * xi[d];
            xc[d] += -(gc[d] + alpha[d]) * ds + sq * xi[d];
            const double lo = grid.axis(d).lower, hi = grid.axis(d).upper;
            if (reflect(xs[d], lo, hi)) out_path.exited = true;
            if (reflect(xc[d], lo, hi)) out_path.exited = true;
          }
        }
        out_path.v_sgd = v.value(xs);
        out_path.v_csgd = v.value(xc);
      }
    };
    const auto threads = static_cast<std::size_t>(std::max(opts.threads, 1));
    if (threads == 1) {
      for (std::size_t b = 0; b < opts.n_batches; ++b) run_batch(b);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
          for (std::size_t b = t; b < opts.n_batches; b += threads) run_batch(b);
        });
    }
  }

  for (const PathOutcome& p : paths)
    if (p.exited) ++out.exits;
  out.valid = static_cast<double>(out.exits) <= 0.01 * static_cast<double>(n_paths);
  out.terminal_sgd = summarize(paths, opts.n_batches, [](const PathOutcome& p) { return p.v_sgd; });
  out.terminal_csgd = summarize(paths, opts.n_batches, [](const PathOutcome& p) { return p.v_csgd; });
  out.control_energy = summarize(paths, opts.n_batches, [](const PathOutcome& p) { return p.energy; });
  out.improvement =
      summarize(paths, opts.n_batches, [](const PathOutcome& p) { return p.v_sgd - p.v_csgd; });
  out.slack = summarize(paths, opts.n_batches,
                        [](const PathOutcome& p) { return p.v_sgd - p.v_csgd - p.energy; });
  out.inequality_holds = out.slack.mean >= -3.0 * out.slack.std_error;
  out.strict_gap = out.improvement.mean > 3.0 * out.improvement.std_error;
  return out;
}

CenterComparison compare_stationary_centers(const Objective& f, const OptimizerConfig& cfg,
                                            std::size_t n_seeds, std::size_t n_outer,
                                            std::size_t burn_in, std::uint64_t seed,
                                            const Vector& x0) {
  if (burn_in >= n_outer || n_seeds < 2)
    throw std::invalid_argument("need burn_in < n_outer and at least two seeds");
  const std::size_t n = f.dim();
  const Vector start = x0.empty() ? Vector(n, 0.0) : x0;
  auto centers = [&](Algorithm a) {
    std::vector<std::vector<double>> per_coord(n);
    for (std::size_t s = 0; s < n_seeds; ++s) {
      OptimizerState st = init_state(a, start, cfg, derive_seed(seed, "stationary", s));
      StepFn step = step_function(a);
      if (cfg.delta > 0) step = wrap_momentum(std::move(step), cfg.delta);
      Vector avg(n, 0.0);
      for (std::size_t k = 0; k < n_outer; ++k) {
        while (!step(st, f, cfg)) {
        }
        if (k >= burn_in)
          for (std::size_t i = 0; i < n; ++i) avg[i] += st.iterate()[i];
      }
      for (std::size_t i = 0; i < n; ++i)
        per_coord[i].push_back(avg[i] / static_cast<double>(n_outer - burn_in));
    }
    std::vector<MeanStd> out;
    for (const auto& c : per_coord) out.push_back(mean_std(c));
    return out;
  };
  CenterComparison cmp;
  cmp.elastic = centers(Algorithm::elastic);
  cmp.entropy = centers(Algorithm::entropy_sgd);
  cmp.agree = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double tol = 2.0 * std::hypot(cmp.elastic[i].std_error, cmp.entropy[i].std_error);
    if (std::abs(cmp.elastic[i].mean - cmp.entropy[i].mean) > tol) cmp.agree = false;
  }
  return cmp;
}

}  // namespace pdesmooth
