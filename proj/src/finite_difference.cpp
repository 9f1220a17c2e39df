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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pde_common.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {
namespace {

// Explicit Godunov scheme for w_t = -sum_k [ (p_k + a_k)^2 - a_k^2 ] / 2
// + (beta_inv/2) Lap w. Without drift (a = 0) this is the viscous HJ
// equation; with a = grad f it is the HJB equation in reversed time.
class GodunovScheme {
 public:
  GodunovScheme(const GridGeometry& g, Boundary boundary, double beta_inv,
                std::vector<std::vector<double>> drift = {})
      : g_(g), boundary_(boundary), beta_inv_(beta_inv), drift_(std::move(drift)) {}

  double time_step_limit(const std::vector<double>& u) const {
    double worst = 0.0;
    for (std::size_t flat = 0; flat < u.size(); ++flat) {
      double rate = 0.0;
      for (std::size_t k = 0; k < g_.dim(); ++k) {
        const auto [l, r] = neighbours(u, flat, k);
        const double h = g_.spacing(k);
        const double a = drift_.empty() ? 0.0 : drift_[k][flat];
        const double pm = (u[flat] - l) / h + a, pp = (r - u[flat]) / h + a;
        rate += std::max(std::abs(pm), std::abs(pp)) / h + beta_inv_ / (h * h);
      }
      worst = std::max(worst, rate);
    }
    return worst > 0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  }

  void step(std::vector<double>& u, double dt, std::vector<double>& scratch) const {
    scratch.resize(u.size());
    for (std::size_t flat = 0; flat < u.size(); ++flat) {
      double ham = 0.0, lap = 0.0;
      for (std::size_t k = 0; k < g_.dim(); ++k) {
        const auto [l, r] = neighbours(u, flat, k);
        const double h = g_.spacing(k);
        const double a = drift_.empty() ? 0.0 : drift_[k][flat];
        const double pm = (u[flat] - l) / h + a, pp = (r - u[flat]) / h + a;
        const double up = std::max(pm, 0.0), down = std::min(pp, 0.0);
        ham += 0.5 * (std::max(up * up, down * down) - a * a);
        lap += (r - 2.0 * u[flat] + l) / (h * h);
      }
      scratch[flat] = u[flat] - dt * ham + dt * 0.5 * beta_inv_ * lap;
    }
    u.swap(scratch);
  }

 private:
  std::pair<double, double> neighbours(const std::vector<double>& u, std::size_t flat,
                                       std::size_t k) const {
    const std::size_t n = g_.axis(k).n;
    const std::size_t stride = (g_.dim() == 2 && k == 0) ? g_.axis(1).n : 1;
    const std::size_t i = g_.dim() == 1 ? flat : (k == 0 ? flat / g_.axis(1).n : flat % g_.axis(1).n);
    double l, r;
    if (i > 0) {
      l = u[flat - stride];
    } else if (boundary_ == Boundary::periodic) {
      l = u[flat + (n - 2) * stride];
    } else {
      l = 2.0 * u[flat] - u[flat + stride];
    }
    if (i + 1 < n) {
      r = u[flat + stride];
    } else if (boundary_ == Boundary::periodic) {
      r = u[flat - (n - 2) * stride];
    } else {
      r = 2.0 * u[flat] - u[flat - stride];
    }
    return {l, r};
  }

  const GridGeometry& g_;
  Boundary boundary_;
  double beta_inv_;
  std::vector<std::vector<double>> drift_;
};

// Advances u over [0, duration]. A positive `dt` is used as given (shortened
// to land on the end time) and must satisfy the stability limit.
void advance(const GodunovScheme& scheme, GridFunction& u, double duration, double dt,
             double fraction = 0.9) {
  std::vector<double> vals(u.values().begin(), u.values().end()), scratch;
  double t = 0.0;
  long steps = 0;
  while (t < duration) {
    const double limit = scheme.time_step_limit(vals);
    double h;
    if (dt > 0) {
      if (dt > limit * (1.0 + 1e-12))
        throw CflViolation("time step " + std::to_string(dt) + " exceeds the monotone limit " +
                           std::to_string(limit) + " (dt <= h^2/(beta_inv + h max|grad u|))");
      h = dt;
    } else {
      h = fraction * limit;
    }
    if (t + h >= duration * (1.0 - 1e-14)) h = duration - t;
    scheme.step(vals, h, scratch);
    t = (t + h >= duration * (1.0 - 1e-14)) ? duration : t + h;
    if (++steps % 64 == 0 || t >= duration) {
      for (std::size_t k = 0; k < vals.size(); ++k) {
        if (!std::isfinite(vals[k])) {
          const auto p = u.geometry().point(k);
          throw NumericalBreakdown("monotone FD produced a non-finite value at x = " +
                                   std::to_string(p[0]) + " after " + std::to_string(steps) +
                                   " steps (t = " + std::to_string(t) + ")");
        }
      }
    }
  }
  std::copy(vals.begin(), vals.end(), u.values().begin());
}

void check_fd_config(const PdeSolveConfig& cfg) {
  if (cfg.t_final < 0) throw std::invalid_argument("t_final must be non-negative");
  if (cfg.beta_inv < 0) throw std::invalid_argument("beta_inv must be non-negative");
  if (cfg.dt < 0) throw std::invalid_argument("dt must be non-negative");
  if (!(cfg.cfl_fraction > 0 && cfg.cfl_fraction <= 1))
    throw std::invalid_argument("cfl_fraction must lie in (0, 1]");
}

}  // namespace

double monotone_time_step_limit(const GridFunction& u, double beta_inv, Boundary boundary) {
  GodunovScheme scheme(u.geometry(), boundary, beta_inv);
  return scheme.time_step_limit(std::vector<double>(u.values().begin(), u.values().end()));
}

GridFunction solve_hj_monotone_fd(const GridFunction& initial, const PdeSolveConfig& cfg) {
  check_fd_config(cfg);
  GridFunction u = initial;
  if (cfg.t_final == 0.0) return u;
  GodunovScheme scheme(u.geometry(), cfg.boundary, cfg.beta_inv);
  advance(scheme, u, cfg.t_final, cfg.dt, cfg.cfl_fraction);
  return u;
}

GridFunction solve_hj_monotone_fd(const Objective& f, const PdeSolveConfig& cfg,
                                  const GridGeometry& grid) {
  if (f.dim() != grid.dim()) throw std::invalid_argument("objective and grid dimensions differ");
  check_fd_config(cfg);
  if (cfg.t_final == 0.0 || cfg.boundary == Boundary::periodic)
    return solve_hj_monotone_fd(GridFunction::sample(f, grid), cfg);
  // Solve on a box wide enough that the ghost cells cannot reach the grid.
  const double radius = detail::reach_radius(f, grid, cfg.t_final, 25.0 * cfg.beta_inv,
                                             Boundary::extrapolating);
  std::vector<Axis> padded;
  std::vector<std::size_t> pad;
  for (const Axis& a : grid.axes()) {
    const double h = a.spacing();
    pad.push_back(static_cast<std::size_t>(std::ceil(radius / h)) + 3);
    const double w = static_cast<double>(pad.back()) * h;
    padded.push_back(Axis{a.lower - w, a.upper + w, a.n + 2 * pad.back()});
  }
  GridFunction big = GridFunction::sample(f, GridGeometry(padded));
  big = solve_hj_monotone_fd(big, cfg);
  GridFunction u(grid);
  for (std::size_t i = 0; i < grid.axis(0).n; ++i) {
    if (grid.dim() == 1) {
      u.at(i) = big.at(i + pad[0]);
    } else {
      for (std::size_t j = 0; j < grid.axis(1).n; ++j) u.at(i, j) = big.at(i + pad[0], j + pad[1]);
    }
  }
  return u;
}

HjbSolution::HjbSolution(GridGeometry geometry, double horizon, std::vector<GridFunction> values)
    : geometry_(std::move(geometry)), horizon_(horizon), values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("HjbSolution needs at least one snapshot");
  for (const GridFunction& v : values_) {
    std::vector<GridFunction> g;
    for (std::size_t k = 0; k < geometry_.dim(); ++k) g.push_back(v.derivative(k));
    gradients_.push_back(std::move(g));
  }
}

std::pair<std::size_t, double> HjbSolution::time_slot(double s) const {
  if (values_.size() == 1 || horizon_ <= 0) return {0, 0.0};
  const double pos = std::clamp(s / horizon_, 0.0, 1.0) * static_cast<double>(values_.size() - 1);
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= values_.size() - 1) i = values_.size() - 2;
  return {i, pos - static_cast<double>(i)};
}

double HjbSolution::value(std::span<const double> x, double s) const {
  const auto [i, w] = time_slot(s);
  const double v0 = values_[i].interpolate(x);
  return w == 0.0 ? v0 : (1.0 - w) * v0 + w * values_[i + 1].interpolate(x);
}

void HjbSolution::gradient(std::span<const double> x, double s, std::span<double> g) const {
  const auto [i, w] = time_slot(s);
  for (std::size_t k = 0; k < geometry_.dim(); ++k) {
    const double g0 = gradients_[i][k].interpolate(x);
    g[k] = w == 0.0 ? g0 : (1.0 - w) * g0 + w * gradients_[i + 1][k].interpolate(x);
  }
}

HjbSolution solve_hjb_backward(const Objective& f, const Objective& terminal, double beta_inv,
                               double horizon, const GridGeometry& grid, std::size_t n_snapshots) {
  if (f.dim() != grid.dim() || terminal.dim() != grid.dim())
    throw std::invalid_argument("objective, terminal cost and grid dimensions differ");
  if (horizon < 0 || beta_inv < 0) throw std::invalid_argument("horizon and beta_inv must be non-negative");
  GridFunction w = GridFunction::sample(terminal, grid);
  if (horizon == 0.0 || n_snapshots < 2) return HjbSolution(grid, horizon, {w});
  std::vector<std::vector<double>> drift(grid.dim(), std::vector<double>(grid.size()));
  Vector g(grid.dim());
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto p = grid.point(flat);
    f.gradient(std::span<const double>(p.data(), grid.dim()), g);
    for (std::size_t k = 0; k < grid.dim(); ++k) drift[k][flat] = g[k];
  }
  GodunovScheme scheme(grid, Boundary::extrapolating, beta_inv, std::move(drift));
  // Snapshot j holds forward time s_j = j T / (n - 1); the solve runs from s = T down.
  std::vector<GridFunction> snaps(n_snapshots);
  snaps.back() = w;
  const double ds = horizon / static_cast<double>(n_snapshots - 1);
  for (std::size_t j = n_snapshots - 1; j-- > 0;) {
    advance(scheme, w, ds, 0.0);
    snaps[j] = w;
  }
  return HjbSolution(grid, horizon, std::move(snaps));
}

}  // namespace pdesmooth
