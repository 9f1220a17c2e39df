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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdesmooth/grid.hpp"
#include "pdesmooth/objective.hpp"

namespace pdesmooth {

enum class Scheme { cole_hopf, hopf_lax, monotone_fd, heat };
enum class Boundary { extrapolating, periodic };

std::string to_string(Scheme s);
std::string to_string(Boundary b);
/// Accepts the names printed by to_string plus "fd" for monotone_fd.
Scheme parse_scheme(std::string_view name);
Boundary parse_boundary(std::string_view name);

struct PdeSolveConfig {
  double beta_inv = 0.1;
  double t_final = 1.0;
  double dt = 0.0;  // 0 selects cfl_fraction times the stability limit
  double cfl_fraction = 0.9;
  Scheme scheme = Scheme::cole_hopf;
  Boundary boundary = Boundary::extrapolating;
};

/// The requested explicit time step exceeds the monotonicity limit.
class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The smoothing kernel does not fit the grid box.
class BoundaryTruncation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver produced a NaN or a negative density.
class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dispatches on cfg.scheme.
GridFunction solve(const Objective& f, const PdeSolveConfig& cfg, const GridGeometry& grid);

/// u = -beta_inv log(G * exp(-f / beta_inv)) with G the Gaussian of variance
/// beta_inv t, by log-sum-exp quadrature on a lattice that contains the grid.
/// f is sampled outside the box as far as the integrand has mass. A zero
/// beta_inv is routed to solve_hj_hopf_lax.
GridFunction solve_viscous_hj_cole_hopf(const Objective& f, const PdeSolveConfig& cfg,
                                        const GridGeometry& grid);

/// Value and gradient of the viscous solution at a single point of a 1D
/// objective; the gradient is the Gibbs average of (x - y) / t.
struct PointSmoothing {
  double value;
  double gradient;
};
PointSmoothing cole_hopf_point(const Objective& f, double x, double t, double beta_inv);

/// Exact grid inf-convolution min_y f(y) + |x - y|^2 / (2t). The minimum
/// runs over a lattice that extends the grid far enough that the minimizer
/// of every grid point is included.
GridFunction solve_hj_hopf_lax(const Objective& f, double t, const GridGeometry& grid);

/// Inf-convolution of grid values, with linearly extrapolated ghost cells
/// supplying candidates outside the box.
GridFunction hopf_lax_transform(const GridFunction& f, double t);

struct ProxResult {
  Vector y;          // argmin_y f(y) + |x - y|^2 / (2t)
  Vector gradient;   // (x - y) / t, the gradient of the Hopf-Lax solution
  Vector grad_f;     // grad f(y)
  double value = 0;  // the Hopf-Lax value at x
  bool unique = true;
  Vector other;  // a second minimizer with the same value when !unique
};
ProxResult prox_point(const Objective& f, std::span<const double> x, double t);

/// Explicit Godunov upwind scheme for u_t = -|grad u|^2 / 2 + (beta_inv/2) Lap u.
GridFunction solve_hj_monotone_fd(const Objective& f, const PdeSolveConfig& cfg,
                                  const GridGeometry& grid);
/// Same scheme on given initial data, with the grid boundary as the
/// computational boundary.
GridFunction solve_hj_monotone_fd(const GridFunction& initial, const PdeSolveConfig& cfg);
/// Largest monotone time step for the current data: 1 / sum_k(max|p_k|/h_k
/// + beta_inv/h_k^2) with p_k the one-sided differences.
double monotone_time_step_limit(const GridFunction& u, double beta_inv,
                                Boundary boundary = Boundary::extrapolating);

/// v = G * f with G the Gaussian of variance beta_inv t.
GridFunction solve_heat(const Objective& f, const PdeSolveConfig& cfg, const GridGeometry& grid);

/// Conservative upwind finite-volume evolution of
/// rho_t = div(drift rho) + (beta_inv/2) Lap rho with zero-flux walls.
/// `drift` holds one component per axis, sampled on the density grid.
GridFunction evolve_fokker_planck(const std::vector<GridFunction>& drift,
                                  const GridFunction& rho0, double beta_inv, double t_final,
                                  double dt = 0.0);
GridFunction evolve_fokker_planck(const GridFunction& drift, const GridFunction& rho0,
                                  double beta_inv, double t_final, double dt = 0.0);
double fokker_planck_time_step_limit(const std::vector<GridFunction>& drift, double beta_inv);

struct BurgersResult {
  double p = 0;
  bool converged = false;
  int iterations = 0;
};
/// Solves p = f'(x - t p) by damped iteration. Converged requires the
/// residual to vanish within 1000 iterations and 1 + t f''(x - t p) > 0.
BurgersResult burgers_characteristic_check(const Objective& f, double x, double t);

struct Interval {
  double lower;
  double upper;
};
/// Widest interval around the local minimum x_min on which the second
/// difference of u is >= -1e-10.
Interval convexity_interval(const GridFunction& u, double x_min);

/// Backward solution of -u_s = -grad f . grad u - |grad u|^2/2 + (beta_inv/2) Lap u,
/// u(., T) = V, stored at evenly spaced times for interpolation in (x, s).
class HjbSolution {
 public:
  HjbSolution(GridGeometry geometry, double horizon, std::vector<GridFunction> values);

  const GridGeometry& geometry() const { return geometry_; }
  double horizon() const { return horizon_; }
  std::size_t snapshots() const { return values_.size(); }
  const GridFunction& snapshot(std::size_t i) const { return values_[i]; }

  double value(std::span<const double> x, double s) const;
  void gradient(std::span<const double> x, double s, std::span<double> g) const;

 private:
  std::pair<std::size_t, double> time_slot(double s) const;

  GridGeometry geometry_;
  double horizon_;
  std::vector<GridFunction> values_;
  std::vector<std::vector<GridFunction>> gradients_;
};

HjbSolution solve_hjb_backward(const Objective& f, const Objective& terminal, double beta_inv,
                               double horizon, const GridGeometry& grid,
                               std::size_t n_snapshots = 401);

}  // namespace pdesmooth
