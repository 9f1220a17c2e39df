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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdesmooth/grid.hpp"
#include "pdesmooth/objective.hpp"
#include "pdesmooth/optimizers.hpp"
#include "pdesmooth/stats.hpp"

namespace pdesmooth {

// ---- invariant measure of the inner dynamics ----

class SamplerDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvariantMeasureEstimate {
  Vector mean;
  Matrix covariance;
  std::size_t n_samples = 0;
  double autocorrelation_time = 1;  // largest over the tracked series
  Vector mean_stderr;
  Vector variance_stderr;  // of the diagonal of the covariance
};

/// Euler-Maruyama on dy = -(grad f(y) + (y - x)/gamma) ds + sqrt(2 beta_inv) dW
/// at fixed x, whose stationary density is proportional to
/// exp(-beta (f(y) + |x - y|^2 / (2 gamma))). Samples after burn_in are kept.
/// Throws SamplerDivergence when |y| exceeds 1e6.
InvariantMeasureEstimate sample_invariant_measure(const Objective& f, const Vector& x,
                                                  double gamma, double beta_inv,
                                                  std::size_t n_steps, std::size_t burn_in,
                                                  std::uint64_t seed, double eta_y = 1e-3);

enum class QuadraticVariant {
  exact,            // precision beta (Q + I/gamma)
  printed,          // covariance (Q + gamma I)^-1 / beta, mean x - (Q + gamma I)^-1 grad f(x)
  printed_neumann,  // the printed form with (Q + gamma I)^-1 ~ I/gamma - Q/gamma^2
};

struct GaussianParameters {
  Vector mean;
  Matrix covariance;
  QuadraticVariant variant = QuadraticVariant::exact;
  bool in_validity_range = true;  // Neumann series needs gamma > |Q|_2
};

/// Stationary Gaussian of the inner dynamics for f(y) = y'Qy/2 + p'y.
GaussianParameters quadratic_invariant_closed_form(const Matrix& q, const Vector& p,
                                                   const Vector& x, double gamma, double beta,
                                                   QuadraticVariant variant = QuadraticVariant::exact);

std::string to_string(QuadraticVariant v);

// ---- homogenization ----

enum class DriftReference { cole_hopf, hopf_lax };

struct HomogenizationOptions {
  double eta_y = 0.01;
  std::size_t n_seeds = 32;
  std::uint64_t seed = 0;
  DriftReference reference = DriftReference::cole_hopf;
};

struct HomogenizationProbe {
  double x = 0;
  double target = 0;    // -du/dx(x, gamma)
  double estimate = 0;  // seed mean of -(x - <y>)/gamma
  double std_error = 0;
};

struct HomogenizationRow {
  double epsilon = 0;
  std::size_t inner_steps = 0;  // 1 / epsilon
  std::vector<HomogenizationProbe> probes;
  double mean_abs_deviation = 0;
  double std_error = 0;  // of mean_abs_deviation
  double max_rel_deviation = 0;
  bool ergodic = true;  // autocorrelation time of y shorter than the run
};

struct HomogenizationTable {
  std::vector<HomogenizationRow> rows;  // in the order of the requested epsilons
  /// Deviation non-increasing as epsilon shrinks, within 2 standard errors.
  bool monotone = true;
};

/// The fast variable runs 1/epsilon inner steps of size eta_y per unit of
/// slow time at a frozen probe x; the temporal average of y over that
/// window gives the drift estimate, compared with the gradient of the
/// smoothed loss u(x, gamma).
HomogenizationTable verify_homogenization(const Objective& f, std::span<const double> probes,
                                          double gamma, double beta_inv,
                                          std::span<const double> epsilons,
                                          const HomogenizationOptions& opts = {});

// ---- stochastic control ----

struct ControlOptions {
  Vector x0;                       // default: origin
  double box_half_width = 3.0;     // HJB grid [x0 - w, x0 + w] per axis
  std::size_t grid_points = 601;   // per axis in 1D
  std::size_t grid_points_2d = 201;
  std::size_t n_time_steps = 1000;
  std::size_t n_snapshots = 401;
  std::size_t n_batches = 20;
  int threads = 1;
};

struct ControlComparison {
  MeanStd terminal_csgd;
  MeanStd terminal_sgd;
  MeanStd control_energy;
  MeanStd improvement;  // paired V(sgd) - V(csgd)
  MeanStd slack;        // paired V(sgd) - V(csgd) - energy
  std::size_t n_paths = 0;
  std::size_t exits = 0;  // paths reflected at the grid box at least once
  bool valid = true;      // exits <= 1% of the paths
  bool inequality_holds = false;  // slack >= -3 stderr
  bool strict_gap = false;        // improvement > 3 stderr
};

/// Paired simulation of dx = -grad f ds + beta^{-1/2} dW and the controlled
/// dynamics with the extra drift -grad u, u solving the backward HJB with
/// terminal cost V. Both use the same Brownian increments. Standard errors
/// come from independent path batches with their own streams.
ControlComparison control_improvement_experiment(const Objective& f, const Objective& v,
                                                 double horizon, double beta_inv,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 const ControlOptions& opts = {});

// ---- Elastic-SGD and Entropy-SGD stationary centers ----

struct CenterComparison {
  std::vector<MeanStd> elastic;  // per coordinate, over seeds
  std::vector<MeanStd> entropy;
  bool agree = false;  // every coordinate within 2 combined standard errors
};

/// Time average of the outer iterate after burn_in outer updates, one
/// average per seed, for both algorithms under the same configuration.
CenterComparison compare_stationary_centers(const Objective& f, const OptimizerConfig& cfg,
                                            std::size_t n_seeds, std::size_t n_outer,
                                            std::size_t burn_in, std::uint64_t seed,
                                            const Vector& x0 = {});

// ---- semiconcavity ----

struct SemiconcavityRow {
  double t = 0;
  int axis = 0;           // -1 for the Laplacian
  double measured = 0;    // max second difference (or discrete Laplacian)
  double bound = 0;       // 1/(C^-1 + t), or 1/(C_Lap^-1 + t/n)
  double tolerance = 0;   // 10 h
  std::size_t violations = 0;
};

/// Compares the largest second differences of each u(., t_i) with the
/// semiconcavity decay of the initial constants. An infinite constant gives
/// the bound 1/t.
std::vector<SemiconcavityRow> semiconcavity_report(
    const std::vector<GridFunction>& series, std::span<const double> times,
    std::span<const double> c_axis,
    double c_laplacian = std::numeric_limits<double>::infinity());

// ---- spectra ----

double harmonic_mean(std::span<const double> v);
double arithmetic_mean(std::span<const double> v);

struct SpectrumSummary {
  Vector eigenvalues;  // ascending
  Vector diagonal;
  double hm_lambda = 0;
  double hm_diag = 0;
  double am_lambda = 0;
  Vector c_axis;           // semiconcavity constants used for the bound
  double c_laplacian = 0;
  Vector smoothed_eigenvalues;  // of the Hessian of u(., t) at x_star
  double hm_smoothed = 0;
  double hm_bound = 0;          // 1 / (t + HM(C)^-1)
  bool indefinite = false;      // means taken over the positive eigenvalues only
  bool hm_below_diag = false;
  bool hm_sandwich = false;     // min <= HM <= n min
  bool smoothed_bound_holds = false;
  std::vector<std::string> warnings;
};

struct MatrixSpectrum {
  Vector eigenvalues;
  Vector diagonal;
  double hm_lambda = 0;
  double hm_diag = 0;
};

MatrixSpectrum matrix_spectrum(const Matrix& a);

/// Spectrum of the Hessian at a local minimum and of the Hessian of the
/// smoothed loss u(., t) there, computed through the proximal point. Empty
/// c_axis uses the Hessian diagonal.
SpectrumSummary spectrum_summary(const Objective& f, const Vector& x_star, double t,
                                 std::span<const double> c_axis = {});

Matrix random_spd(std::size_t n, Rng& rng);

// ---- Figure 1: densities under smoothed drifts ----

struct Figure1Result {
  GridFunction viscous;    // terminal density under the viscous-HJ drift
  GridFunction hopf_lax;   // ... under the non-viscous HJ drift
  GridFunction sgd;        // ... under grad f
  double x_star = 0;       // grid minimizer of f
  double mass_viscous = 0;  // mass within `window` of x_star
  double mass_hopf_lax = 0;
  double mass_sgd = 0;
  double min_gap = 0;  // min(viscous - hopf_lax, hopf_lax - sgd)
};

/// Evolves a uniform density under the Fokker-Planck equation with drift
/// grad u(., gamma) for the viscous and non-viscous smoothing of f and with
/// grad f, and reports the mass near the global minimizer. 1D only.
Figure1Result figure1_densities(const Objective& f, const GridGeometry& grid, double gamma,
                                double smoothing_beta_inv, double fp_beta_inv, double horizon,
                                double window);

}  // namespace pdesmooth
