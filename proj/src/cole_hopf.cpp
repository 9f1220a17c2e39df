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

#include "pde_common.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {
namespace {

using detail::AxisLattice;

double log_sum_exp(const double* terms, std::size_t n) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) top = std::max(top, terms[i]);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(terms[i] - top);
  return top + std::log(s);
}

// Normalized Gaussian weights (or their logarithms) on the lattice offsets
// -pad..pad.
std::vector<double> gaussian_kernel(const AxisLattice& lat, double sigma, bool log_domain) {
  const std::size_t width = 2 * lat.pad + 1;
  std::vector<double> lw(width);
  for (std::size_t m = 0; m < width; ++m) {
    const double d = (static_cast<double>(m) - static_cast<double>(lat.pad)) * lat.step;
    lw[m] = -d * d / (2.0 * sigma * sigma);
  }
  const double norm = log_sum_exp(lw.data(), width);
  for (double& w : lw) w -= norm;
  if (!log_domain)
    for (double& w : lw) w = std::exp(w);
  return lw;
}

// Convolves a row-major {s0, s1} array along `axis`, keeping only the grid
// nodes of that axis in the output.
std::vector<double> convolve_axis(const std::vector<double>& in, std::size_t s0, std::size_t s1,
                                  std::size_t axis, const AxisLattice& lat, std::size_t n_out,
                                  const std::vector<double>& kernel, bool log_domain) {
  const std::size_t len = axis == 0 ? s0 : s1;
  const std::size_t lines = axis == 0 ? s1 : s0;
  const std::size_t o0 = axis == 0 ? n_out : s0;
  const std::size_t o1 = axis == 0 ? s1 : n_out;
  std::vector<double> out(o0 * o1);
  std::vector<double> line(len), terms(kernel.size());
  for (std::size_t l = 0; l < lines; ++l) {
    for (std::size_t j = 0; j < len; ++j) line[j] = axis == 0 ? in[j * s1 + l] : in[l * s1 + j];
    for (std::size_t i = 0; i < n_out; ++i) {
      const std::size_t start = lat.node(i) - lat.pad;
      double v;
      if (log_domain) {
        for (std::size_t m = 0; m < kernel.size(); ++m) terms[m] = line[start + m] + kernel[m];
        v = log_sum_exp(terms.data(), terms.size());
      } else {
        v = 0.0;
        for (std::size_t m = 0; m < kernel.size(); ++m) v += kernel[m] * line[start + m];
      }
      if (axis == 0) {
        out[i * o1 + l] = v;
      } else {
        out[l * o1 + i] = v;
      }
    }
  }
  return out;
}

void check_smoothing_args(const PdeSolveConfig& cfg, const GridGeometry& grid, double sigma) {
  if (cfg.t_final < 0) throw std::invalid_argument("t_final must be non-negative");
  if (cfg.beta_inv < 0) throw std::invalid_argument("beta_inv must be non-negative");
  if (cfg.boundary == Boundary::periodic) return;
  for (const Axis& a : grid.axes()) {
    if (6.5 * sigma > a.upper - a.lower)
      throw BoundaryTruncation("kernel width 6.5*sqrt(beta_inv t) = " +
                               std::to_string(6.5 * sigma) + " exceeds the box width " +
                               std::to_string(a.upper - a.lower));
  }
}

// Kernel pass over the whole lattice; `values` holds f (heat) or -f/beta_inv
// (Cole-Hopf) on the lattice.
GridFunction smooth(std::vector<double> values, const std::vector<AxisLattice>& lat,
                    const GridGeometry& grid, double sigma, bool log_domain) {
  if (grid.dim() == 1) {
    const auto k0 = gaussian_kernel(lat[0], sigma, log_domain);
    auto out = convolve_axis(values, lat[0].count, 1, 0, lat[0], grid.axis(0).n, k0, log_domain);
    return GridFunction(grid, std::move(out));
  }
  const auto k1 = gaussian_kernel(lat[1], sigma, log_domain);
  auto mid = convolve_axis(values, lat[0].count, lat[1].count, 1, lat[1], grid.axis(1).n, k1,
                           log_domain);
  const auto k0 = gaussian_kernel(lat[0], sigma, log_domain);
  auto out = convolve_axis(mid, lat[0].count, grid.axis(1).n, 0, lat[0], grid.axis(0).n, k0,
                           log_domain);
  return GridFunction(grid, std::move(out));
}

std::vector<AxisLattice> refined_lattice(const GridGeometry& grid, double radius, double sigma) {
  std::vector<AxisLattice> lat;
  for (const Axis& a : grid.axes()) {
    const auto ratio = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * a.spacing() / sigma)));
    lat.push_back(detail::make_lattice(a, radius, ratio));
  }
  return lat;
}

}  // namespace

GridFunction solve_viscous_hj_cole_hopf(const Objective& f, const PdeSolveConfig& cfg,
                                        const GridGeometry& grid) {
  if (f.dim() != grid.dim()) throw std::invalid_argument("objective and grid dimensions differ");
  const double t = cfg.t_final;
  const double sigma = std::sqrt(std::max(cfg.beta_inv, 0.0) * std::max(t, 0.0));
  check_smoothing_args(cfg, grid, sigma);
  if (t == 0.0) return GridFunction::sample(f, grid);
  if (cfg.beta_inv == 0.0) return solve_hj_hopf_lax(f, t, grid);

  const double beta = 1.0 / cfg.beta_inv;
  // Beyond this radius the integrand is below e^-25 of its value at y = x.
  const double radius =
      std::max(6.5 * sigma, detail::reach_radius(f, grid, t, 25.0 * cfg.beta_inv, cfg.boundary));
  const auto lat = refined_lattice(grid, radius, sigma);
  auto values = detail::sample_lattice(f, lat, grid, cfg.boundary);
  for (double& v : values) v *= -beta;
  GridFunction u = smooth(std::move(values), lat, grid, sigma, true);
  for (double& v : u.values()) v *= -cfg.beta_inv;
  detail::check_finite(u, "cole_hopf");
  return u;
}

GridFunction solve_heat(const Objective& f, const PdeSolveConfig& cfg, const GridGeometry& grid) {
  if (f.dim() != grid.dim()) throw std::invalid_argument("objective and grid dimensions differ");
  if (cfg.beta_inv <= 0) throw std::invalid_argument("heat smoothing needs beta_inv > 0");
  const double sigma = std::sqrt(cfg.beta_inv * std::max(cfg.t_final, 0.0));
  check_smoothing_args(cfg, grid, sigma);
  if (cfg.t_final == 0.0) return GridFunction::sample(f, grid);
  const auto lat = refined_lattice(grid, 7.5 * sigma, sigma);
  GridFunction v = smooth(detail::sample_lattice(f, lat, grid, cfg.boundary), lat, grid, sigma,
                          false);
  detail::check_finite(v, "heat");
  return v;
}

PointSmoothing cole_hopf_point(const Objective& f, double x, double t, double beta_inv) {
  if (f.dim() != 1) throw std::invalid_argument("cole_hopf_point needs a 1D objective");
  if (t < 0 || beta_inv < 0) throw std::invalid_argument("t and beta_inv must be non-negative");
  if (t == 0.0) {
    const std::span<const double> xs(&x, 1);
    return {f.value(xs), f.gradient(xs)[0]};
  }
  if (beta_inv == 0.0) {
    const ProxResult p = prox_point(f, std::span<const double>(&x, 1), t);
    return {p.value, p.gradient[0]};
  }
  const double sigma = std::sqrt(beta_inv * t);
  const double fx = f.value(std::span<const double>(&x, 1));
  const double slack = 25.0 * beta_inv;
  double radius = std::sqrt(2.0 * t * slack);
  double step = sigma / 16.0;
  double inf = fx;
  std::vector<double> ys, fs;
  for (int pass = 0; pass < 6; ++pass) {
    step = std::min(sigma / 16.0, radius / 2000.0);
    const auto half = static_cast<std::size_t>(std::ceil(radius / step));
    if (2 * half + 1 > 8'000'000)
      throw std::invalid_argument("cole_hopf_point: beta_inv too small for quadrature; use 0");
    ys.resize(2 * half + 1);
    fs.resize(ys.size());
    double new_inf = inf;
    for (std::size_t m = 0; m < ys.size(); ++m) {
      ys[m] = x + (static_cast<double>(m) - static_cast<double>(half)) * step;
      fs[m] = f.value(std::span<const double>(&ys[m], 1));
      new_inf = std::min(new_inf, fs[m]);
    }
    const double needed = std::sqrt(2.0 * t * (fx - new_inf + slack));
    inf = new_inf;
    if (needed <= radius * (1.0 + 1e-12)) break;
    radius = needed;
  }
  std::vector<double> logs(ys.size()), kern(ys.size());
  for (std::size_t m = 0; m < ys.size(); ++m) {
    const double d = x - ys[m];
    kern[m] = -d * d / (2.0 * sigma * sigma);
    logs[m] = kern[m] - fs[m] / beta_inv;
  }
  const double lse = log_sum_exp(logs.data(), logs.size());
  double grad = 0.0;
  for (std::size_t m = 0; m < ys.size(); ++m) grad += std::exp(logs[m] - lse) * (x - ys[m]) / t;
  const double value = -beta_inv * (lse - log_sum_exp(kern.data(), kern.size()));
  return {value, grad};
}

}  // namespace pdesmooth
