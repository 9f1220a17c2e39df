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

#include "pde_common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pdesmooth {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::cole_hopf: return "cole_hopf";
    case Scheme::hopf_lax: return "hopf_lax";
    case Scheme::monotone_fd: return "monotone_fd";
    case Scheme::heat: return "heat";
  }
  return "?";
}

std::string to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "extrapolating";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "cole_hopf") return Scheme::cole_hopf;
  if (name == "hopf_lax") return Scheme::hopf_lax;
  if (name == "monotone_fd" || name == "fd") return Scheme::monotone_fd;
  if (name == "heat") return Scheme::heat;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "extrapolating") return Boundary::extrapolating;
  if (name == "periodic") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + std::string(name) + "'");
}

GridFunction solve(const Objective& f, const PdeSolveConfig& cfg, const GridGeometry& grid) {
  switch (cfg.scheme) {
    case Scheme::cole_hopf: return solve_viscous_hj_cole_hopf(f, cfg, grid);
    case Scheme::hopf_lax: return solve_hj_hopf_lax(f, cfg.t_final, grid);
    case Scheme::monotone_fd: return solve_hj_monotone_fd(f, cfg, grid);
    case Scheme::heat: return solve_heat(f, cfg, grid);
  }
  throw std::invalid_argument("unknown scheme");
}

namespace detail {

AxisLattice make_lattice(const Axis& axis, double radius, std::size_t ratio) {
  AxisLattice lat;
  lat.ratio = std::max<std::size_t>(1, ratio);
  lat.step = axis.spacing() / static_cast<double>(lat.ratio);
  lat.pad = static_cast<std::size_t>(std::ceil(radius / lat.step - 1e-9));
  lat.count = (axis.n - 1) * lat.ratio + 1 + 2 * lat.pad;
  lat.origin = axis.lower - static_cast<double>(lat.pad) * lat.step;
  return lat;
}

double wrap(double x, const Axis& axis) {
  const double period = axis.upper - axis.lower;
  double r = std::fmod(x - axis.lower, period);
  if (r < 0) r += period;
  return axis.lower + r;
}

std::vector<double> sample_lattice(const Objective& f, const std::vector<AxisLattice>& lattice,
                                   const GridGeometry& grid, Boundary boundary) {
  auto coord = [&](std::size_t k, std::size_t j) {
    const double x = lattice[k].coord(j);
    return boundary == Boundary::periodic ? wrap(x, grid.axis(k)) : x;
  };
  std::vector<double> out;
  if (grid.dim() == 1) {
    out.resize(lattice[0].count);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double x = coord(0, j);
      out[j] = f.value(std::span<const double>(&x, 1));
    }
    return out;
  }
  const std::size_t n0 = lattice[0].count, n1 = lattice[1].count;
  out.resize(n0 * n1);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const double x[2] = {coord(0, i), coord(1, j)};
      out[i * n1 + j] = f.value(std::span<const double>(x, 2));
    }
  }
  return out;
}

double reach_radius(const Objective& f, const GridGeometry& grid, double t, double slack,
                    Boundary boundary) {
  const GridFunction on_grid = GridFunction::sample(f, grid);
  const double top = on_grid.max();
  double inf = on_grid.min();
  double r = std::sqrt(2.0 * t * (top - inf + slack));
  if (boundary == Boundary::periodic) return r;
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<AxisLattice> lat;
    for (const Axis& a : grid.axes()) lat.push_back(make_lattice(a, r, 1));
    const auto vals = sample_lattice(f, lat, grid, boundary);
    const double new_inf = *std::min_element(vals.begin(), vals.end());
    if (!std::isfinite(new_inf)) throw NumericalBreakdown("objective is not finite near the box");
    if (new_inf >= inf) break;
    inf = new_inf;
    r = std::sqrt(2.0 * t * (top - inf + slack));
  }
  return r;
}

void parabola_envelope(const std::vector<double>& sites, const std::vector<double>& values,
                       const std::vector<double>& queries, double t, std::vector<double>& out,
                       std::vector<std::size_t>* argmin) {
  // Felzenszwalb-Huttenlocher: min_j (x - q_j)^2 + 2t F_j.
  const std::size_t n = sites.size();
  std::vector<std::size_t> v(n);
  std::vector<double> z(n + 1);
  auto height = [&](std::size_t j) { return 2.0 * t * values[j] + sites[j] * sites[j]; };
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < n; ++q) {
    double s = (height(q) - height(v[k])) / (2.0 * (sites[q] - sites[v[k]]));
    while (s <= z[k]) {
      --k;
      s = (height(q) - height(v[k])) / (2.0 * (sites[q] - sites[v[k]]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  out.resize(queries.size());
  if (argmin) argmin->resize(queries.size());
  k = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const double x = queries[i];
    while (z[k + 1] < x) ++k;
    const double d = x - sites[v[k]];
    out[i] = values[v[k]] + d * d / (2.0 * t);
    if (argmin) (*argmin)[i] = v[k];
  }
}

void check_finite(const GridFunction& u, const char* where) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!std::isfinite(u[k])) {
      const auto p = u.geometry().point(k);
      throw NumericalBreakdown(std::string(where) + ": non-finite value at x = " +
                               std::to_string(p[0]) +
                               (u.dim() == 2 ? ", y = " + std::to_string(p[1]) : std::string()));
    }
  }
}

}  // namespace detail
}  // namespace pdesmooth
