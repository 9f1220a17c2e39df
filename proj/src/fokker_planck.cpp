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

#include "pdesmooth/pde.hpp"

namespace pdesmooth {
namespace {

struct FaceField {
  std::size_t stride = 1;
  std::vector<double> velocity;  // -drift averaged onto the face between node and node + stride
};

std::size_t axis_index(const GridGeometry& g, std::size_t flat, std::size_t k) {
  if (g.dim() == 1) return flat;
  return k == 0 ? flat / g.axis(1).n : flat % g.axis(1).n;
}

}  // namespace

double fokker_planck_time_step_limit(const std::vector<GridFunction>& drift, double beta_inv) {
  if (drift.empty()) throw std::invalid_argument("drift needs one component per axis");
  const GridGeometry& g = drift[0].geometry();
  double rate = 0.0;
  for (std::size_t k = 0; k < g.dim(); ++k) {
    double vmax = 0.0;
    for (double v : drift[k].values()) vmax = std::max(vmax, std::abs(v));
    const double h = g.spacing(k);
    rate += 2.0 * vmax / h + beta_inv / (h * h);
  }
  return rate > 0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

GridFunction evolve_fokker_planck(const std::vector<GridFunction>& drift,
                                  const GridFunction& rho0, double beta_inv, double t_final,
                                  double dt) {
  const GridGeometry& g = rho0.geometry();
  if (drift.size() != g.dim()) throw std::invalid_argument("drift needs one component per axis");
  for (const GridFunction& d : drift)
    if (!(d.geometry() == g)) throw std::invalid_argument("drift and density grids differ");
  if (beta_inv < 0 || t_final < 0 || dt < 0)
    throw std::invalid_argument("beta_inv, t_final and dt must be non-negative");
  rho0.validate_density(1e-8);

  const double limit = fokker_planck_time_step_limit(drift, beta_inv);
  if (dt > limit * (1.0 + 1e-12))
    throw CflViolation("Fokker-Planck time step " + std::to_string(dt) + " exceeds the limit " +
                       std::to_string(limit));
  if (dt == 0.0) dt = 0.9 * limit;
  const auto n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  if (n_steps == 0) return rho0;
  dt = t_final / static_cast<double>(n_steps);

  const double diff = 0.5 * beta_inv;
  std::vector<FaceField> faces(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    faces[k].stride = (g.dim() == 2 && k == 0) ? g.axis(1).n : 1;
    faces[k].velocity.assign(g.size(), 0.0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      if (axis_index(g, flat, k) + 1 < g.axis(k).n)
        faces[k].velocity[flat] = -0.5 * (drift[k][flat] + drift[k][flat + faces[k].stride]);
    }
  }

  std::vector<double> rho(rho0.values().begin(), rho0.values().end());
  std::vector<double> change(rho.size()), flux(rho.size());
  for (long s = 0; s < n_steps; ++s) {
    std::fill(change.begin(), change.end(), 0.0);
    for (std::size_t k = 0; k < g.dim(); ++k) {
      const Axis& a = g.axis(k);
      const double h = a.spacing();
      const std::size_t stride = faces[k].stride;
      const auto& vel = faces[k].velocity;
      for (std::size_t flat = 0; flat < rho.size(); ++flat) {
        if (axis_index(g, flat, k) + 1 >= a.n) {
          flux[flat] = 0.0;
          continue;
        }
        const double v = vel[flat];
        const double r0 = rho[flat], r1 = rho[flat + stride];
        flux[flat] = std::max(v, 0.0) * r0 + std::min(v, 0.0) * r1 - diff * (r1 - r0) / h;
      }
      for (std::size_t flat = 0; flat < rho.size(); ++flat) {
        const std::size_t i = axis_index(g, flat, k);
        const double width = (i == 0 || i + 1 == a.n) ? 0.5 * h : h;
        const double out = flux[flat];
        const double in = i > 0 ? flux[flat - stride] : 0.0;
        change[flat] -= (out - in) / width;
      }
    }
    for (std::size_t flat = 0; flat < rho.size(); ++flat) {
      rho[flat] += dt * change[flat];
      if (!(rho[flat] >= -1e-12)) {
        const auto p = g.point(flat);
        throw NumericalBreakdown("Fokker-Planck density became " + std::to_string(rho[flat]) +
                                 " at x = " + std::to_string(p[0]) + " in step " +
                                 std::to_string(s));
      }
    }
  }
  return GridFunction(g, std::move(rho));
}

GridFunction evolve_fokker_planck(const GridFunction& drift, const GridFunction& rho0,
                                  double beta_inv, double t_final, double dt) {
  return evolve_fokker_planck(std::vector<GridFunction>{drift}, rho0, beta_inv, t_final, dt);
}

}  // namespace pdesmooth
