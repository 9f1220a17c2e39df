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
#include <stdexcept>

#include "pdesmooth/analysis.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {

Figure1Result figure1_densities(const Objective& f, const GridGeometry& grid, double gamma,
                                double smoothing_beta_inv, double fp_beta_inv, double horizon,
                                double window) {
  if (grid.dim() != 1 || f.dim() != 1)
    throw std::invalid_argument("figure1_densities: one-dimensional objective and grid required");
  if (!(gamma > 0) || !(horizon > 0) || !(window > 0))
    throw std::invalid_argument("figure1_densities: gamma, horizon and window must be positive");

  Figure1Result r;
  const GridFunction values = GridFunction::sample(f, grid);
  r.x_star = grid.point(values.argmin())[0];

  GridFunction rho0(grid, 1.0);
  const double total = rho0.integral();
  for (double& v : rho0.values()) v /= total;

  GridFunction grad_f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i)[0];
    grad_f[i] = f.gradient(std::span<const double>(&x, 1))[0];
  }

  PdeSolveConfig smooth;
  smooth.beta_inv = smoothing_beta_inv;
  smooth.t_final = gamma;
  const GridFunction drift_viscous = solve_viscous_hj_cole_hopf(f, smooth, grid).derivative(0);
  const GridFunction drift_hl = solve_hj_hopf_lax(f, gamma, grid).derivative(0);

  r.viscous = evolve_fokker_planck(drift_viscous, rho0, fp_beta_inv, horizon);
  r.hopf_lax = evolve_fokker_planck(drift_hl, rho0, fp_beta_inv, horizon);
  r.sgd = evolve_fokker_planck(grad_f, rho0, fp_beta_inv, horizon);

  auto mass = [&](const GridFunction& rho) {
    GridFunction w(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      w[i] = std::abs(grid.point(i)[0] - r.x_star) <= window ? rho[i] : 0.0;
    return w.integral();
  };
  r.mass_viscous = mass(r.viscous);
  r.mass_hopf_lax = mass(r.hopf_lax);
  r.mass_sgd = mass(r.sgd);
  r.min_gap = std::min(r.mass_viscous - r.mass_hopf_lax, r.mass_hopf_lax - r.mass_sgd);
  return r;
}

}  // namespace pdesmooth
