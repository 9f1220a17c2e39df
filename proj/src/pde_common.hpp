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

// Helpers shared by the grid solvers. Not part of the public interface.

#include <cstddef>
#include <vector>

#include "pdesmooth/grid.hpp"
#include "pdesmooth/objective.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth::detail {

/// Refined and padded copy of one grid axis. Grid node i sits at lattice
/// index pad + i * ratio.
struct AxisLattice {
  double origin = 0.0;
  double step = 1.0;
  std::size_t count = 0;
  std::size_t pad = 0;
  std::size_t ratio = 1;

  double coord(std::size_t j) const { return origin + static_cast<double>(j) * step; }
  std::size_t node(std::size_t i) const { return pad + i * ratio; }
};

AxisLattice make_lattice(const Axis& axis, double radius, std::size_t ratio);

/// f at every lattice point, row-major. Periodic boundaries wrap the
/// coordinates into the box.
std::vector<double> sample_lattice(const Objective& f, const std::vector<AxisLattice>& lattice,
                                   const GridGeometry& grid, Boundary boundary);

/// Radius r such that every y farther than r from a grid point x satisfies
/// f(y) + |x - y|^2/(2t) > f(x) + slack. Computed as
/// sqrt(2t (max_box f - inf f + slack)) with the infimum taken over the box
/// padded by r itself (a few fixed-point passes).
double reach_radius(const Objective& f, const GridGeometry& grid, double t, double slack,
                    Boundary boundary);

/// Lower envelope of parabolas: out[i] = min_j values[j] + (queries[i] - sites[j])^2 / (2t).
/// Sites and queries must be sorted ascending.
void parabola_envelope(const std::vector<double>& sites, const std::vector<double>& values,
                       const std::vector<double>& queries, double t, std::vector<double>& out,
                       std::vector<std::size_t>* argmin = nullptr);

double wrap(double x, const Axis& axis);

void check_finite(const GridFunction& u, const char* where);

}  // namespace pdesmooth::detail
