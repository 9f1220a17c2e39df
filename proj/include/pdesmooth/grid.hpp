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

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pdesmooth/objective.hpp"

namespace pdesmooth {

/// Uniform axis with both end points included: n points, spacing
/// (upper - lower) / (n - 1).
struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t n = 3;

  double spacing() const { return (upper - lower) / static_cast<double>(n - 1); }
  double coord(std::ptrdiff_t i) const { return lower + static_cast<double>(i) * spacing(); }
  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Tensor grid over a box in one or two dimensions.
class GridGeometry {
 public:
  GridGeometry() = default;
  explicit GridGeometry(std::vector<Axis> axes);
  static GridGeometry line(double lower, double upper, std::size_t n);
  static GridGeometry square(double lower, double upper, std::size_t n);

  std::size_t dim() const { return axes_.size(); }
  const Axis& axis(std::size_t k) const { return axes_[k]; }
  const std::vector<Axis>& axes() const { return axes_; }
  double spacing(std::size_t k = 0) const { return axes_[k].spacing(); }
  std::size_t size() const;
  /// Row-major: the last axis varies fastest.
  std::size_t index(std::size_t i, std::size_t j = 0) const {
    return dim() == 1 ? i : i * axes_[1].n + j;
  }
  /// Coordinates of the flat index.
  std::array<double, 2> point(std::size_t flat) const;
  bool contains(std::span<const double> x) const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

 private:
  std::vector<Axis> axes_;
};

/// Scalar field sampled on a GridGeometry.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridGeometry geometry, double fill = 0.0);
  GridFunction(GridGeometry geometry, std::vector<double> values);

  /// Samples f at every grid point.
  static GridFunction sample(const Objective& f, const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t dim() const { return geometry_.dim(); }
  std::size_t size() const { return values_.size(); }
  double spacing(std::size_t k = 0) const { return geometry_.spacing(k); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double& at(std::size_t i, std::size_t j = 0) { return values_[geometry_.index(i, j)]; }
  double at(std::size_t i, std::size_t j = 0) const { return values_[geometry_.index(i, j)]; }

  /// Multilinear interpolation; points outside the box are clamped to it.
  double interpolate(std::span<const double> x) const;
  double interpolate(double x) const { return interpolate(std::span<const double>(&x, 1)); }
  /// Trapezoidal-rule integral over the box.
  double integral() const;
  /// Central-difference partial derivative along `axis` (one-sided at the edges).
  GridFunction derivative(std::size_t axis) const;

  double max() const;
  double min() const;
  std::size_t argmin() const;

  /// Checks the density invariants: non-negative values and unit integral.
  void validate_density(double tol = 1e-8) const;

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

/// Trapezoid weight of a flat index (product of per-axis weights, times the
/// cell volume).
double trapezoid_weight(const GridGeometry& g, std::size_t flat);

/// CSV with header `x,value` or `x,y,value`, one row per grid point.
void write_csv(const GridFunction& u, std::ostream& out);
void write_csv(const GridFunction& u, const std::string& path);
GridFunction read_csv(std::istream& in);
GridFunction read_csv(const std::string& path);

/// Binary: u32 dim, dim x (f64 lower, f64 upper), dim x u64 count, then the
/// row-major f64 payload. Every field little-endian.
void write_binary(const GridFunction& u, std::ostream& out);
void write_binary(const GridFunction& u, const std::string& path);
GridFunction read_binary(std::istream& in);
GridFunction read_binary(const std::string& path);

}  // namespace pdesmooth
