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

#include "pdesmooth/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pdesmooth {

GridGeometry::GridGeometry(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2)
    throw std::invalid_argument("GridGeometry: dimension must be 1 or 2");
  for (const Axis& a : axes_) {
    if (a.n < 3) throw std::invalid_argument("GridGeometry: need at least 3 points per axis");
    if (!(a.upper > a.lower)) throw std::invalid_argument("GridGeometry: upper must exceed lower");
  }
}

GridGeometry GridGeometry::line(double lower, double upper, std::size_t n) {
  return GridGeometry({Axis{lower, upper, n}});
}

GridGeometry GridGeometry::square(double lower, double upper, std::size_t n) {
  return GridGeometry({Axis{lower, upper, n}, Axis{lower, upper, n}});
}

std::size_t GridGeometry::size() const {
  std::size_t s = 1;
  for (const Axis& a : axes_) s *= a.n;
  return axes_.empty() ? 0 : s;
}

std::array<double, 2> GridGeometry::point(std::size_t flat) const {
  if (dim() == 1) return {axes_[0].coord(static_cast<std::ptrdiff_t>(flat)), 0.0};
  const std::size_t i = flat / axes_[1].n, j = flat % axes_[1].n;
  return {axes_[0].coord(static_cast<std::ptrdiff_t>(i)),
          axes_[1].coord(static_cast<std::ptrdiff_t>(j))};
}

bool GridGeometry::contains(std::span<const double> x) const {
  for (std::size_t k = 0; k < dim(); ++k)
    if (x[k] < axes_[k].lower || x[k] > axes_[k].upper) return false;
  return true;
}

GridFunction::GridFunction(GridGeometry geometry, double fill)
    : geometry_(std::move(geometry)), values_(geometry_.size(), fill) {}

GridFunction::GridFunction(GridGeometry geometry, std::vector<double> values)
    : geometry_(std::move(geometry)), values_(std::move(values)) {
  if (values_.size() != geometry_.size())
    throw std::invalid_argument("GridFunction: value count does not match the grid");
}

GridFunction GridFunction::sample(const Objective& f, const GridGeometry& geometry) {
  if (f.dim() != geometry.dim())
    throw std::invalid_argument("GridFunction::sample: objective and grid dimensions differ");
  GridFunction u(geometry);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto p = geometry.point(k);
    u[k] = f.value(std::span<const double>(p.data(), geometry.dim()));
  }
  return u;
}

namespace {

// Index of the cell containing x along an axis and the weight of the upper node.
std::pair<std::size_t, double> locate(const Axis& a, double x) {
  const double h = a.spacing();
  double s = (std::clamp(x, a.lower, a.upper) - a.lower) / h;
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= a.n - 1) i = a.n - 2;
  return {i, s - static_cast<double>(i)};
}

}  // namespace

double GridFunction::interpolate(std::span<const double> x) const {
  const auto [i, wi] = locate(geometry_.axis(0), x[0]);
  if (dim() == 1) return (1.0 - wi) * values_[i] + wi * values_[i + 1];
  const auto [j, wj] = locate(geometry_.axis(1), x[1]);
  return (1.0 - wi) * ((1.0 - wj) * at(i, j) + wj * at(i, j + 1)) +
         wi * ((1.0 - wj) * at(i + 1, j) + wj * at(i + 1, j + 1));
}

double trapezoid_weight(const GridGeometry& g, std::size_t flat) {
  auto axis_weight = [](const Axis& a, std::size_t i) {
    return (i == 0 || i == a.n - 1) ? 0.5 * a.spacing() : a.spacing();
  };
  if (g.dim() == 1) return axis_weight(g.axis(0), flat);
  const std::size_t i = flat / g.axis(1).n, j = flat % g.axis(1).n;
  return axis_weight(g.axis(0), i) * axis_weight(g.axis(1), j);
}

double GridFunction::integral() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += trapezoid_weight(geometry_, k) * values_[k];
  return s;
}

GridFunction GridFunction::derivative(std::size_t axis) const {
  GridFunction d(geometry_);
  const Axis& a = geometry_.axis(axis);
  const double h = a.spacing();
  const std::size_t stride = (dim() == 2 && axis == 0) ? geometry_.axis(1).n : 1;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const std::size_t i = (dim() == 2 && axis == 1) ? k % a.n : (dim() == 2 ? k / stride : k);
    if (i == 0) {
      d[k] = (values_[k + stride] - values_[k]) / h;
    } else if (i == a.n - 1) {
      d[k] = (values_[k] - values_[k - stride]) / h;
    } else {
      d[k] = (values_[k + stride] - values_[k - stride]) / (2.0 * h);
    }
  }
  return d;
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
std::size_t GridFunction::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) -
                                  values_.begin());
}

void GridFunction::validate_density(double tol) const {
  for (double v : values_)
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("density has a negative value");
  const double mass = integral();
  if (std::abs(mass - 1.0) > tol)
    throw std::invalid_argument("density integral is " + std::to_string(mass) + ", expected 1");
}

// ---------------------------------------------------------------------------
// Serialization

void write_csv(const GridFunction& u, std::ostream& out) {
  const auto& g = u.geometry();
  out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  out << std::setprecision(17);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto p = g.point(k);
    out << p[0] << ',';
    if (g.dim() == 2) out << p[1] << ',';
    out << u[k] << '\n';
  }
}

void write_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(u, out);
}

GridFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  std::size_t dim = 0;
  if (line == "x,value") {
    dim = 1;
  } else if (line == "x,y,value") {
    dim = 2;
  } else {
    throw std::runtime_error("read_csv: unexpected header '" + line + "'");
  }
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> r{};
    std::istringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c <= dim; ++c) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("read_csv: short row");
      r[c] = std::stod(cell);
    }
    rows.push_back(r);
  }
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<double> c;
    for (const auto& r : rows) c.push_back(r[k]);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.size() < 3) throw std::runtime_error("read_csv: fewer than 3 points on an axis");
    axes.push_back(Axis{c.front(), c.back(), c.size()});
  }
  GridGeometry geometry(axes);
  if (rows.size() != geometry.size()) throw std::runtime_error("read_csv: grid is incomplete");
  GridFunction u(geometry);
  for (const auto& r : rows) {
    std::size_t idx[2] = {0, 0};
    for (std::size_t k = 0; k < dim; ++k)
      idx[k] = static_cast<std::size_t>(
          std::lround((r[k] - axes[k].lower) / axes[k].spacing()));
    u.at(idx[0], idx[1]) = r[dim];
  }
  return u;
}

GridFunction read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw std::runtime_error("read_binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void write_binary(const GridFunction& u, std::ostream& out) {
  const auto& g = u.geometry();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (const Axis& a : g.axes()) {
    put_le<double>(out, a.lower);
    put_le<double>(out, a.upper);
  }
  for (const Axis& a : g.axes()) put_le<std::uint64_t>(out, a.n);
  for (double v : u.values()) put_le<double>(out, v);
}

void write_binary(const GridFunction& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_binary(u, out);
}

GridFunction read_binary(std::istream& in) {
  const auto dim = get_le<std::uint32_t>(in);
  if (dim < 1 || dim > 2) throw std::runtime_error("read_binary: bad dimension");
  std::vector<Axis> axes(dim);
  for (Axis& a : axes) {
    a.lower = get_le<double>(in);
    a.upper = get_le<double>(in);
  }
  for (Axis& a : axes) a.n = get_le<std::uint64_t>(in);
  GridGeometry geometry(axes);
  std::vector<double> values(geometry.size());
  for (double& v : values) v = get_le<double>(in);
  return GridFunction(geometry, std::move(values));
}

GridFunction read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_binary(in);
}

}  // namespace pdesmooth
