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
#include <numeric>
#include <stdexcept>

#include "pde_common.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {
namespace {

// Inf-convolution of lattice values onto the grid nodes, one axis at a time.
GridFunction envelope_to_grid(const std::vector<double>& values,
                              const std::vector<std::vector<double>>& sites,
                              const GridGeometry& grid, double t) {
  std::vector<std::vector<double>> queries(grid.dim());
  for (std::size_t k = 0; k < grid.dim(); ++k) {
    const Axis& a = grid.axis(k);
    for (std::size_t i = 0; i < a.n; ++i) queries[k].push_back(a.coord(static_cast<std::ptrdiff_t>(i)));
  }
  std::vector<double> out;
  if (grid.dim() == 1) {
    detail::parabola_envelope(sites[0], values, queries[0], t, out);
    return GridFunction(grid, std::move(out));
  }
  const std::size_t s0 = sites[0].size(), s1 = sites[1].size();
  const std::size_t n0 = grid.axis(0).n, n1 = grid.axis(1).n;
  std::vector<double> mid(s0 * n1), line, res;
  for (std::size_t i = 0; i < s0; ++i) {
    line.assign(values.begin() + static_cast<std::ptrdiff_t>(i * s1),
                values.begin() + static_cast<std::ptrdiff_t>((i + 1) * s1));
    detail::parabola_envelope(sites[1], line, queries[1], t, res);
    std::copy(res.begin(), res.end(), mid.begin() + static_cast<std::ptrdiff_t>(i * n1));
  }
  out.resize(n0 * n1);
  line.resize(s0);
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t i = 0; i < s0; ++i) line[i] = mid[i * n1 + j];
    detail::parabola_envelope(sites[0], line, queries[0], t, res);
    for (std::size_t i = 0; i < n0; ++i) out[i * n1 + j] = res[i];
  }
  return GridFunction(grid, std::move(out));
}

std::vector<double> lattice_sites(const detail::AxisLattice& lat) {
  std::vector<double> s(lat.count);
  for (std::size_t j = 0; j < lat.count; ++j) s[j] = lat.coord(j);
  return s;
}

double extrapolate(const std::vector<double>& v, std::ptrdiff_t j) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  if (j < 0) return v[0] + static_cast<double>(j) * (v[1] - v[0]);
  if (j >= n) return v[n - 1] + static_cast<double>(j - n + 1) * (v[n - 1] - v[n - 2]);
  return v[static_cast<std::size_t>(j)];
}

double phi(const Objective& f, std::span<const double> x, std::span<const double> y, double t) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
  return f.value(y) + d2 / (2.0 * t);
}

// Local minimization of f(y) + |x - y|^2 / (2t): Newton steps while the
// Hessian of the prox objective is positive definite, gradient steps
// otherwise, both with backtracking.
Vector polish_prox(const Objective& f, std::span<const double> x, double t, Vector y) {
  const std::size_t n = y.size();
  Vector g(n), trial(n);
  double val = phi(f, x, y, t);
  for (int it = 0; it < 500; ++it) {
    f.gradient(y, g);
    double gnorm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      g[k] += (y[k] - x[k]) / t;
      gnorm += g[k] * g[k];
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm <= 1e-14) break;
    Eigen::VectorXd dir = -Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(n)) * t;
    if (auto h = f.hessian(y)) {
      Matrix hp = *h;
      hp.diagonal().array() += 1.0 / t;
      Eigen::LDLT<Matrix> ldlt(hp);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 0) {
        dir = -ldlt.solve(Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(n)));
      }
    }
    double slope = 0.0;
    for (std::size_t k = 0; k < n; ++k) slope += g[k] * dir[static_cast<Eigen::Index>(k)];
    double step = 1.0;
    bool moved = false;
    for (int b = 0; b < 60; ++b) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = y[k] + step * dir[static_cast<Eigen::Index>(k)];
      const double tv = phi(f, x, trial, t);
      if (tv <= val + 1e-4 * step * slope) {
        moved = tv < val || step == 1.0;
        y = trial;
        val = tv;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return y;
}

std::vector<Vector> prox_starts(const Objective& f, std::span<const double> x, double t) {
  const std::size_t n = x.size();
  const Vector gx = f.gradient(x);
  double gnorm = 0.0;
  for (double v : gx) gnorm += v * v;
  gnorm = std::sqrt(gnorm);
  std::vector<Vector> starts;
  if (n > 2) {
    starts.emplace_back(x.begin(), x.end());
    Vector s(x.begin(), x.end());
    for (std::size_t k = 0; k < n; ++k) s[k] -= t * gx[k];
    starts.push_back(s);
    return starts;
  }
  double radius = std::max({1.0, 4.0 * std::sqrt(t), 2.0 * t * gnorm});
  const std::size_t m = n == 1 ? 401 : 101;
  for (int expand = 0; expand < 30; ++expand) {
    starts.clear();
    const double h = 2.0 * radius / static_cast<double>(m - 1);
    auto coord = [&](std::size_t k, std::size_t i) {
      return x[k] - radius + static_cast<double>(i) * h;
    };
    const std::size_t cols = n == 1 ? 1 : m;
    std::vector<double> vals(m * cols);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        Vector y{coord(0, i)};
        if (n == 2) y.push_back(coord(1, j));
        vals[i * cols + j] = phi(f, x, y, t);
      }
    }
    bool on_edge = false;
    std::vector<std::pair<double, Vector>> minima;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double v = vals[i * cols + j];
        bool local = true;
        for (int di = -1; di <= 1 && local; ++di) {
          for (int dj = (n == 1 ? 0 : -1); dj <= (n == 1 ? 0 : 1) && local; ++dj) {
            const auto ii = static_cast<std::ptrdiff_t>(i) + di;
            const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
            if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(m) ||
                jj >= static_cast<std::ptrdiff_t>(cols))
              continue;
            if (vals[static_cast<std::size_t>(ii) * cols + static_cast<std::size_t>(jj)] < v) local = false;
          }
        }
        if (!local) continue;
        Vector y{coord(0, i)};
        if (n == 2) y.push_back(coord(1, j));
        if (i == 0 || i == m - 1 || (n == 2 && (j == 0 || j == m - 1))) on_edge = true;
        minima.emplace_back(v, y);
      }
    }
    std::sort(minima.begin(), minima.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (on_edge && !minima.empty()) {
      const double best = minima.front().first;
      bool edge_best = false;
      for (const auto& [v, y] : minima) {
        bool edge = false;
        for (std::size_t k = 0; k < n; ++k)
          edge |= std::abs(std::abs(y[k] - x[k]) - radius) < 0.5 * h;
        if (edge && v <= best + 1e-12) edge_best = true;
      }
      if (edge_best) {
        radius *= 2.0;
        continue;
      }
    }
    for (std::size_t i = 0; i < minima.size() && i < 16; ++i) starts.push_back(minima[i].second);
    return starts;
  }
  throw std::runtime_error("prox_point: the prox objective appears unbounded below");
}

}  // namespace

GridFunction solve_hj_hopf_lax(const Objective& f, double t, const GridGeometry& grid) {
  if (f.dim() != grid.dim()) throw std::invalid_argument("objective and grid dimensions differ");
  if (t < 0) throw std::invalid_argument("Hopf-Lax needs t > 0");
  if (t == 0) return GridFunction::sample(f, grid);
  const double radius =
      detail::reach_radius(f, grid, t, 0.0, Boundary::extrapolating) + grid.spacing(0);
  std::vector<detail::AxisLattice> lat;
  std::vector<std::vector<double>> sites;
  for (const Axis& a : grid.axes()) {
    lat.push_back(detail::make_lattice(a, radius, 1));
    sites.push_back(lattice_sites(lat.back()));
  }
  const auto values = detail::sample_lattice(f, lat, grid, Boundary::extrapolating);
  return envelope_to_grid(values, sites, grid, t);
}

GridFunction hopf_lax_transform(const GridFunction& f, double t) {
  if (t < 0) throw std::invalid_argument("Hopf-Lax needs t > 0");
  if (t == 0) return f;
  const GridGeometry& grid = f.geometry();
  const std::size_t dim = grid.dim();
  // Ghost cells far enough out to hold the minimizer of every node.
  std::vector<std::size_t> pad(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const Axis& a = grid.axis(k);
    const std::size_t other = dim == 2 ? grid.axis(1 - k).n : 1;
    double slope = 0.0;
    for (std::size_t l = 0; l < other; ++l) {
      auto val = [&](std::size_t i) { return k == 0 ? f.at(i, l) : f.at(l, i); };
      slope = std::max({slope, std::abs(val(1) - val(0)), std::abs(val(a.n - 1) - val(a.n - 2))});
    }
    slope /= a.spacing();
    pad[k] = std::min<std::size_t>(4 * a.n, static_cast<std::size_t>(std::ceil(t * slope / a.spacing())) + 1);
  }
  std::vector<detail::AxisLattice> lat;
  std::vector<std::vector<double>> sites;
  for (std::size_t k = 0; k < dim; ++k) {
    lat.push_back(detail::make_lattice(grid.axis(k), static_cast<double>(pad[k]) * grid.spacing(k), 1));
    sites.push_back(lattice_sites(lat.back()));
  }
  std::vector<double> values;
  if (dim == 1) {
    std::vector<double> v(f.values().begin(), f.values().end());
    for (std::size_t j = 0; j < lat[0].count; ++j)
      values.push_back(extrapolate(v, static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(pad[0])));
  } else {
    const std::size_t n0 = grid.axis(0).n, n1 = grid.axis(1).n;
    const std::size_t s0 = lat[0].count, s1 = lat[1].count;
    std::vector<double> rows(n0 * s1), line(n1), col(n0);
    for (std::size_t i = 0; i < n0; ++i) {
      for (std::size_t j = 0; j < n1; ++j) line[j] = f.at(i, j);
      for (std::size_t j = 0; j < s1; ++j)
        rows[i * s1 + j] =
            extrapolate(line, static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(pad[1]));
    }
    values.resize(s0 * s1);
    for (std::size_t j = 0; j < s1; ++j) {
      for (std::size_t i = 0; i < n0; ++i) col[i] = rows[i * s1 + j];
      for (std::size_t i = 0; i < s0; ++i)
        values[i * s1 + j] =
            extrapolate(col, static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad[0]));
    }
  }
  return envelope_to_grid(values, sites, grid, t);
}

ProxResult prox_point(const Objective& f, std::span<const double> x, double t) {
  if (!(t > 0)) throw std::invalid_argument("prox_point needs t > 0");
  if (x.size() != f.dim()) throw std::invalid_argument("prox_point: x has the wrong dimension");
  std::vector<std::pair<double, Vector>> sols;
  for (Vector& s : prox_starts(f, x, t)) {
    Vector y = polish_prox(f, x, t, std::move(s));
    const double v = phi(f, x, y, t);
    bool seen = false;
    for (const auto& [w, z] : sols) {
      double d = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) d = std::max(d, std::abs(y[k] - z[k]));
      if (d < 1e-7) seen = true;
    }
    if (!seen) sols.emplace_back(v, std::move(y));
  }
  std::sort(sols.begin(), sols.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ProxResult r;
  r.y = sols.front().second;
  r.value = sols.front().first;
  r.grad_f = f.gradient(r.y);
  r.gradient.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r.gradient[k] = (x[k] - r.y[k]) / t;
  for (std::size_t i = 1; i < sols.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) d2 += std::pow(sols[i].second[k] - r.y[k], 2);
    if (std::sqrt(d2) > 1e-4 && sols[i].first - r.value < 1e-10) {
      r.unique = false;
      r.other = sols[i].second;
      break;
    }
  }
  return r;
}

BurgersResult burgers_characteristic_check(const Objective& f, double x, double t) {
  if (f.dim() != 1) throw std::invalid_argument("burgers_characteristic_check needs a 1D objective");
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  auto df = [&](double y) { return f.gradient(std::span<const double>(&y, 1))[0]; };
  auto d2f = [&](double y) {
    auto h = f.hessian(std::span<const double>(&y, 1));
    return h ? (*h)(0, 0) : 0.0;
  };
  BurgersResult r;
  r.p = df(x);
  if (t == 0) {
    r.converged = true;
    return r;
  }
  for (r.iterations = 1; r.iterations <= 1000; ++r.iterations) {
    const double y = x - t * r.p;
    const double residual = r.p - df(y);
    const double curvature = d2f(y);
    if (std::abs(residual) <= 1e-12 * std::max(1.0, std::abs(r.p))) {
      r.converged = 1.0 + t * curvature > 0.0;
      return r;
    }
    // Newton where the characteristic map is monotone, damped otherwise.
    r.p -= residual / (1.0 + t * std::abs(curvature));
    if (!std::isfinite(r.p)) break;
  }
  r.converged = false;
  return r;
}

Interval convexity_interval(const GridFunction& u, double x_min) {
  if (u.dim() != 1) throw std::invalid_argument("convexity_interval needs a 1D grid function");
  const Axis& a = u.geometry().axis(0);
  const double h = a.spacing();
  const auto n = static_cast<std::ptrdiff_t>(a.n);
  auto near = static_cast<std::ptrdiff_t>(std::lround((x_min - a.lower) / h));
  near = std::clamp<std::ptrdiff_t>(near, 0, n - 1);
  std::ptrdiff_t i = near;
  for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, near - 1); j <= std::min(n - 1, near + 1); ++j)
    if (u[static_cast<std::size_t>(j)] < u[static_cast<std::size_t>(i)]) i = j;
  const bool left_ok = i == 0 || u[static_cast<std::size_t>(i)] <= u[static_cast<std::size_t>(i - 1)];
  const bool right_ok = i == n - 1 || u[static_cast<std::size_t>(i)] <= u[static_cast<std::size_t>(i + 1)];
  if (!left_ok || !right_ok || std::abs(a.coord(i) - x_min) > 1.5 * h)
    throw std::invalid_argument("convexity_interval: x = " + std::to_string(x_min) +
                                " is not a local minimum of u");
  auto convex_at = [&](std::ptrdiff_t j) {
    const auto k = static_cast<std::size_t>(j);
    return u[k + 1] - 2.0 * u[k] + u[k - 1] >= -1e-10;
  };
  std::ptrdiff_t lo = i, hi = i;
  while (lo > 0 && (lo == n - 1 || convex_at(lo))) --lo;
  while (hi < n - 1 && (hi == 0 || convex_at(hi))) ++hi;
  return {a.coord(lo), a.coord(hi)};
}

}  // namespace pdesmooth
