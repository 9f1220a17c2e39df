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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "pdesmooth/pde.hpp"

using namespace pdesmooth;

namespace {

double f1(const Objective& f, double x) { return f.value(std::span<const double>(&x, 1)); }

// O(N^2) inf-convolution over a wide sample lattice with the grid spacing.
GridFunction brute_hopf_lax(const Objective& f, const GridGeometry& g, double t, double pad) {
  const double h = g.spacing(0);
  const int extra = static_cast<int>(std::ceil(pad / h));
  GridFunction u(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    double best = std::numeric_limits<double>::infinity();
    for (int j = -extra; j < static_cast<int>(g.axis(0).n) + extra; ++j) {
      const double y = g.axis(0).coord(j);
      best = std::min(best, f1(f, y) + (x - y) * (x - y) / (2 * t));
    }
    u[i] = best;
  }
  return u;
}

double second_difference_max(const GridFunction& u) {
  const double h = u.spacing(0);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < u.size(); ++i)
    worst = std::max(worst, (u[i + 1] - 2 * u[i] + u[i - 1]) / (h * h));
  return worst;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST_CASE("cole-hopf reproduces the quadratic closed form") {
  auto q = make_quadratic(1.0, {}, 1);
  PdeSolveConfig cfg{0.1, 0.5};
  const auto g = GridGeometry::line(-4, 4, 801);  // x = 1 is node 500
  const auto u = solve_viscous_hj_cole_hopf(*q, cfg, g);
  CHECK(u.at(500) == doctest::Approx(1.0 / 3.0 + 0.05 * std::log(1.5)).epsilon(1e-10));
  CHECK(u.at(500) == doctest::Approx(0.35360).epsilon(1e-5));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(u[i] == doctest::Approx(x * x / 3.0 + 0.05 * std::log(1.5)).epsilon(1e-9));
  }
}

TEST_CASE("cole-hopf in two dimensions matches the quadratic closed form") {
  auto q = make_quadratic(1.0, {}, 2);
  const auto g = GridGeometry::square(-2, 2, 41);
  const auto u = solve_viscous_hj_cole_hopf(*q, PdeSolveConfig{0.2, 0.7}, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto p = g.point(k);
    const double r2 = p[0] * p[0] + p[1] * p[1];
    CHECK(u[k] == doctest::Approx(r2 / (2 * 1.7) + 2 * 0.1 * std::log(1.7)).epsilon(1e-9));
  }
}

TEST_CASE("cole-hopf at vanishing time returns the initial data") {
  auto r = make_rugged_1d(7, 5);
  const auto g = GridGeometry::line(-2, 2, 257);
  const auto u = solve_viscous_hj_cole_hopf(*r, PdeSolveConfig{0.1, 1e-8}, g);
  const auto f = GridFunction::sample(*r, g);
  CHECK(max_abs_diff(u, f) <= 1e-4);
}

TEST_CASE("cole-hopf output of the rugged objective is semiconcave with constant 1/t") {
  auto r = make_rugged_1d(3, 6);
  const auto g = GridGeometry::line(-2, 2, 513);
  for (double t : {0.05, 0.2, 1.0}) {
    const auto u = solve_viscous_hj_cole_hopf(*r, PdeSolveConfig{0.1, t}, g);
    CHECK(second_difference_max(u) <= 1.0 / t);
  }
}

TEST_CASE("cole-hopf with zero viscosity is the Hopf-Lax solution") {
  auto w = make_double_well(1.0);
  const auto g = GridGeometry::line(-2, 2, 201);
  const auto a = solve_viscous_hj_cole_hopf(*w, PdeSolveConfig{0.0, 0.3}, g);
  const auto b = solve_hj_hopf_lax(*w, 0.3, g);
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("a kernel wider than the box is a boundary-truncation error") {
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-0.5, 0.5, 101);
  CHECK_THROWS_AS(solve_viscous_hj_cole_hopf(*q, PdeSolveConfig{1.0, 1.0}, g), BoundaryTruncation);
  CHECK_THROWS_AS(solve_heat(*q, PdeSolveConfig{1.0, 1.0}, g), BoundaryTruncation);
}

TEST_CASE("pointwise cole-hopf agrees with the grid solver") {
  auto r = make_rugged_1d(7, 5);
  const auto g = GridGeometry::line(-2, 2, 401);
  const auto u = solve_viscous_hj_cole_hopf(*r, PdeSolveConfig{0.1, 0.5}, g);
  const auto du = u.derivative(0);
  for (std::size_t i = 40; i < 360; i += 40) {
    const auto p = cole_hopf_point(*r, g.point(i)[0], 0.5, 0.1);
    CHECK(p.value == doctest::Approx(u[i]).epsilon(1e-8));
    CHECK(p.gradient == doctest::Approx(du[i]).epsilon(2e-3));
  }
  // quadratic: gradient x / (1 + t)
  auto q = make_quadratic(1.0, {}, 1);
  CHECK(cole_hopf_point(*q, 2.0, 1.0, 0.05).gradient == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hopf-lax reproduces the quadratic closed form") {
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-4, 4, 161);  // spacing 0.05
  const auto u = solve_hj_hopf_lax(*q, 1.0, g);
  CHECK(u.at(120) == doctest::Approx(1.0).epsilon(1e-12));  // x = 2
  // the minimizer of a convex f stays put
  CHECK(u.argmin() == GridFunction::sample(*q, g).argmin());
}

TEST_CASE("hopf-lax keeps the double-well minima for small time") {
  auto w = make_double_well(1.0);
  const auto g = GridGeometry::line(-2, 2, 401);
  const auto u = solve_hj_hopf_lax(*w, 0.05, g);
  const auto brute = brute_hopf_lax(*w, g, 0.05, 1.0);
  CHECK(max_abs_diff(u, brute) <= 1e-12);
  CHECK(u.interpolate(1.0) == doctest::Approx(0.0));
  CHECK(u.interpolate(-1.0) == doctest::Approx(0.0));
}

TEST_CASE("hopf-lax equals the brute-force inf-convolution and never exceeds f") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = make_rugged_1d(seed, 5);
    const auto g = GridGeometry::line(-2, 2, 301);
    for (double t : {0.01, 0.3, 2.0}) {
      const auto u = solve_hj_hopf_lax(*r, t, g);
      CHECK(max_abs_diff(u, brute_hopf_lax(*r, g, t, 4.0)) <= 1e-12);
      const auto f = GridFunction::sample(*r, g);
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(u[i] <= f[i] + 1e-14);
    }
  }
}

TEST_CASE("two-dimensional hopf-lax equals brute force") {
  Matrix qm(2, 2);
  qm << 2.0, 0.5, 0.5, 1.0;
  auto q = make_quadratic(qm, {0.3, -0.2});
  const auto g = GridGeometry::square(-1, 1, 21);
  const double t = 0.4;
  const auto u = solve_hj_hopf_lax(*q, t, g);
  const double h = g.spacing(0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto p = g.point(k);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -20; i <= 40; ++i) {
      for (int j = -20; j <= 40; ++j) {
        const double y[2] = {-1 + i * h, -1 + j * h};
        const double d2 = (p[0] - y[0]) * (p[0] - y[0]) + (p[1] - y[1]) * (p[1] - y[1]);
        best = std::min(best, q->value(std::span<const double>(y, 2)) + d2 / (2 * t));
      }
    }
    CHECK(u[k] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("hopf-lax on grid values uses extrapolated ghost cells") {
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-1, 1, 81);
  const auto f = GridFunction::sample(*q, g);
  const auto u = hopf_lax_transform(f, 0.5);
  // minimizers x / 1.5 stay inside the box, so the result is the grid inf-convolution
  const auto brute = brute_hopf_lax(*q, g, 0.5, 0.0);
  CHECK(max_abs_diff(u, brute) <= 1e-12);
  // an affine function is left unchanged up to the t/2 |slope|^2 shift
  auto lin = make_affine({2.0});
  const auto ul = hopf_lax_transform(GridFunction::sample(*lin, g), 0.1);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(ul[i] == doctest::Approx(2 * g.point(i)[0] - 0.2).epsilon(1e-12));
}

TEST_CASE("prox of the quadratic is x / (1 + t)") {
  auto q = make_quadratic(1.0, {}, 1);
  const double x = 2.0;
  const auto p = prox_point(*q, std::span<const double>(&x, 1), 1.0);
  CHECK(p.y[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.gradient[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.unique);
}

TEST_CASE("prox gradient relation holds on the double well") {
  auto w = make_double_well(1.0);
  for (double x : {-1.7, -0.9, -0.45, 0.3, 0.8, 1.2, 2.1}) {
    const auto p = prox_point(*w, std::span<const double>(&x, 1), 0.1);
    CHECK(std::abs(p.gradient[0] - p.grad_f[0]) <= 1e-6);
  }
}

TEST_CASE("prox flags the symmetric double-well minimizers") {
  auto w = make_double_well(1.0);
  const double x = 0.0;
  // f(y) + y^2/(2t) has minimizers +-sqrt(1 - 1/(4t)) once t > 1/4
  const auto p = prox_point(*w, std::span<const double>(&x, 1), 1.0);
  CHECK_FALSE(p.unique);
  CHECK(std::abs(p.y[0]) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-10));
  CHECK(p.other[0] == doctest::Approx(-p.y[0]).epsilon(1e-10));
  // below t = 1/4 the saddle is the unique minimizer
  CHECK(prox_point(*w, std::span<const double>(&x, 1), 0.2).unique);
}

TEST_CASE("prox in higher dimension starts from x") {
  Matrix qm = Matrix::Identity(5, 5) * 3.0;
  auto q = make_quadratic(qm, {1, 0, 0, 0, -1});
  const Vector x{1, 2, 3, 4, 5};
  const auto p = prox_point(*q, x, 0.5);
  // (Q + I/t) y = x/t - p
  for (std::size_t k = 0; k < 5; ++k) {
    const double pk = k == 0 ? 1.0 : (k == 4 ? -1.0 : 0.0);
    CHECK(p.y[k] == doctest::Approx((x[k] / 0.5 - pk) / 5.0).epsilon(1e-10));
  }
}

TEST_CASE("monotone FD solves the non-viscous quadratic to first order") {
  auto q = make_quadratic(1.0, {}, 1);
  PdeSolveConfig cfg{0.0, 1.0};
  cfg.scheme = Scheme::monotone_fd;
  double prev = 0;
  for (std::size_t n : {101, 201, 401}) {
    const auto g = GridGeometry::line(-2, 2, n);
    const auto u = solve_hj_monotone_fd(*q, cfg, g);
    double e = 0;
    for (std::size_t i = n / 8; i < n - n / 8; ++i) {
      const double x = g.point(i)[0];
      e = std::max(e, std::abs(u[i] - x * x / 4));
    }
    CHECK(e <= 2.0 * g.spacing(0));
    if (prev > 0) CHECK(prev / e >= 1.7);
    prev = e;
  }
}

TEST_CASE("monotone FD with zero time returns the initial data exactly") {
  auto r = make_rugged_1d(7, 5);
  const auto g = GridGeometry::line(-2, 2, 129);
  PdeSolveConfig cfg{0.1, 0.0};
  const auto u = solve_hj_monotone_fd(*r, cfg, g);
  const auto f = GridFunction::sample(*r, g);
  CHECK(max_abs_diff(u, f) == 0.0);
}

TEST_CASE("monotone FD rejects a time step beyond the CFL limit") {
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-2, 2, 101);
  const auto f = GridFunction::sample(*q, g);
  const double limit = monotone_time_step_limit(f, 0.1);
  const double h = g.spacing(0);
  const double pmax = (f[100] - f[99]) / h;  // steepest one-sided difference
  CHECK(limit == doctest::Approx(h * h / (0.1 + h * pmax)).epsilon(1e-12));
  PdeSolveConfig cfg{0.1, 0.5};
  cfg.dt = 1.5 * limit;
  CHECK_THROWS_AS(solve_hj_monotone_fd(f, cfg), CflViolation);
  cfg.dt = 0.5 * limit;
  CHECK_NOTHROW(solve_hj_monotone_fd(f, cfg));
}

TEST_CASE("monotone FD aborts on NaN") {
  auto bad = make_function_1d(
      "nan_spike", [](double x) { return std::abs(x) < 0.01 ? std::nan("") : x * x; },
      [](double x) { return 2 * x; });
  const auto g = GridGeometry::line(-1, 1, 101);
  PdeSolveConfig cfg{0.1, 0.2};
  CHECK_THROWS_AS(solve_hj_monotone_fd(GridFunction::sample(*bad, g), cfg), NumericalBreakdown);
}

TEST_CASE("monotone FD agrees with cole-hopf at first order") {
  auto r = make_rugged_1d(7, 5);
  PdeSolveConfig cfg{0.1, 0.5};
  cfg.cfl_fraction = 0.25;
  std::vector<double> errors;
  for (std::size_t n : {129, 257, 513}) {
    const auto g = GridGeometry::line(-2, 2, n);
    errors.push_back(max_abs_diff(solve_hj_monotone_fd(*r, cfg, g),
                                  solve_viscous_hj_cole_hopf(*r, cfg, g)));
  }
  CHECK(std::log2(errors[0] / errors[1]) >= 0.85);
  CHECK(std::log2(errors[1] / errors[2]) >= 0.85);
}

TEST_CASE("monotone FD in two dimensions") {
  auto q = make_quadratic(1.0, {}, 2);
  PdeSolveConfig cfg{0.1, 0.5};
  const auto g = GridGeometry::square(-1.5, 1.5, 61);
  const auto u = solve_hj_monotone_fd(*q, cfg, g);
  const auto exact = solve_viscous_hj_cole_hopf(*q, cfg, g);
  CHECK(max_abs_diff(u, exact) <= 3 * g.spacing(0));
}

TEST_CASE("solvers preserve ordering of initial data") {
  auto w = make_double_well(1.0);
  auto shifted = make_function_1d(
      "bumped", [](double x) { return (x * x - 1) * (x * x - 1) + 0.3 * std::exp(-8 * x * x); },
      [](double x) { return 4 * x * (x * x - 1) - 4.8 * x * std::exp(-8 * x * x); });
  const auto g = GridGeometry::line(-2, 2, 201);
  for (Scheme s : {Scheme::cole_hopf, Scheme::hopf_lax, Scheme::monotone_fd, Scheme::heat}) {
    PdeSolveConfig cfg{0.2, 0.4};
    cfg.scheme = s;
    const auto u1 = solve(*w, cfg, g);
    const auto u2 = solve(*shifted, cfg, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(u1[i] <= u2[i] + 1e-10);
  }
}

TEST_CASE("heat smoothing preserves affine functions") {
  auto lin = make_affine({3.0}, 1.0);
  const auto g = GridGeometry::line(-3, 3, 121);
  const auto v = solve_heat(*lin, PdeSolveConfig{0.5, 0.8}, g);
  const auto dv = v.derivative(0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(dv[i] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("heat smoothing of x^2/2 adds beta_inv t / 2") {
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-3, 3, 121);
  const auto v = solve_heat(*q, PdeSolveConfig{0.3, 0.7}, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(v[i] == doctest::Approx(x * x / 2 + 0.3 * 0.7 / 2).epsilon(1e-10));
  }
}

TEST_CASE("heat smoothing damps the periodic eigenfunction") {
  auto s = make_function_1d("sin", [](double x) { return std::sin(x); },
                            [](double x) { return std::cos(x); });
  const double pi = std::acos(-1.0);
  const auto g = GridGeometry::line(0, 2 * pi, 257);
  PdeSolveConfig cfg{1.0, 1.5};
  cfg.boundary = Boundary::periodic;
  const auto v = solve_heat(*s, cfg, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(std::abs(v[i] - std::exp(-0.75) * std::sin(x)) <= 1e-6);
  }
}

TEST_CASE("burgers characteristics") {
  auto q = make_quadratic(1.0, {}, 1);
  auto b = burgers_characteristic_check(*q, 2.0, 1.0);
  CHECK(b.converged);
  CHECK(b.p == doctest::Approx(1.0).epsilon(1e-12));

  auto w = make_double_well(1.0);
  b = burgers_characteristic_check(*w, 0.7, 0.0);
  CHECK(b.converged);
  CHECK(b.p == doctest::Approx(4 * 0.7 * (0.49 - 1)));

  // shock time at x = 0 from 1 + t f''(x - t p) = 0 with p = 0, by bisection
  double lo = 0, hi = 10;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double y = 0.0;
    (1 + mid * (12 * y * y - 4) > 0 ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(0.25));
  CHECK(burgers_characteristic_check(*w, 0.0, 0.9 * lo).converged);
  CHECK_FALSE(burgers_characteristic_check(*w, 0.0, hi).converged);
  CHECK_FALSE(burgers_characteristic_check(*w, 0.0, 2 * lo).converged);
}

TEST_CASE("burgers solution is the derivative of the Hopf-Lax solution") {
  auto r = make_rugged_1d(7, 5);
  const auto g = GridGeometry::line(-2, 2, 2001);
  const double t = 0.02;
  const auto u = solve_hj_hopf_lax(*r, t, g);
  const auto du = u.derivative(0);
  for (std::size_t i = 100; i < 1900; i += 90) {
    const auto b = burgers_characteristic_check(*r, g.point(i)[0], t);
    if (!b.converged) continue;
    CHECK(std::abs(b.p - du[i]) <= 20 * g.spacing(0));
  }
}

TEST_CASE("convexity interval") {
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-3, 3, 121);
  const auto whole = convexity_interval(GridFunction::sample(*q, g), 0.0);
  CHECK(whole.lower == doctest::Approx(-3.0));
  CHECK(whole.upper == doctest::Approx(3.0));
  CHECK_THROWS_AS(convexity_interval(GridFunction::sample(*q, g), 1.0), std::invalid_argument);

  auto w = make_double_well(1.0);
  const auto gw = GridGeometry::line(-2, 2, 801);
  Interval prev = convexity_interval(GridFunction::sample(*w, gw), 1.0);
  CHECK(prev.lower == doctest::Approx(1 / std::sqrt(3.0)).epsilon(0.02));
  for (double t : {0.05, 0.1, 0.2}) {
    const auto u = solve_hj_hopf_lax(*w, t, gw);
    const auto iv = convexity_interval(u, gw.point(u.argmin())[0] > 0 ? gw.point(u.argmin())[0] : 1.0);
    CHECK(iv.lower <= prev.lower);
    CHECK(iv.upper >= prev.upper);
    prev = iv;
  }
}

TEST_CASE("convexity interval widens on the rugged objective") {
  auto r = make_rugged_1d(7, 5);
  const auto g = GridGeometry::line(-2, 2, 1601);
  const auto f = GridFunction::sample(*r, g);
  const double x0 = g.point(f.argmin())[0];
  Interval prev = convexity_interval(f, x0);
  for (double t : {0.002, 0.004, 0.008, 0.012, 0.016}) {
    const auto u = solve_hj_hopf_lax(*r, t, g);
    const auto iv = convexity_interval(u, g.point(u.argmin())[0]);
    CHECK(iv.lower <= prev.lower + 1e-12);
    CHECK(iv.upper >= prev.upper - 1e-12);
    prev = iv;
  }
}

TEST_CASE("backward HJB with zero horizon is the terminal cost") {
  auto w = make_double_well(1.0);
  const auto g = GridGeometry::line(-2.5, 2.5, 201);
  const auto sol = solve_hjb_backward(*w, *w, 0.2, 0.0, g);
  const double x = 0.3;
  CHECK(sol.value(std::span<const double>(&x, 1), 0.0) == doctest::Approx(f1(*w, x)).epsilon(1e-3));
}

TEST_CASE("backward HJB with zero drift is the viscous HJ solution in reversed time") {
  auto zero = make_affine({0.0});
  auto q = make_quadratic(1.0, {}, 1);
  const auto g = GridGeometry::line(-3, 3, 301);
  const auto sol = solve_hjb_backward(*zero, *q, 0.1, 0.5, g, 11);
  // u(x, 0) = x^2 / (2 (1 + T)) + (beta_inv / 2) ln(1 + T)
  for (double x : {-1.0, 0.0, 0.5, 1.2}) {
    const double expect = x * x / 3.0 + 0.05 * std::log(1.5);
    CHECK(sol.value(std::span<const double>(&x, 1), 0.0) == doctest::Approx(expect).epsilon(0.02));
    double gr;
    sol.gradient(std::span<const double>(&x, 1), 0.0, std::span<double>(&gr, 1));
    CHECK(gr == doctest::Approx(x / 1.5).epsilon(0.02).scale(1.0));
  }
}
