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

#include <cmath>
#include <numbers>

#include "pdesmooth/analysis.hpp"
#include "pdesmooth/pde.hpp"

using namespace pdesmooth;

namespace {

bool within(double value, double target, double se, double k = 3.0) {
  return std::abs(value - target) <= k * se;
}

}  // namespace

TEST_CASE("invariant measure of the unit quadratic") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  const InvariantMeasureEstimate e =
      sample_invariant_measure(*f, {2.0}, 1.0, 1.0, 1'010'000, 10'000, 3, 2e-3);
  CHECK(e.n_samples == 1'000'000);
  CHECK(within(e.mean[0], 1.0, e.mean_stderr[0]));
  CHECK(within(e.covariance(0, 0), 0.5, e.variance_stderr[0]));
  CHECK(e.autocorrelation_time > 1.0);
}

TEST_CASE("cold invariant measure sits at the proximal point") {
  auto f = make_double_well(1.0);
  const double x = 1.1, gamma = 0.3;
  const InvariantMeasureEstimate e =
      sample_invariant_measure(*f, {x}, gamma, 1e-5, 60'000, 20'000, 1, 1e-3);
  const ProxResult p = prox_point(*f, std::span<const double>(&x, 1), gamma);
  CHECK(e.mean[0] == doctest::Approx(p.y[0]).epsilon(1e-3));
}

TEST_CASE("flat objective gives an Ornstein-Uhlenbeck measure") {
  auto f = make_affine({0.0, 0.0});
  const double gamma = 0.4, beta_inv = 0.5;
  const InvariantMeasureEstimate e =
      sample_invariant_measure(*f, {0.3, -0.7}, gamma, beta_inv, 2'010'000, 10'000, 5, 1e-2);
  CHECK(within(e.mean[0], 0.3, e.mean_stderr[0]));
  CHECK(within(e.mean[1], -0.7, e.mean_stderr[1]));
  for (Eigen::Index i = 0; i < 2; ++i)
    CHECK(e.covariance(i, i) == doctest::Approx(gamma * beta_inv).epsilon(0.05));
  CHECK(std::abs(e.covariance(0, 1)) < 0.05 * gamma * beta_inv);
  CHECK(e.covariance.isApprox(e.covariance.transpose()));
}

TEST_CASE("sampler divergence is reported") {
  auto f = make_function_1d(
      "concave", [](double x) { return -x * x; }, [](double x) { return -2 * x; });
  CHECK_THROWS_AS(sample_invariant_measure(*f, {0.1}, 1.0, 0.01, 100'000, 10, 1, 1e-2),
                  SamplerDivergence);
  CHECK_THROWS_AS(sample_invariant_measure(*f, {0.1}, 1.0, 0.01, 10, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("quadratic closed form") {
  const Matrix id = Matrix::Identity(2, 2);
  SUBCASE("symmetric case has zero mean") {
    const GaussianParameters g = quadratic_invariant_closed_form(2 * id, {0, 0}, {0, 0}, 0.5, 3.0);
    CHECK(g.mean == Vector{0, 0});
  }
  SUBCASE("unit example") {
    const GaussianParameters g = quadratic_invariant_closed_form(id, {0, 0}, {2, 0}, 1.0, 1.0);
    CHECK(g.mean[0] == doctest::Approx(1.0));
    CHECK(g.mean[1] == doctest::Approx(0.0));
    CHECK(g.covariance.isApprox(0.5 * id));
    CHECK(g.variant == QuadraticVariant::exact);
  }
  SUBCASE("printed variants are labeled and differ from the exact form") {
    Matrix q(2, 2);
    q << 0.5, 0.1, 0.1, 0.3;
    const Vector p{0.2, -0.1}, x{1.0, 0.5};
    const auto exact = quadratic_invariant_closed_form(q, p, x, 2.0, 1.0);
    const auto printed = quadratic_invariant_closed_form(q, p, x, 2.0, 1.0, QuadraticVariant::printed);
    const auto neumann =
        quadratic_invariant_closed_form(q, p, x, 2.0, 1.0, QuadraticVariant::printed_neumann);
    CHECK(printed.variant == QuadraticVariant::printed);
    CHECK(to_string(neumann.variant) == "printed_neumann");
    CHECK(neumann.in_validity_range);
    CHECK(!exact.covariance.isApprox(printed.covariance, 1e-3));
    // The Neumann form is second-order accurate in 1/gamma.
    CHECK((neumann.covariance - printed.covariance).norm() < 0.05);
    CHECK(!quadratic_invariant_closed_form(q, p, x, 0.2, 1.0, QuadraticVariant::printed_neumann)
               .in_validity_range);
  }
  SUBCASE("singular precision is rejected") {
    CHECK_THROWS_AS(quadratic_invariant_closed_form(-id, {0, 0}, {0, 0}, 1.0, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("closed form matches the sampler on a random 3x3 quadratic") {
  Rng rng(42);
  const Matrix q = random_spd(3, rng);
  const Vector p{0.3, -0.2, 0.1}, x{0.5, 0.0, -0.5};
  const double gamma = 0.5, beta = 2.0;
  auto f = make_quadratic(q, p);
  const auto g = quadratic_invariant_closed_form(q, p, x, gamma, beta);
  const auto e = sample_invariant_measure(*f, x, gamma, 1.0 / beta, 1'010'000, 10'000, 7, 2e-3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    CHECK(within(e.mean[i], g.mean[i], e.mean_stderr[i]));
    // Euler-Maruyama inflates the variance by about eta * lambda / 2.
    CHECK(within(e.covariance(ii, ii), g.covariance(ii, ii), e.variance_stderr[i], 4.0));
  }
}

TEST_CASE("homogenization on the quadratic converges to the smoothed gradient") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  const std::vector<double> probes{-1.5, -0.5, 0.7, 2.0};
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  HomogenizationOptions opts;
  opts.eta_y = 0.05;
  opts.reference = DriftReference::hopf_lax;
  const HomogenizationTable t = verify_homogenization(*f, probes, 1.0, 1e-4, eps, opts);
  REQUIRE(t.rows.size() == 3);
  for (const auto& p : t.rows[2].probes) CHECK(p.target == doctest::Approx(-p.x / 2));
  CHECK(t.rows[2].max_rel_deviation <= 0.02);
  CHECK(t.rows[1].mean_abs_deviation < t.rows[0].mean_abs_deviation);
  CHECK(t.rows[2].mean_abs_deviation < t.rows[1].mean_abs_deviation);
  CHECK(t.monotone);
}

TEST_CASE("homogenization without a gradient has no deviation") {
  auto f = make_affine({0.0});
  const std::vector<double> probes{-1.0, 0.5};
  const std::vector<double> eps{1e-1, 1e-2};
  const HomogenizationTable cold = verify_homogenization(*f, probes, 0.5, 0.0, eps);
  for (const auto& row : cold.rows) CHECK(row.mean_abs_deviation == 0.0);
  // With noise the estimates are unbiased: pooled squared z-scores stay near 1.
  const std::vector<double> more_probes{-1.0, 0.0, 0.5};
  const std::vector<double> more_eps{1e-1, 1e-2, 1e-3};
  const HomogenizationTable warm = verify_homogenization(*f, more_probes, 0.5, 0.2, more_eps);
  double z2 = 0;
  int count = 0;
  for (const auto& row : warm.rows)
    for (const auto& p : row.probes) {
      const double z = (p.estimate - p.target) / p.std_error;
      z2 += z * z;
      ++count;
    }
  CHECK(z2 / count <= 3.0);
}

TEST_CASE("homogenization rejects bad input") {
  auto f = make_quadratic(1.0, {0.0, 0.0}, 2);
  const std::vector<double> probes{0.0};
  const std::vector<double> eps{0.1};
  CHECK_THROWS_AS(verify_homogenization(*f, probes, 1.0, 0.1, eps), std::invalid_argument);
}

TEST_CASE("control improvement with zero horizon") {
  auto f = make_double_well(1.0);
  ControlOptions opts;
  opts.x0 = {0.4};
  const ControlComparison c = control_improvement_experiment(*f, *f, 0.0, 0.2, 100, 1, opts);
  CHECK(c.terminal_sgd.mean == doctest::Approx(f->value(opts.x0)));
  CHECK(c.terminal_csgd.mean == c.terminal_sgd.mean);
  CHECK(c.control_energy.mean == 0.0);
}

TEST_CASE("control improves a convex terminal cost") {
  auto f = make_quadratic(1.0, {0.0}, 1);
  auto v = make_quadratic(4.0, {-2.0}, 1);
  ControlOptions opts;
  opts.x0 = {1.0};
  opts.n_time_steps = 400;
  const ControlComparison c = control_improvement_experiment(*f, *v, 1.0, 0.1, 2000, 3, opts);
  CHECK(c.valid);
  CHECK(c.inequality_holds);
  CHECK(c.strict_gap);
  CHECK(c.control_energy.mean > 0);
  CHECK(c.improvement.mean > 0);
}

TEST_CASE("control lowers the double-well terminal cost") {
  auto f = make_double_well(1.0);
  ControlOptions opts;
  opts.n_time_steps = 500;
  const ControlComparison c = control_improvement_experiment(*f, *f, 2.0, 0.2, 2000, 5, opts);
  CHECK(c.valid);
  CHECK(c.terminal_csgd.mean < c.terminal_sgd.mean);
  CHECK(c.inequality_holds);
}

TEST_CASE("control batches give the same answer on several threads") {
  auto f = make_double_well(1.0);
  ControlOptions opts;
  opts.n_time_steps = 200;
  opts.grid_points = 201;
  const ControlComparison a = control_improvement_experiment(*f, *f, 1.0, 0.2, 400, 9, opts);
  opts.threads = 4;
  const ControlComparison b = control_improvement_experiment(*f, *f, 1.0, 0.2, 400, 9, opts);
  CHECK(a.terminal_csgd.mean == b.terminal_csgd.mean);
  CHECK(a.slack.std_error == b.slack.std_error);
}

TEST_CASE("control in two dimensions") {
  auto f = make_quadratic(1.0, {0.0, 0.0}, 2);
  auto v = make_quadratic(2.0, {-1.0, 0.5}, 2);
  ControlOptions opts;
  opts.x0 = {0.5, 0.5};
  opts.grid_points_2d = 61;
  opts.n_time_steps = 200;
  opts.n_snapshots = 101;
  const ControlComparison c = control_improvement_experiment(*f, *v, 0.5, 0.1, 400, 2, opts);
  CHECK(c.valid);
  CHECK(c.inequality_holds);
  CHECK(c.improvement.mean > 0);
}

TEST_CASE("semiconcavity of the smoothed quadratic is tight") {
  const double c = 2.0;
  auto f = make_quadratic(c, {0.0}, 1);
  const GridGeometry g = GridGeometry::line(-3, 3, 601);
  PdeSolveConfig cfg;
  cfg.beta_inv = 0.1;
  std::vector<GridFunction> series;
  const std::vector<double> times{0.1, 0.5, 1.0};
  for (double t : times) {
    cfg.t_final = t;
    series.push_back(solve_viscous_hj_cole_hopf(*f, cfg, g));
  }
  const std::vector<double> cs{c};
  const auto rows = semiconcavity_report(series, times, cs);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.bound == doctest::Approx(1.0 / (1.0 / c + r.t)));
    CHECK(std::abs(r.measured - r.bound) <= g.spacing(0));
    CHECK(r.violations == 0);
  }
}

TEST_CASE("heat flow loses semiconcavity slowly") {
  const GridGeometry g = GridGeometry::line(0, 2 * std::numbers::pi, 513);
  auto f = make_function_1d(
      "sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); });
  PdeSolveConfig cfg;
  cfg.beta_inv = 0.1;
  cfg.boundary = Boundary::periodic;
  std::vector<GridFunction> series;
  const std::vector<double> times{0.5, 1.0, 2.0};
  for (double t : times) {
    cfg.t_final = t;
    series.push_back(solve_heat(*f, cfg, g));
  }
  const double c0 = 1.0;
  const std::vector<double> cs{c0};
  const auto rows = semiconcavity_report(series, times, cs);
  for (const auto& r : rows) {
    CHECK(r.measured == doctest::Approx(std::exp(-cfg.beta_inv * r.t / 2)).epsilon(1e-3));
    CHECK(r.measured > 1.0 / (1.0 / c0 + r.t));
  }
}

TEST_CASE("rugged objective respects the 1/t bound") {
  auto f = make_rugged_1d(7, 5);
  const GridGeometry g = GridGeometry::line(-2, 2, 801);
  PdeSolveConfig cfg;
  cfg.beta_inv = 0.1;
  std::vector<GridFunction> series;
  const std::vector<double> times{0.05, 0.1, 0.2, 0.5, 1.0};
  for (double t : times) {
    cfg.t_final = t;
    series.push_back(solve_viscous_hj_cole_hopf(*f, cfg, g));
  }
  const std::vector<double> cs{std::numeric_limits<double>::infinity()};
  for (const auto& r : semiconcavity_report(series, times, cs)) {
    CHECK(r.bound == doctest::Approx(1.0 / r.t));
    CHECK(r.violations == 0);
  }
}

TEST_CASE("semiconcavity report in two dimensions includes the Laplacian") {
  auto f = make_quadratic(1.0, {0.0, 0.0}, 2);
  const GridGeometry g = GridGeometry::square(-2, 2, 81);
  PdeSolveConfig cfg;
  cfg.beta_inv = 0.1;
  cfg.t_final = 0.5;
  const std::vector<GridFunction> series{solve_viscous_hj_cole_hopf(*f, cfg, g)};
  const std::vector<double> times{0.5}, cs{1.0, 1.0};
  const auto rows = semiconcavity_report(series, times, cs, 2.0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].axis == -1);
  CHECK(rows[2].bound == doctest::Approx(1.0 / (0.5 + 0.25)));
  CHECK(rows[2].measured == doctest::Approx(2.0 / 1.5).epsilon(1e-3));
  for (const auto& r : rows) CHECK(r.violations == 0);
}

TEST_CASE("harmonic mean") {
  CHECK(harmonic_mean(std::vector<double>{1, 1, 1}) == 1.0);
  CHECK(harmonic_mean(std::vector<double>{1, 3}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(harmonic_mean(std::vector<double>{1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(harmonic_mean(std::vector<double>{}), std::invalid_argument);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng.index(10));
    for (double& a : v) a = std::exp(3 * rng.normal());
    const double hm = harmonic_mean(v);
    const double mn = *std::min_element(v.begin(), v.end());
    CHECK(mn <= hm * (1 + 1e-12));
    CHECK(hm <= static_cast<double>(v.size()) * mn * (1 + 1e-12));
  }
}

TEST_CASE("matrix spectra") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const MatrixSpectrum s = matrix_spectrum(a);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(3.0));
  CHECK(s.hm_lambda == doctest::Approx(1.5));
  CHECK(s.hm_diag == doctest::Approx(2.0));

  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 0.5, 2.0, 7.0;
  const MatrixSpectrum sd = matrix_spectrum(d);
  CHECK(sd.hm_lambda == doctest::Approx(sd.hm_diag).epsilon(1e-14));

  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixSpectrum r = matrix_spectrum(random_spd(8, rng));
    CHECK(r.hm_lambda <= r.hm_diag * (1 + 1e-12));
  }
}

TEST_CASE("spectrum summary at a quadratic minimum") {
  Matrix q(3, 3);
  q << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 0.2;
  auto f = make_quadratic(q, {0, 0, 0});
  const double t = 0.5;
  const SpectrumSummary s = spectrum_summary(*f, {0, 0, 0}, t);
  CHECK(!s.indefinite);
  CHECK(s.hm_below_diag);
  CHECK(s.hm_sandwich);
  CHECK(s.smoothed_bound_holds);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(s.smoothed_eigenvalues[i] ==
          doctest::Approx(s.eigenvalues[i] / (1 + t * s.eigenvalues[i])));
  CHECK(s.hm_bound == doctest::Approx(1.0 / (t + 1.0 / harmonic_mean(s.diagonal))));
  CHECK(s.am_lambda == doctest::Approx(q.trace() / 3));
}

TEST_CASE("spectrum summary flags indefinite Hessians") {
  Matrix q(2, 2);
  q << 1, 0, 0, -1;
  auto f = make_quadratic(q, {0, 0});
  const SpectrumSummary s = spectrum_summary(*f, {0, 0}, 0.0);
  CHECK(s.indefinite);
  CHECK(!s.warnings.empty());
  CHECK(s.hm_lambda == doctest::Approx(1.0));
  CHECK_THROWS_AS(spectrum_summary(*f, {1, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("stationary centers of elastic and entropy sgd agree on a quadratic") {
  auto f = with_gradient_noise(make_quadratic(1.0, {0.5}, 1), 0.5);
  OptimizerConfig cfg = default_config(Algorithm::entropy_sgd);
  cfg.n_workers = 4;
  cfg.gamma0 = 0.5;
  cfg.gamma1 = 0.0;
  cfg.eta = 0.2;
  cfg.delta = 0.0;
  const CenterComparison c = compare_stationary_centers(*f, cfg, 16, 300, 100, 1);
  CHECK(c.agree);
  CHECK(c.elastic[0].mean == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("autocorrelation time") {
  Rng rng(5);
  std::vector<double> white(200000), ar(200000);
  double a = 0;
  for (std::size_t i = 0; i < white.size(); ++i) {
    white[i] = rng.normal();
    a = 0.9 * a + rng.normal();
    ar[i] = a;
  }
  CHECK(integrated_autocorrelation_time(white) == doctest::Approx(1.0).epsilon(0.15));
  // AR(1) with coefficient r has tau = (1 + r) / (1 - r) = 19.
  CHECK(integrated_autocorrelation_time(ar) == doctest::Approx(19.0).epsilon(0.15));
  CHECK(integrated_autocorrelation_time(std::vector<double>(50, 2.0)) == 1.0);
  const MeanStd m = mean_std(std::vector<double>{1, 2, 3});
  CHECK(m.mean == 2.0);
  CHECK(m.std == doctest::Approx(1.0));
}
