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

#include "pdesmooth/analysis.hpp"
#include "pdesmooth/pde.hpp"

namespace pdesmooth {
namespace {

Vector positive_part(const Vector& v) {
  Vector out;
  for (double a : v)
    if (a > 0) out.push_back(a);
  return out;
}

Vector sorted_eigenvalues(const Matrix& a) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Vector ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace

MatrixSpectrum matrix_spectrum(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("matrix must be square");
  MatrixSpectrum s;
  s.eigenvalues = sorted_eigenvalues(0.5 * (a + a.transpose()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) s.diagonal.push_back(a(i, i));
  s.hm_lambda = harmonic_mean(s.eigenvalues);
  s.hm_diag = harmonic_mean(s.diagonal);
  return s;
}

SpectrumSummary spectrum_summary(const Objective& f, const Vector& x_star, double t,
                                 std::span<const double> c_axis) {
  const std::size_t n = f.dim();
  if (x_star.size() != n) throw std::invalid_argument("x_star has the wrong dimension");
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  const Vector grad = f.gradient(x_star);
  double gnorm = 0;
  for (double g : grad) gnorm += g * g;
  if (std::sqrt(gnorm) > 1e-6) throw std::invalid_argument("x_star is not a critical point");
  const std::optional<Matrix> h = f.hessian(x_star);
  if (!h) throw std::invalid_argument("Hessian unavailable above the dense limit");

  SpectrumSummary s;
  s.eigenvalues = sorted_eigenvalues(*h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    s.diagonal.push_back((*h)(ii, ii));
  }
  s.am_lambda = arithmetic_mean(s.eigenvalues);

  Vector lambda = s.eigenvalues, diag = s.diagonal;
  if (s.eigenvalues.front() <= 0) {
    s.indefinite = true;
    s.warnings.push_back("Hessian at x_star is not positive definite; means use positive entries");
    lambda = positive_part(lambda);
    diag = positive_part(diag);
  }
  if (!lambda.empty()) s.hm_lambda = harmonic_mean(lambda);
  if (!diag.empty()) s.hm_diag = harmonic_mean(diag);
  s.hm_below_diag = !lambda.empty() && !diag.empty() && s.hm_lambda <= s.hm_diag * (1 + 1e-12);
  if (!lambda.empty()) {
    const double mn = lambda.front();
    const double m = static_cast<double>(lambda.size());
    s.hm_sandwich = mn <= s.hm_lambda * (1 + 1e-12) && s.hm_lambda <= m * mn * (1 + 1e-12);
  }

  s.c_axis.assign(c_axis.begin(), c_axis.end());
  if (s.c_axis.empty()) s.c_axis = s.diagonal;
  if (s.c_axis.size() != n) throw std::invalid_argument("one semiconcavity constant per axis");
  s.c_laplacian = h->trace();

  // Hessian of the Hopf-Lax solution at x: H(y*) (I + t H(y*))^-1 with y* the proximal point.
  Matrix hu = *h;
  if (t > 0) {
    const ProxResult prox = prox_point(f, x_star, t);
    const Matrix hy = f.hessian(prox.y).value();
    const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    hu = hy * (id + t * hy).inverse();
  }
  s.smoothed_eigenvalues = sorted_eigenvalues(0.5 * (hu + hu.transpose()));
  const Vector smoothed_pos = positive_part(s.smoothed_eigenvalues);
  if (!smoothed_pos.empty()) s.hm_smoothed = harmonic_mean(smoothed_pos);

  if (std::all_of(s.c_axis.begin(), s.c_axis.end(), [](double c) { return c > 0; })) {
    s.hm_bound = 1.0 / (t + 1.0 / harmonic_mean(s.c_axis));
    s.smoothed_bound_holds = s.hm_smoothed <= s.hm_bound * (1 + 1e-9);
  } else {
    s.warnings.push_back("non-positive semiconcavity constant; no harmonic-mean bound");
  }
  return s;
}

Matrix random_spd(std::size_t n, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(n);
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = rng.normal();
  return g * g.transpose() / static_cast<double>(n) + 1e-2 * Matrix::Identity(m, m);
}

}  // namespace pdesmooth
