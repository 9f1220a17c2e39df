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

#include "pdesmooth/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pdesmooth/pde.hpp"

namespace pdesmooth {

InvariantMeasureEstimate sample_invariant_measure(const Objective& f, const Vector& x,
                                                  double gamma, double beta_inv,
                                                  std::size_t n_steps, std::size_t burn_in,
                                                  std::uint64_t seed, double eta_y) {
  const std::size_t n = f.dim();
  if (x.size() != n) throw std::invalid_argument("x has the wrong dimension");
  if (!(gamma > 0) || beta_inv < 0 || !(eta_y > 0))
    throw std::invalid_argument("gamma and eta_y must be positive, beta_inv non-negative");
  if (burn_in >= n_steps) throw std::invalid_argument("burn_in must be smaller than n_steps");

  Rng rng(derive_seed(seed, "invariant"));
  const double noise = std::sqrt(2.0 * eta_y * beta_inv);
  const std::size_t kept = n_steps - burn_in;
  std::vector<Vector> series(n, Vector(kept));
  Vector y = x, g(n);
  for (std::size_t step = 0; step < n_steps; ++step) {
    f.gradient(y, g);
    double r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] -= eta_y * (g[i] + (y[i] - x[i]) / gamma);
      if (beta_inv > 0) y[i] += noise * rng.normal();
      r2 += y[i] * y[i];
    }
    if (!(r2 <= 1e12))
      throw SamplerDivergence("inner dynamics diverged at step " + std::to_string(step) +
                              "; gamma is too large for the local convexity");
    if (step >= burn_in)
      for (std::size_t i = 0; i < n; ++i) series[i][step - burn_in] = y[i];
  }

  InvariantMeasureEstimate est;
  est.n_samples = kept;
  est.mean.assign(n, 0.0);
  est.mean_stderr.assign(n, 0.0);
  est.variance_stderr.assign(n, 0.0);
  est.covariance = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const SeriesEstimate e = estimate_series(series[i]);
    est.mean[i] = e.mean;
    est.mean_stderr[i] = e.std_error;
    est.autocorrelation_time = std::max(est.autocorrelation_time, e.tau);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0;
      for (std::size_t s = 0; s < kept; ++s)
        acc += (series[i][s] - est.mean[i]) * (series[j][s] - est.mean[j]);
      const double c = acc / static_cast<double>(std::max<std::size_t>(kept - 1, 1));
      est.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
      est.covariance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
    }
  Vector sq(kept);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < kept; ++s)
      sq[s] = (series[i][s] - est.mean[i]) * (series[i][s] - est.mean[i]);
    const SeriesEstimate e = estimate_series(sq);
    est.variance_stderr[i] = e.std_error;
    est.autocorrelation_time = std::max(est.autocorrelation_time, e.tau);
  }
  return est;
}

std::string to_string(QuadraticVariant v) {
  switch (v) {
    case QuadraticVariant::exact: return "exact";
    case QuadraticVariant::printed: return "printed";
    case QuadraticVariant::printed_neumann: return "printed_neumann";
  }
  return "unknown";
}

GaussianParameters quadratic_invariant_closed_form(const Matrix& q, const Vector& p,
                                                   const Vector& x, double gamma, double beta,
                                                   QuadraticVariant variant) {
  const auto n = q.rows();
  if (q.cols() != n || static_cast<Eigen::Index>(p.size()) != n ||
      static_cast<Eigen::Index>(x.size()) != n)
    throw std::invalid_argument("Q, p and x dimensions differ");
  if (!(gamma > 0) || !(beta > 0)) throw std::invalid_argument("gamma and beta must be positive");
  if (!q.isApprox(q.transpose(), 1e-12)) throw std::invalid_argument("Q must be symmetric");

  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n), pv(p.data(), n);
  const Matrix id = Matrix::Identity(n, n);
  GaussianParameters out;
  out.variant = variant;
  Eigen::VectorXd mean;
  Matrix inv;
  if (variant == QuadraticVariant::exact) {
    const Matrix precision = q + id / gamma;
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("singular or indefinite precision");
    inv = llt.solve(id);
    mean = inv * (xv / gamma - pv);
  } else {
    const Eigen::VectorXd grad = q * xv + pv;
    if (variant == QuadraticVariant::printed) {
      Eigen::LLT<Matrix> llt(q + gamma * id);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("singular or indefinite precision");
      inv = llt.solve(id);
    } else {
      const double qnorm = Eigen::SelfAdjointEigenSolver<Matrix>(q, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .cwiseAbs()
                                .maxCoeff();
      out.in_validity_range = gamma > qnorm;
      inv = id / gamma - q / (gamma * gamma);
    }
    mean = xv - inv * grad;
  }
  out.mean.assign(mean.data(), mean.data() + n);
  out.covariance = inv / beta;
  return out;
}

HomogenizationTable verify_homogenization(const Objective& f, std::span<const double> probes,
                                          double gamma, double beta_inv,
                                          std::span<const double> epsilons,
                                          const HomogenizationOptions& opts) {
  if (f.dim() != 1) throw std::invalid_argument("homogenization check needs a 1D objective");
  if (!(gamma > 0) || beta_inv < 0) throw std::invalid_argument("gamma > 0 and beta_inv >= 0 required");
  if (probes.empty() || epsilons.empty() || opts.n_seeds < 2)
    throw std::invalid_argument("need probes, epsilons and at least two seeds");

  std::vector<double> targets;
  for (double x : probes) {
    if (opts.reference == DriftReference::hopf_lax)
      targets.push_back(-prox_point(f, std::span<const double>(&x, 1), gamma).gradient[0]);
    else
      targets.push_back(-cole_hopf_point(f, x, gamma, beta_inv).gradient);
  }

  const double noise = std::sqrt(2.0 * opts.eta_y * beta_inv);
  HomogenizationTable table;
  for (double eps : epsilons) {
    if (!(eps > 0)) throw std::invalid_argument("epsilon must be positive");
    HomogenizationRow row;
    row.epsilon = eps;
    row.inner_steps = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / eps)));
    double var_sum = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double x = probes[p];
      std::vector<double> drifts;
      std::vector<double> trace;
      for (std::size_t s = 0; s < opts.n_seeds; ++s) {
        // Common random numbers across epsilons: the stream depends on seed and probe only.
        Rng rng(derive_seed(derive_seed(opts.seed, "homogenization", s), "probe", p));
        double y = x, sum = 0, g = 0;
        for (std::size_t k = 0; k < row.inner_steps; ++k) {
          f.gradient(std::span<const double>(&y, 1), std::span<double>(&g, 1));
          y -= opts.eta_y * (g + (y - x) / gamma);
          if (beta_inv > 0) y += noise * rng.normal();
          if (!(std::abs(y) <= 1e6)) throw SamplerDivergence("inner dynamics diverged");
          sum += y;
          if (s == 0) trace.push_back(y);
        }
        drifts.push_back(-(x - sum / static_cast<double>(row.inner_steps)) / gamma);
      }
      if (trace.size() < 4 || integrated_autocorrelation_time(trace) > static_cast<double>(trace.size()))
        row.ergodic = false;
      const MeanStd m = mean_std(drifts);
      HomogenizationProbe probe{x, targets[p], m.mean, m.std_error};
      const double dev = std::abs(probe.estimate - probe.target);
      row.mean_abs_deviation += dev / static_cast<double>(probes.size());
      var_sum += m.std_error * m.std_error;
      if (probe.target != 0.0)
        row.max_rel_deviation = std::max(row.max_rel_deviation, dev / std::abs(probe.target));
      row.probes.push_back(probe);
    }
    row.std_error = std::sqrt(var_sum) / static_cast<double>(probes.size());
    table.rows.push_back(std::move(row));
  }

  std::vector<const HomogenizationRow*> by_eps;
  for (const auto& r : table.rows) by_eps.push_back(&r);
  std::sort(by_eps.begin(), by_eps.end(),
            [](const auto* a, const auto* b) { return a->epsilon > b->epsilon; });
  for (std::size_t i = 1; i < by_eps.size(); ++i) {
    const double tol = 2.0 * std::hypot(by_eps[i]->std_error, by_eps[i - 1]->std_error);
    if (by_eps[i]->mean_abs_deviation > by_eps[i - 1]->mean_abs_deviation + tol)
      table.monotone = false;
  }
  return table;
}

std::vector<SemiconcavityRow> semiconcavity_report(const std::vector<GridFunction>& series,
                                                   std::span<const double> times,
                                                   std::span<const double> c_axis,
                                                   double c_laplacian) {
  if (series.size() != times.size()) throw std::invalid_argument("one time per grid function");
  std::vector<SemiconcavityRow> rows;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const GridFunction& u = series[s];
    const GridGeometry& g = u.geometry();
    const std::size_t dim = g.dim();
    if (c_axis.size() != dim) throw std::invalid_argument("one semiconcavity constant per axis");
    const double t = times[s];
    const std::size_t n0 = g.axis(0).n;
    const std::size_t n1 = dim == 2 ? g.axis(1).n : 1;

    auto second = [&](std::size_t k, std::size_t i, std::size_t j) {
      const double h = g.spacing(k);
      if (k == 0) return (u.at(i + 1, j) - 2 * u.at(i, j) + u.at(i - 1, j)) / (h * h);
      return (u.at(i, j + 1) - 2 * u.at(i, j) + u.at(i, j - 1)) / (h * h);
    };
    auto decay = [&](double c, double rate) { return 1.0 / (1.0 / c + rate); };

    for (std::size_t k = 0; k < dim; ++k) {
      SemiconcavityRow row;
      row.t = t;
      row.axis = static_cast<int>(k);
      row.bound = decay(c_axis[k], t);
      row.tolerance = 10.0 * g.spacing(k);
      row.measured = -std::numeric_limits<double>::infinity();
      const std::size_t lo0 = k == 0 ? 1 : 0, hi0 = k == 0 ? n0 - 1 : n0;
      const std::size_t lo1 = k == 1 ? 1 : 0, hi1 = k == 1 ? n1 - 1 : n1;
      for (std::size_t i = lo0; i < hi0; ++i)
        for (std::size_t j = lo1; j < hi1; ++j) {
          const double d = second(k, i, j);
          row.measured = std::max(row.measured, d);
          if (d > row.bound + row.tolerance) ++row.violations;
        }
      rows.push_back(row);
    }
    if (dim == 2) {
      SemiconcavityRow row;
      row.t = t;
      row.axis = -1;
      row.bound = decay(c_laplacian, t / 2.0);
      row.tolerance = 10.0 * std::max(g.spacing(0), g.spacing(1));
      row.measured = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i + 1 < n0; ++i)
        for (std::size_t j = 1; j + 1 < n1; ++j) {
          const double d = second(0, i, j) + second(1, i, j);
          row.measured = std::max(row.measured, d);
          if (d > row.bound + row.tolerance) ++row.violations;
        }
      rows.push_back(row);
    }
  }
  return rows;
}

double harmonic_mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("harmonic mean of an empty vector");
  double acc = 0;
  for (double a : v) {
    if (!(a > 0)) throw std::invalid_argument("harmonic mean needs positive components");
    acc += 1.0 / a;
  }
  return static_cast<double>(v.size()) / acc;
}

double arithmetic_mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty vector");
  double acc = 0;
  for (double a : v) acc += a;
  return acc / static_cast<double>(v.size());
}

}  // namespace pdesmooth
