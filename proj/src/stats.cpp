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

#include "pdesmooth/stats.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace pdesmooth {
namespace {

// FFTW planning is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n == 0) return {};
  double mean = 0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  const std::size_t nc = m / 2 + 1;
  double* buf = fftw_alloc_real(m);
  fftw_complex* spec = fftw_alloc_complex(nc);
  fftw_plan fwd, back;
  {
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf, spec, FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, buf, FFTW_ESTIMATE);
  }

  for (std::size_t i = 0; i < m; ++i) buf[i] = i < n ? series[i] - mean : 0.0;
  fftw_execute(fwd);
  for (std::size_t i = 0; i < nc; ++i) {
    spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
    spec[i][1] = 0.0;
  }
  fftw_execute(back);

  std::vector<double> rho(n, 0.0);
  if (buf[0] > 0)
    for (std::size_t l = 0; l < n; ++l) rho[l] = buf[l] / buf[0];
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(back);
  }
  fftw_free(buf);
  fftw_free(spec);
  return rho;
}

double integrated_autocorrelation_time(std::span<const double> series, double c) {
  const std::vector<double> rho = autocorrelation(series);
  if (rho.size() < 2 || rho[0] == 0.0) return 1.0;
  double tau = 1.0;
  for (std::size_t w = 1; w < rho.size(); ++w) {
    tau += 2.0 * rho[w];
    if (static_cast<double>(w) >= c * tau) break;
  }
  return std::max(tau, 1.0);
}

SeriesEstimate estimate_series(std::span<const double> series) {
  SeriesEstimate e;
  e.n = series.size();
  if (e.n == 0) throw std::invalid_argument("empty series");
  for (double v : series) e.mean += v;
  e.mean /= static_cast<double>(e.n);
  for (double v : series) e.variance += (v - e.mean) * (v - e.mean);
  e.variance /= static_cast<double>(std::max<std::size_t>(e.n - 1, 1));
  e.tau = integrated_autocorrelation_time(series);
  e.std_error = std::sqrt(e.variance * e.tau / static_cast<double>(e.n));
  return e;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd m;
  m.n = values.size();
  if (m.n == 0) throw std::invalid_argument("no values");
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(m.n);
  if (m.n > 1) {
    double acc = 0;
    for (double v : values) acc += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(acc / static_cast<double>(m.n - 1));
  }
  m.std_error = m.std / std::sqrt(static_cast<double>(m.n));
  return m;
}

}  // namespace pdesmooth
