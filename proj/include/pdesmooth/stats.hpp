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

#include <span>
#include <vector>

namespace pdesmooth {

/// Normalized autocorrelation of a series for lags 0..n-1, via FFT with zero padding.
std::vector<double> autocorrelation(std::span<const double> series);

/// Integrated autocorrelation time tau = 1 + 2 sum_{l=1}^{W} rho(l), with the
/// window W the smallest lag satisfying W >= c tau(W). Returns 1 for an
/// uncorrelated or constant series.
double integrated_autocorrelation_time(std::span<const double> series, double c = 5.0);

struct SeriesEstimate {
  double mean = 0;
  double variance = 0;  // sample variance of the series
  double std_error = 0;  // of the mean, inflated by the autocorrelation time
  double tau = 1;
  std::size_t n = 0;
};

SeriesEstimate estimate_series(std::span<const double> series);

/// Mean and sample standard deviation of independent values.
struct MeanStd {
  double mean = 0;
  double std = 0;
  double std_error = 0;
  std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

}  // namespace pdesmooth
