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

#include <string>
#include <vector>

namespace pdesmooth {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_y = false;
  int width = 640;
  int height = 400;
};

/// Self-contained SVG line plot: one polyline per series, axes with tick
/// labels and a legend listing the series in input order. Throws
/// std::invalid_argument for an empty series list, an empty series or
/// mismatched x/y lengths. With log_y, non-positive values are dropped.
std::string render_svg(const std::vector<Series>& series, const PlotOptions& opts = {});
void emit_plot(const std::vector<Series>& series, const std::string& path,
               const PlotOptions& opts = {});

}  // namespace pdesmooth
