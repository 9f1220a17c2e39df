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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pdesmooth/rng.hpp"

namespace pdesmooth {

using Vector = std::vector<double>;
using Matrix = Eigen::MatrixXd;

/// Dense Hessians are formed only up to this dimension; above it callers use
/// Objective::hessian_vector.
inline constexpr std::size_t kDenseHessianLimit = 64;

/// Scalar loss with exact gradient, a stochastic (minibatch or noisy)
/// gradient and an optional dense Hessian. Evaluation is pure and reentrant;
/// stochastic gradients draw only from the Rng passed in.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;

  /// Unbiased estimate of the gradient. The default is the exact gradient
  /// and consumes no random numbers.
  virtual void stochastic_gradient(std::span<const double> x, Rng& rng,
                                   std::span<double> g) const;

  /// Exact Hessian where the objective provides one, otherwise central
  /// differences of the gradient. Empty above kDenseHessianLimit.
  virtual std::optional<Matrix> hessian(std::span<const double> x) const;

  /// Variance scale of the stochastic gradient, E|g_mb - g|^2 <= noise_scale().
  virtual double noise_scale() const { return 0.0; }

  Vector gradient(std::span<const double> x) const;
  Vector hessian_vector(std::span<const double> x, std::span<const double> v) const;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(x) = c |x|^2 / 2 + p.x in n dimensions (p empty means zero).
ObjectivePtr make_quadratic(double c, Vector p, std::size_t n);
/// f(x) = x^T Q x / 2 + p.x with Q symmetric.
ObjectivePtr make_quadratic(Matrix q, Vector p);
/// f(x) = slope.x + offset. A zero slope gives the constant objective.
ObjectivePtr make_affine(Vector slope, double offset = 0.0);
/// f(x) = (x^2 - a^2)^2 in one dimension.
ObjectivePtr make_double_well(double a);
ObjectivePtr make_rugged_1d(std::uint64_t seed, int n_modes);
ObjectivePtr make_tiny_mlp(std::uint64_t seed, int hidden, int n_samples, int batch = 16);
/// One-dimensional objective from closed-form value and derivatives.
ObjectivePtr make_function_1d(std::string name, std::function<double(double)> f,
                              std::function<double(double)> df,
                              std::function<double(double)> d2f = {});
/// Wraps `base` so that stochastic_gradient adds N(0, noise_scale/n I).
ObjectivePtr with_gradient_noise(ObjectivePtr base, double noise_scale);

/// Seeded multi-well test function: a coercive envelope x^2/2 plus
/// trigonometric perturbations. The dominant mode has (n_modes + 1/2)
/// periods across [-half_width, half_width] and slope twice the envelope
/// slope at the box edge, which yields at least n_modes local minima there.
class Rugged1d final : public Objective {
 public:
  Rugged1d(std::uint64_t seed, int n_modes);

  std::size_t dim() const override { return 1; }
  std::string name() const override;
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  std::optional<Matrix> hessian(std::span<const double> x) const override;

  double f(double x) const;
  double df(double x) const;
  double d2f(double x) const;
  double half_width() const { return half_width_; }
  int n_modes() const { return n_modes_; }

 private:
  struct Mode {
    double amplitude, frequency, phase;
  };
  std::uint64_t seed_;
  int n_modes_;
  double half_width_ = 2.0;
  std::vector<Mode> modes_;
};

/// Two-layer ReLU classifier (2 -> hidden -> 2, softmax cross-entropy) on a
/// seeded two-cluster data set. Parameters are packed as W1 (hidden x 2,
/// row-major), b1, W2 (2 x hidden, row-major), b2.
class TinyMlp final : public Objective {
 public:
  TinyMlp(std::uint64_t seed, int hidden, int n_samples, int batch);

  std::size_t dim() const override { return dim_; }
  std::string name() const override;
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  /// Mean gradient over `batch` samples drawn with replacement.
  void stochastic_gradient(std::span<const double> x, Rng& rng,
                           std::span<double> g) const override;

  void batch_gradient(std::span<const double> x, std::span<const std::size_t> samples,
                      std::span<double> g) const;
  Vector initial_parameters() const;
  std::size_t parameter_count() const { return dim_; }
  int batch_size() const { return batch_; }
  int n_samples() const { return static_cast<int>(labels_.size()); }
  int hidden() const { return hidden_; }
  /// Same data and initialization with a different minibatch size.
  std::shared_ptr<TinyMlp> with_batch(int batch) const;

 private:
  double sample_loss(std::span<const double> x, std::size_t i, std::span<double> g,
                     double weight) const;

  std::uint64_t seed_;
  int hidden_;
  int batch_;
  std::size_t dim_;
  std::vector<double> inputs_;  // n_samples x 2
  std::vector<int> labels_;
};

struct KnownMinimum {
  Vector location;
  double value;
};

struct Box {
  Vector lower;
  Vector upper;
};

struct TestCorpusEntry {
  std::string name;
  ObjectivePtr objective;
  std::vector<KnownMinimum> known_minima;
  Box domain_box;
  Vector start;  // default initial iterate for optimizers
};

/// Builds a corpus entry from its name: quadratic_c<c>_n<n>,
/// double_well_a<a>, rugged_s<seed>_m<modes>, mlp_h<hidden>_n<samples>[_b<batch>][_s<seed>].
TestCorpusEntry make_corpus_entry(std::string_view name);

/// Newton iteration on the gradient (gradient descent fallback) until
/// |grad| <= tol.
Vector polish_minimum(const Objective& f, Vector x, double tol = 1e-12, int max_iter = 200);

}  // namespace pdesmooth
