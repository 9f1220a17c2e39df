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

#include "pdesmooth/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <regex>
#include <stdexcept>

namespace pdesmooth {

void Objective::stochastic_gradient(std::span<const double> x, Rng& /*rng*/,
                                    std::span<double> g) const {
  gradient(x, g);
}

Vector Objective::gradient(std::span<const double> x) const {
  Vector g(dim());
  gradient(x, g);
  return g;
}

std::optional<Matrix> Objective::hessian(std::span<const double> x) const {
  const std::size_t n = dim();
  if (n > kDenseHessianLimit) return std::nullopt;
  Matrix h(n, n);
  Vector xp(x.begin(), x.end()), gp(n), gm(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    gradient(xp, gp);
    xp[j] = x[j] - step;
    gradient(xp, gm);
    xp[j] = x[j];
    for (std::size_t i = 0; i < n; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * step);
  }
  return Matrix(0.5 * (h + h.transpose()));
}

Vector Objective::hessian_vector(std::span<const double> x, std::span<const double> v) const {
  const std::size_t n = dim();
  double xnorm = 0.0, vnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xnorm += x[i] * x[i];
    vnorm += v[i] * v[i];
  }
  Vector out(n, 0.0);
  if (vnorm == 0.0) return out;
  const double eps = 1e-5 * std::max(1.0, std::sqrt(xnorm)) / std::sqrt(vnorm);
  Vector xp(n), xm(n), gp(n), gm(n);
  for (std::size_t i = 0; i < n; ++i) {
    xp[i] = x[i] + eps * v[i];
    xm[i] = x[i] - eps * v[i];
  }
  gradient(xp, gp);
  gradient(xm, gm);
  for (std::size_t i = 0; i < n; ++i) out[i] = (gp[i] - gm[i]) / (2.0 * eps);
  return out;
}

namespace {

class Quadratic final : public Objective {
 public:
  Quadratic(Matrix q, Vector p, std::string name)
      : q_(std::move(q)), p_(std::move(p)), name_(std::move(name)) {}

  std::size_t dim() const override { return p_.size(); }
  std::string name() const override { return name_; }

  double value(std::span<const double> x) const override {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim());
    Eigen::Map<const Eigen::VectorXd> pv(p_.data(), dim());
    return 0.5 * xv.dot(q_ * xv) + pv.dot(xv);
  }

  void gradient(std::span<const double> x, std::span<double> g) const override {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim());
    Eigen::Map<const Eigen::VectorXd> pv(p_.data(), dim());
    Eigen::Map<Eigen::VectorXd>(g.data(), dim()) = q_ * xv + pv;
  }

  std::optional<Matrix> hessian(std::span<const double>) const override { return q_; }

 private:
  Matrix q_;
  Vector p_;
  std::string name_;
};

class Affine final : public Objective {
 public:
  Affine(Vector slope, double offset) : slope_(std::move(slope)), offset_(offset) {}

  std::size_t dim() const override { return slope_.size(); }
  std::string name() const override { return "affine"; }
  double value(std::span<const double> x) const override {
    return offset_ + std::inner_product(slope_.begin(), slope_.end(), x.begin(), 0.0);
  }
  void gradient(std::span<const double>, std::span<double> g) const override {
    std::copy(slope_.begin(), slope_.end(), g.begin());
  }
  std::optional<Matrix> hessian(std::span<const double>) const override {
    return Matrix::Zero(dim(), dim());
  }

 private:
  Vector slope_;
  double offset_;
};

class DoubleWell final : public Objective {
 public:
  explicit DoubleWell(double a) : a2_(a * a), a_(a) {}

  std::size_t dim() const override { return 1; }
  std::string name() const override;
  double value(std::span<const double> x) const override {
    const double d = x[0] * x[0] - a2_;
    return d * d;
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    g[0] = 4.0 * x[0] * (x[0] * x[0] - a2_);
  }
  std::optional<Matrix> hessian(std::span<const double> x) const override {
    Matrix h(1, 1);
    h(0, 0) = 12.0 * x[0] * x[0] - 4.0 * a2_;
    return h;
  }

 private:
  double a2_;
  double a_;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string DoubleWell::name() const { return "double_well_a" + format_number(a_); }

class Function1d final : public Objective {
 public:
  Function1d(std::string name, std::function<double(double)> f, std::function<double(double)> df,
             std::function<double(double)> d2f)
      : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)) {}

  std::size_t dim() const override { return 1; }
  std::string name() const override { return name_; }
  double value(std::span<const double> x) const override { return f_(x[0]); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    g[0] = df_(x[0]);
  }
  std::optional<Matrix> hessian(std::span<const double> x) const override {
    if (!d2f_) return Objective::hessian(x);
    Matrix h(1, 1);
    h(0, 0) = d2f_(x[0]);
    return h;
  }

 private:
  std::string name_;
  std::function<double(double)> f_, df_, d2f_;
};

class NoisyGradient final : public Objective {
 public:
  NoisyGradient(ObjectivePtr base, double noise) : base_(std::move(base)), noise_(noise) {}

  std::size_t dim() const override { return base_->dim(); }
  std::string name() const override { return base_->name(); }
  double value(std::span<const double> x) const override { return base_->value(x); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    base_->gradient(x, g);
  }
  void stochastic_gradient(std::span<const double> x, Rng& rng,
                           std::span<double> g) const override {
    base_->stochastic_gradient(x, rng, g);
    const double s = std::sqrt(noise_ / static_cast<double>(dim()));
    for (double& gi : g) gi += s * rng.normal();
  }
  std::optional<Matrix> hessian(std::span<const double> x) const override {
    return base_->hessian(x);
  }
  double noise_scale() const override { return base_->noise_scale() + noise_; }

 private:
  ObjectivePtr base_;
  double noise_;
};

}  // namespace

ObjectivePtr make_quadratic(double c, Vector p, std::size_t n) {
  if (!(c > 0.0)) throw std::invalid_argument("make_quadratic: curvature c must be positive");
  if (n == 0) throw std::invalid_argument("make_quadratic: dimension must be positive");
  if (p.empty()) p.assign(n, 0.0);
  if (p.size() != n) throw std::invalid_argument("make_quadratic: p has wrong dimension");
  return std::make_shared<Quadratic>(c * Matrix::Identity(n, n), std::move(p),
                                     "quadratic_c" + format_number(c) + "_n" + std::to_string(n));
}

ObjectivePtr make_quadratic(Matrix q, Vector p) {
  if (q.rows() != q.cols() || q.rows() == 0)
    throw std::invalid_argument("make_quadratic: Q must be square and non-empty");
  if (p.empty()) p.assign(q.rows(), 0.0);
  if (static_cast<Eigen::Index>(p.size()) != q.rows())
    throw std::invalid_argument("make_quadratic: p has wrong dimension");
  if (!q.isApprox(q.transpose())) throw std::invalid_argument("make_quadratic: Q not symmetric");
  return std::make_shared<Quadratic>(std::move(q), std::move(p), "quadratic");
}

ObjectivePtr make_affine(Vector slope, double offset) {
  if (slope.empty()) throw std::invalid_argument("make_affine: empty slope");
  return std::make_shared<Affine>(std::move(slope), offset);
}

ObjectivePtr make_double_well(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("make_double_well: a must be positive");
  return std::make_shared<DoubleWell>(a);
}

ObjectivePtr make_rugged_1d(std::uint64_t seed, int n_modes) {
  return std::make_shared<Rugged1d>(seed, n_modes);
}

ObjectivePtr make_tiny_mlp(std::uint64_t seed, int hidden, int n_samples, int batch) {
  return std::make_shared<TinyMlp>(seed, hidden, n_samples, batch);
}

ObjectivePtr make_function_1d(std::string name, std::function<double(double)> f,
                              std::function<double(double)> df,
                              std::function<double(double)> d2f) {
  return std::make_shared<Function1d>(std::move(name), std::move(f), std::move(df),
                                      std::move(d2f));
}

ObjectivePtr with_gradient_noise(ObjectivePtr base, double noise_scale) {
  if (noise_scale < 0.0) throw std::invalid_argument("with_gradient_noise: negative noise scale");
  return std::make_shared<NoisyGradient>(std::move(base), noise_scale);
}

// ---------------------------------------------------------------------------
// Rugged1d

Rugged1d::Rugged1d(std::uint64_t seed, int n_modes) : seed_(seed), n_modes_(n_modes) {
  if (n_modes < 2) throw std::invalid_argument("make_rugged_1d: n_modes must be >= 2");
  Rng rng(derive_seed(seed, "rugged"));
  const double two_pi = 2.0 * std::numbers::pi;
  const double edge_slope = half_width_;  // envelope slope at the box edge
  const double w1 = std::numbers::pi * (n_modes + 0.5) / half_width_;
  modes_.push_back({2.0 * edge_slope / w1, w1, two_pi * rng.uniform()});
  // Secondary modes carry at most a quarter of the dominant slope in total.
  for (int j = 0; j < 2; ++j) {
    const double w = w1 * (1.3 + 0.9 * rng.uniform());
    const double slope = 0.125 * 2.0 * edge_slope * (0.2 + 0.8 * rng.uniform());
    modes_.push_back({slope / w, w, two_pi * rng.uniform()});
  }
}

std::string Rugged1d::name() const {
  return "rugged_s" + std::to_string(seed_) + "_m" + std::to_string(n_modes_);
}

double Rugged1d::f(double x) const {
  double v = 0.5 * x * x;
  for (const Mode& m : modes_) v += m.amplitude * std::sin(m.frequency * x + m.phase);
  return v;
}

double Rugged1d::df(double x) const {
  double v = x;
  for (const Mode& m : modes_)
    v += m.amplitude * m.frequency * std::cos(m.frequency * x + m.phase);
  return v;
}

double Rugged1d::d2f(double x) const {
  double v = 1.0;
  for (const Mode& m : modes_)
    v -= m.amplitude * m.frequency * m.frequency * std::sin(m.frequency * x + m.phase);
  return v;
}

double Rugged1d::value(std::span<const double> x) const { return f(x[0]); }

void Rugged1d::gradient(std::span<const double> x, std::span<double> g) const { g[0] = df(x[0]); }

std::optional<Matrix> Rugged1d::hessian(std::span<const double> x) const {
  Matrix h(1, 1);
  h(0, 0) = d2f(x[0]);
  return h;
}

// ---------------------------------------------------------------------------
// TinyMlp

TinyMlp::TinyMlp(std::uint64_t seed, int hidden, int n_samples, int batch)
    : seed_(seed), hidden_(hidden), batch_(batch), dim_(static_cast<std::size_t>(5 * hidden + 2)) {
  if (hidden < 2) throw std::invalid_argument("make_tiny_mlp: hidden must be >= 2");
  if (n_samples < 20) throw std::invalid_argument("make_tiny_mlp: n_samples must be >= 20");
  if (batch < 1 || batch > n_samples)
    throw std::invalid_argument("make_tiny_mlp: batch size " + std::to_string(batch) +
                                " must be in [1, n_samples=" + std::to_string(n_samples) + "]");
  Rng rng(derive_seed(seed, "mlp-data"));
  inputs_.resize(2 * static_cast<std::size_t>(n_samples));
  labels_.resize(n_samples);
  // Two overlapping Gaussian clusters, so the training loss has a positive floor.
  for (int i = 0; i < n_samples; ++i) {
    const int label = i % 2;
    const double sign = label == 0 ? -1.0 : 1.0;
    labels_[i] = label;
    inputs_[2 * i] = sign * 1.0 + 0.8 * rng.normal();
    inputs_[2 * i + 1] = sign * 0.5 + 0.8 * rng.normal();
  }
}

std::string TinyMlp::name() const {
  return "mlp_h" + std::to_string(hidden_) + "_n" + std::to_string(labels_.size()) + "_b" +
         std::to_string(batch_);
}

Vector TinyMlp::initial_parameters() const {
  Rng rng(derive_seed(seed_, "mlp-init"));
  Vector x(dim_, 0.0);
  const std::size_t h = hidden_;
  const double s1 = std::sqrt(1.0 / 2.0), s2 = std::sqrt(1.0 / static_cast<double>(h));
  for (std::size_t i = 0; i < 2 * h; ++i) x[i] = s1 * rng.normal();
  for (std::size_t i = 0; i < 2 * h; ++i) x[3 * h + i] = s2 * rng.normal();
  return x;
}

std::shared_ptr<TinyMlp> TinyMlp::with_batch(int batch) const {
  return std::make_shared<TinyMlp>(seed_, hidden_, n_samples(), batch);
}

double TinyMlp::sample_loss(std::span<const double> x, std::size_t i, std::span<double> g,
                            double weight) const {
  const std::size_t h = hidden_;
  const double* w1 = x.data();
  const double* b1 = w1 + 2 * h;
  const double* w2 = b1 + h;
  const double* b2 = w2 + 2 * h;
  const double in0 = inputs_[2 * i], in1 = inputs_[2 * i + 1];

  double pre[64], act[64];
  std::vector<double> pre_heap, act_heap;
  double* pre_p = pre;
  double* act_p = act;
  if (h > 64) {
    pre_heap.resize(h);
    act_heap.resize(h);
    pre_p = pre_heap.data();
    act_p = act_heap.data();
  }
  double z0 = b2[0], z1 = b2[1];
  for (std::size_t k = 0; k < h; ++k) {
    pre_p[k] = w1[2 * k] * in0 + w1[2 * k + 1] * in1 + b1[k];
    act_p[k] = pre_p[k] > 0.0 ? pre_p[k] : 0.0;
    z0 += w2[k] * act_p[k];
    z1 += w2[h + k] * act_p[k];
  }
  const double zmax = std::max(z0, z1);
  const double lse = zmax + std::log(std::exp(z0 - zmax) + std::exp(z1 - zmax));
  const int y = labels_[i];
  const double loss = lse - (y == 0 ? z0 : z1);
  if (g.empty()) return loss;

  const double p1 = std::exp(z1 - lse);
  const double d0 = weight * ((1.0 - p1) - (y == 0 ? 1.0 : 0.0));
  const double d1 = weight * (p1 - (y == 1 ? 1.0 : 0.0));
  double* gw1 = g.data();
  double* gb1 = gw1 + 2 * h;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + 2 * h;
  gb2[0] += d0;
  gb2[1] += d1;
  for (std::size_t k = 0; k < h; ++k) {
    gw2[k] += d0 * act_p[k];
    gw2[h + k] += d1 * act_p[k];
    if (pre_p[k] > 0.0) {
      const double da = d0 * w2[k] + d1 * w2[h + k];
      gw1[2 * k] += da * in0;
      gw1[2 * k + 1] += da * in1;
      gb1[k] += da;
    }
  }
  return loss;
}

double TinyMlp::value(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < labels_.size(); ++i) total += sample_loss(x, i, {}, 0.0);
  return total / static_cast<double>(labels_.size());
}

void TinyMlp::gradient(std::span<const double> x, std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  const double w = 1.0 / static_cast<double>(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) sample_loss(x, i, g, w);
}

void TinyMlp::batch_gradient(std::span<const double> x, std::span<const std::size_t> samples,
                             std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  const double w = 1.0 / static_cast<double>(samples.size());
  for (std::size_t i : samples) sample_loss(x, i, g, w);
}

void TinyMlp::stochastic_gradient(std::span<const double> x, Rng& rng,
                                  std::span<double> g) const {
  std::size_t idx[256];
  std::vector<std::size_t> heap;
  std::span<std::size_t> samples(idx, std::min<std::size_t>(batch_, 256));
  if (batch_ > 256) {
    heap.resize(batch_);
    samples = heap;
  }
  for (std::size_t& s : samples) s = rng.index(labels_.size());
  batch_gradient(x, samples, g);
}

// ---------------------------------------------------------------------------
// Corpus

Vector polish_minimum(const Objective& f, Vector x, double tol, int max_iter) {
  const std::size_t n = f.dim();
  Vector g(n), trial(n);
  for (int it = 0; it < max_iter; ++it) {
    f.gradient(x, g);
    double gnorm = 0.0;
    for (double gi : g) gnorm += gi * gi;
    gnorm = std::sqrt(gnorm);
    if (gnorm <= tol) break;

    Eigen::VectorXd step = -Eigen::Map<Eigen::VectorXd>(g.data(), n);
    if (auto h = f.hessian(x)) {
      Eigen::LDLT<Matrix> ldlt(*h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        Eigen::VectorXd newton = ldlt.solve(step);
        if (newton.allFinite()) step = newton;
      }
    }
    // Backtrack on the gradient norm so the iteration cannot wander off.
    double scale = 1.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + scale * step[i];
      Vector gt = f.gradient(trial);
      double tn = 0.0;
      for (double v : gt) tn += v * v;
      if (std::sqrt(tn) < gnorm || scale < 1e-12) break;
      scale *= 0.5;
    }
    x = trial;
  }
  return x;
}

namespace {

std::vector<KnownMinimum> scan_minima_1d(const Rugged1d& f, double lo, double hi) {
  std::vector<KnownMinimum> out;
  const int n = 20000;
  double prev_x = lo, prev_d = f.df(lo);
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double d = f.df(x);
    if (prev_d < 0.0 && d >= 0.0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        (f.df(m) < 0.0 ? a : b) = m;
      }
      const double xm = std::abs(f.df(a)) < std::abs(f.df(b)) ? a : b;
      out.push_back({{xm}, f.f(xm)});
    }
    prev_x = x;
    prev_d = d;
  }
  return out;
}

}  // namespace

TestCorpusEntry make_corpus_entry(std::string_view name) {
  static const std::regex quad(R"(quadratic_c([0-9.eE+-]+)_n([0-9]+))");
  static const std::regex dwell(R"(double_well_a([0-9.eE+-]+))");
  static const std::regex rugged(R"(rugged_s([0-9]+)_m([0-9]+))");
  static const std::regex mlp(R"(mlp_h([0-9]+)_n([0-9]+)(?:_b([0-9]+))?(?:_s([0-9]+))?)");
  const std::string s(name);
  std::smatch m;
  TestCorpusEntry e;
  e.name = s;
  if (std::regex_match(s, m, quad)) {
    const double c = std::stod(m[1]);
    const std::size_t n = std::stoul(m[2]);
    e.objective = make_quadratic(c, {}, n);
    e.known_minima.push_back({Vector(n, 0.0), 0.0});
    e.domain_box = {Vector(n, -4.0), Vector(n, 4.0)};
    e.start = Vector(n, 1.0);
  } else if (std::regex_match(s, m, dwell)) {
    const double a = std::stod(m[1]);
    e.objective = make_double_well(a);
    e.known_minima = {{{-a}, 0.0}, {{a}, 0.0}};
    e.domain_box = {{-2.5 * a}, {2.5 * a}};
    e.start = {0.5 * a};
  } else if (std::regex_match(s, m, rugged)) {
    auto r = std::make_shared<Rugged1d>(std::stoull(m[1]), std::stoi(m[2]));
    e.domain_box = {{-r->half_width()}, {r->half_width()}};
    e.known_minima = scan_minima_1d(*r, -r->half_width(), r->half_width());
    e.start = {0.75 * r->half_width()};
    e.objective = std::move(r);
  } else if (std::regex_match(s, m, mlp)) {
    const int batch = m[3].matched ? std::stoi(m[3]) : 16;
    const std::uint64_t seed = m[4].matched ? std::stoull(m[4]) : 0;
    auto net = std::make_shared<TinyMlp>(seed, std::stoi(m[1]), std::stoi(m[2]), batch);
    const std::size_t n = net->dim();
    e.domain_box = {Vector(n, -3.0), Vector(n, 3.0)};
    e.start = net->initial_parameters();
    e.objective = std::move(net);
  } else {
    throw std::invalid_argument("unknown objective name '" + s + "'");
  }
  return e;
}

}  // namespace pdesmooth
