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

#include "pdesmooth/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pdesmooth/analysis.hpp"
#include "pdesmooth/grid.hpp"
#include "pdesmooth/objective.hpp"
#include "pdesmooth/pde.hpp"
#include "pdesmooth/plot.hpp"
#include "pdesmooth/stats.hpp"

namespace pdesmooth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const OptimizerConfig& c) {
  return json{{"eta", c.eta},
              {"eta_y", c.eta_y},
              {"L", c.L},
              {"gamma0", c.gamma0},
              {"gamma1", c.gamma1},
              {"beta_inv_ex", c.beta_inv_ex},
              {"alpha", c.alpha},
              {"delta", c.delta},
              {"workers", c.n_workers},
              {"worker_threads", c.worker_threads},
              {"anneal_factor", c.anneal_factor},
              {"anneal_period", c.anneal_period},
              {"gamma_per_dim", c.gamma_per_dim}};
}

json to_json(const MeanStd& m) {
  return json{{"mean", m.mean}, {"std", m.std}, {"std_error", m.std_error}, {"n", m.n}};
}

// Collects output files and failing assertions for one experiment.
class Artifacts {
 public:
  Artifacts(const ExperimentConfig& cfg, std::ostream& log) : dir_(cfg.out), log_(log) {
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    const fs::path p = dir_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out(path(name));
    out << j.dump(2) << '\n';
  }

  void check(bool ok, const std::string& what) {
    log_ << (ok ? "  ok    " : "  FAIL  ") << what << '\n';
    if (!ok) failures_.push_back(what);
  }

  std::ostream& log() { return log_; }

  ExperimentOutcome finish(json summary) {
    summary["passed"] = failures_.empty();
    summary["failures"] = failures_;
    write_json("summary.json", summary);
    return ExperimentOutcome{failures_, files_, std::move(summary)};
  }

 private:
  fs::path dir_;
  std::ostream& log_;
  std::vector<std::string> files_;
  std::vector<std::string> failures_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

int effective_threads(const ExperimentConfig& cfg) {
  return cfg.deterministic ? 1 : std::max(1, cfg.threads);
}

// Calls body(i) for i in [0, n) on up to `threads` threads.
template <class Body>
void parallel_for(std::size_t n, int threads, Body body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(n)); ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

TestCorpusEntry corpus(const ExperimentConfig& cfg) {
  try {
    return make_corpus_entry(cfg.objective);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("experiment.objective", e.what());
  }
}

void require_1d(const TestCorpusEntry& e, const std::string& kind) {
  if (e.objective->dim() != 1)
    throw ConfigError("experiment.objective", kind + " needs a one-dimensional objective, '" +
                                                  e.name + "' has dimension " +
                                                  std::to_string(e.objective->dim()));
}

// ---- solve-pde ----

ExperimentOutcome run_solve_pde(const ExperimentConfig& cfg, Artifacts& art) {
  const TestCorpusEntry e = corpus(cfg);
  if (e.objective->dim() != static_cast<std::size_t>(cfg.pde.dim))
    throw ConfigError("pde.dim", "objective '" + e.name + "' has dimension " +
                                     std::to_string(e.objective->dim()));
  const GridGeometry grid = cfg.pde.geometry();
  const auto t0 = std::chrono::steady_clock::now();
  const GridFunction u = solve(*e.objective, cfg.pde.solve, grid);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_csv(u, art.path("u.csv"));
  write_binary(u, art.path("u.bin"));

  const auto values = u.values();
  const bool finite = std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  art.check(finite, "solution is finite everywhere");

  const auto at_min = grid.point(u.argmin());
  json summary{{"kind", "solve-pde"},
               {"scheme", to_string(cfg.pde.solve.scheme)},
               {"t", cfg.pde.solve.t_final},
               {"beta_inv", cfg.pde.solve.beta_inv},
               {"grid_points", grid.size()},
               {"min", u.min()},
               {"max", u.max()},
               {"argmin", std::vector<double>(at_min.begin(), at_min.begin() + grid.dim())},
               {"seconds", seconds}};

  if (cfg.plot && grid.dim() == 1) {
    Series fs_{"f", {}, {}}, us{"u(x, t)", {}, {}};
    const GridFunction f0 = GridFunction::sample(*e.objective, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.point(i)[0];
      fs_.x.push_back(x);
      fs_.y.push_back(f0[i]);
      us.x.push_back(x);
      us.y.push_back(u[i]);
    }
    emit_plot({fs_, us}, art.path("plot.svg"),
              PlotOptions{e.name + ", " + to_string(cfg.pde.solve.scheme), "x", "value"});
  }
  return art.finish(summary);
}

// ---- optimize / compare ----

ExperimentOutcome run_optimizers(const ExperimentConfig& cfg, Artifacts& art, bool compare) {
  const TestCorpusEntry e = corpus(cfg);
  if (compare && cfg.budget == 0)
    throw ConfigError("experiment.budget",
                      "compare runs every algorithm at the same gradient budget; set it");
  const bool nested = cfg.algorithms.size() > 1;
  const int threads = effective_threads(cfg);

  RunOptions opts;
  opts.log_every = cfg.log_every;
  if (!e.start.empty()) opts.x0 = e.start;

  std::vector<ComparisonRow> table;
  std::vector<Series> curves;
  json per_algorithm = json::object();
  bool first_csv = true;

  for (Algorithm a : cfg.algorithms) {
    const OptimizerConfig oc = resolve(a, cfg.optimizer);
    const std::string name = to_string(a);
    art.log() << name << ": " << cfg.repeat << " run(s)" << (threads > 1 ? " in parallel" : "")
              << '\n';
    std::vector<RunRecord> records(static_cast<std::size_t>(cfg.repeat));
    std::vector<double> seconds(records.size());
    parallel_for(records.size(), threads, [&](std::size_t r) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::uint64_t seed = cfg.seed + r;
      records[r] = cfg.budget > 0 ? run_budget(a, *e.objective, oc, seed, cfg.budget, opts)
                                  : run(a, *e.objective, oc, seed, cfg.steps, opts);
      seconds[r] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    std::vector<double> final_loss;
    double wall = 0;
    for (std::size_t r = 0; r < records.size(); ++r) {
      const RunRecord& rec = records[r];
      const std::string file = (nested ? name + "/" : std::string()) + "run_" +
                               std::to_string(rec.seed) + ".csv";
      {
        std::ofstream out(art.path(file));
        write_run_csv(rec, out);
      }
      if (first_csv && !cfg.run_csv.empty()) {
        const fs::path target(cfg.run_csv);
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        std::ofstream out(target);
        write_run_csv(rec, out);
        first_csv = false;
      }
      art.check(!rec.aborted, name + " seed " + std::to_string(rec.seed) + " finished" +
                                  (rec.aborted ? " (" + rec.abort_reason + ")" : ""));
      final_loss.push_back(rec.rows.empty() ? NAN : rec.rows.back().loss);
      wall += seconds[r];
    }

    ComparisonRow row;
    row.algorithm = name;
    row.final_loss = mean_std(final_loss);
    row.wall_time = wall;
    if (!records.front().rows.empty()) {
      row.effective_epochs = records.front().rows.back().effective_epoch;
      row.grad_evals = records.front().rows.back().grad_evals;
    }
    table.push_back(row);
    per_algorithm[name] = json{{"config", to_json(oc)},
                               {"final_loss", to_json(row.final_loss)},
                               {"final_losses", final_loss},
                               {"effective_epochs", row.effective_epochs},
                               {"grad_evals", row.grad_evals},
                               {"wall_time", wall}};
    art.log() << "  final loss " << fmt(row.final_loss.mean) << " +- " << fmt(row.final_loss.std)
              << " at " << row.grad_evals << " gradient evaluations\n";

    // Loss against effective epochs, averaged over seeds row by row.
    std::size_t n_rows = records.front().rows.size();
    for (const RunRecord& rec : records) n_rows = std::min(n_rows, rec.rows.size());
    Series s{name, {}, {}};
    for (std::size_t i = 0; i < n_rows; ++i) {
      double loss = 0;
      for (const RunRecord& rec : records) loss += rec.rows[i].loss;
      s.x.push_back(records.front().rows[i].effective_epoch);
      s.y.push_back(loss / static_cast<double>(records.size()));
    }
    if (!s.x.empty()) curves.push_back(std::move(s));
  }

  if (compare || nested) write_comparison_csv(table, art.path("comparison.csv"));
  if (cfg.plot && !curves.empty())
    emit_plot(curves, art.path("plot.svg"),
              PlotOptions{e.name, "effective epochs", "loss", /*log_y=*/true});

  json summary{{"kind", compare ? "compare" : "optimize"},
               {"objective", e.name},
               {"repeat", cfg.repeat},
               {"budget", cfg.budget},
               {"steps", cfg.steps},
               {"algorithms", per_algorithm}};
  return art.finish(summary);
}

// ---- analysis experiments ----

ExperimentOutcome run_homogenization(const ExperimentConfig& cfg, Artifacts& art) {
  const TestCorpusEntry e = corpus(cfg);
  require_1d(e, "verify-homogenization");
  std::vector<double> probes = cfg.analysis.probes;
  if (probes.empty()) {
    const double w = e.domain_box.upper[0];
    for (double frac : {0.1, 0.2, 0.32, 0.48, 0.64}) {
      probes.push_back(-frac * w);
      probes.push_back(frac * w);
    }
    std::sort(probes.begin(), probes.end());
  }
  HomogenizationOptions opts;
  opts.eta_y = cfg.analysis.eta_y;
  opts.n_seeds = cfg.analysis.n_seeds;
  opts.seed = derive_seed(cfg.seed, "homogenization");
  opts.reference =
      cfg.analysis.reference == "hopf_lax" ? DriftReference::hopf_lax : DriftReference::cole_hopf;
  const HomogenizationTable table = verify_homogenization(
      *e.objective, probes, cfg.analysis.gamma, cfg.analysis.beta_inv, cfg.analysis.epsilons, opts);

  {
    std::ofstream out(art.path("homogenization.csv"));
    out << "epsilon,inner_steps,x,target,estimate,std_error\n" << std::setprecision(12);
    for (const auto& row : table.rows)
      for (const auto& p : row.probes)
        out << row.epsilon << ',' << row.inner_steps << ',' << p.x << ',' << p.target << ','
            << p.estimate << ',' << p.std_error << '\n';
  }

  json rows = json::array();
  double finest_eps = std::numeric_limits<double>::infinity();
  double finest_rel = 0;
  for (const auto& row : table.rows) {
    rows.push_back({{"epsilon", row.epsilon},
                    {"inner_steps", row.inner_steps},
                    {"mean_abs_deviation", row.mean_abs_deviation},
                    {"std_error", row.std_error},
                    {"max_rel_deviation", row.max_rel_deviation},
                    {"ergodic", row.ergodic}});
    art.log() << "  epsilon " << row.epsilon << ": mean |deviation| " << fmt(row.mean_abs_deviation)
              << ", max relative " << fmt(row.max_rel_deviation) << '\n';
    if (row.epsilon < finest_eps) {
      finest_eps = row.epsilon;
      finest_rel = row.max_rel_deviation;
    }
  }
  const bool converged = finest_rel <= cfg.analysis.tolerance;
  art.check(table.monotone, "deviation non-increasing in epsilon within 2 stderr");
  art.check(converged, "relative drift error " + fmt(finest_rel) + " <= " +
                           fmt(cfg.analysis.tolerance) + " at epsilon " + fmt(finest_eps));

  if (cfg.plot) {
    std::vector<Series> series;
    Series target{"-du/dx (" + cfg.analysis.reference + ")", {}, {}};
    for (const auto& p : table.rows.front().probes) {
      target.x.push_back(p.x);
      target.y.push_back(p.target);
    }
    series.push_back(target);
    for (const auto& row : table.rows) {
      Series s{"epsilon " + fmt(row.epsilon), {}, {}};
      for (const auto& p : row.probes) {
        s.x.push_back(p.x);
        s.y.push_back(p.estimate);
      }
      series.push_back(s);
    }
    emit_plot(series, art.path("plot.svg"), PlotOptions{e.name + ", drift estimates", "x", "drift"});
  }

  json summary{{"kind", "verify-homogenization"},
               {"objective", e.name},
               {"gamma", cfg.analysis.gamma},
               {"beta_inv", cfg.analysis.beta_inv},
               {"reference", cfg.analysis.reference},
               {"rows", rows},
               {"monotone", table.monotone},
               {"converged", converged}};
  return art.finish(summary);
}

ExperimentOutcome run_control(const ExperimentConfig& cfg, Artifacts& art) {
  const TestCorpusEntry e = corpus(cfg);
  ControlOptions opts;
  opts.x0 = cfg.analysis.x.empty() ? Vector(e.objective->dim(), 0.0) : cfg.analysis.x;
  if (opts.x0.size() != e.objective->dim())
    throw ConfigError("analysis.x", "needs " + std::to_string(e.objective->dim()) + " components");
  opts.threads = effective_threads(cfg);
  const ControlComparison c =
      control_improvement_experiment(*e.objective, *e.objective, cfg.analysis.horizon,
                                     cfg.analysis.beta_inv, cfg.analysis.n_paths,
                                     derive_seed(cfg.seed, "paths"), opts);
  {
    std::ofstream out(art.path("control.csv"));
    out << "quantity,mean,std,std_error\n" << std::setprecision(12);
    auto line = [&](const char* name, const MeanStd& m) {
      out << name << ',' << m.mean << ',' << m.std << ',' << m.std_error << '\n';
    };
    line("terminal_csgd", c.terminal_csgd);
    line("terminal_sgd", c.terminal_sgd);
    line("control_energy", c.control_energy);
    line("improvement", c.improvement);
    line("slack", c.slack);
  }
  art.log() << "  E[V] sgd " << fmt(c.terminal_sgd.mean) << ", csgd " << fmt(c.terminal_csgd.mean)
            << ", energy " << fmt(c.control_energy.mean) << '\n';
  art.check(c.valid, "at most 1% of the paths reach the grid box (" + std::to_string(c.exits) + ")");
  art.check(c.inequality_holds, "E[V(csgd)] + energy <= E[V(sgd)] + 3 stderr");
  art.check(c.strict_gap, "E[V(csgd)] < E[V(sgd)] by more than 3 stderr");
  json summary{{"kind", "control-improvement"},
               {"objective", e.name},
               {"horizon", cfg.analysis.horizon},
               {"beta_inv", cfg.analysis.beta_inv},
               {"n_paths", c.n_paths},
               {"terminal_csgd", to_json(c.terminal_csgd)},
               {"terminal_sgd", to_json(c.terminal_sgd)},
               {"control_energy", to_json(c.control_energy)},
               {"improvement", to_json(c.improvement)},
               {"slack", to_json(c.slack)},
               {"exits", c.exits},
               {"valid", c.valid},
               {"inequality_holds", c.inequality_holds},
               {"strict_gap", c.strict_gap}};
  return art.finish(summary);
}

ExperimentOutcome run_spectrum(const ExperimentConfig& cfg, Artifacts& art) {
  Rng rng(derive_seed(cfg.seed, "spectrum"));
  const std::size_t n = static_cast<std::size_t>(cfg.analysis.matrix_dim);
  std::size_t violations = 0, sandwich_violations = 0;
  {
    std::ofstream out(art.path("spectrum.csv"));
    out << "trial,hm_lambda,hm_diag,holds\n" << std::setprecision(12);
    for (std::size_t t = 0; t < cfg.analysis.trials; ++t) {
      const MatrixSpectrum s = matrix_spectrum(random_spd(n, rng));
      const bool holds = s.hm_lambda <= s.hm_diag * (1 + 1e-12);
      violations += !holds;
      out << t << ',' << s.hm_lambda << ',' << s.hm_diag << ',' << (holds ? 1 : 0) << '\n';
    }
  }
  for (std::size_t t = 0; t < cfg.analysis.trials; ++t) {
    Vector v(n);
    for (double& x : v) x = std::exp(4 * rng.uniform() - 2);
    const double mn = *std::min_element(v.begin(), v.end());
    const double hm = harmonic_mean(v);
    if (!(mn <= hm * (1 + 1e-12) && hm <= static_cast<double>(n) * mn * (1 + 1e-12)))
      ++sandwich_violations;
  }
  art.check(violations == 0, "HM(eigenvalues) <= HM(diagonal) on " +
                                 std::to_string(cfg.analysis.trials) + " random SPD matrices");
  art.check(sandwich_violations == 0, "min <= HM <= n min on " +
                                          std::to_string(cfg.analysis.trials) + " random vectors");

  json summary{{"kind", "spectrum"},
               {"matrix_dim", n},
               {"trials", cfg.analysis.trials},
               {"violations", violations},
               {"sandwich_violations", sandwich_violations}};

  const TestCorpusEntry e = corpus(cfg);
  if (!e.known_minima.empty() && e.objective->dim() <= kDenseHessianLimit) {
    const Vector x_star = polish_minimum(*e.objective, e.known_minima.front().location);
    const SpectrumSummary s = spectrum_summary(*e.objective, x_star, cfg.analysis.gamma);
    for (const std::string& w : s.warnings) art.log() << "  warning: " << w << '\n';
    art.check(s.hm_below_diag, "objective Hessian: HM(eigenvalues) <= HM(diagonal)");
    art.check(s.smoothed_bound_holds, "smoothed Hessian: HM <= 1/(t + HM(C)^-1)");
    summary["objective"] = json{{"name", e.name},
                                {"x_star", x_star},
                                {"t", cfg.analysis.gamma},
                                {"eigenvalues", s.eigenvalues},
                                {"diagonal", s.diagonal},
                                {"hm_lambda", s.hm_lambda},
                                {"hm_diag", s.hm_diag},
                                {"am_lambda", s.am_lambda},
                                {"smoothed_eigenvalues", s.smoothed_eigenvalues},
                                {"hm_smoothed", s.hm_smoothed},
                                {"hm_bound", s.hm_bound},
                                {"indefinite", s.indefinite},
                                {"hm_below_diag", s.hm_below_diag},
                                {"smoothed_bound_holds", s.smoothed_bound_holds},
                                {"warnings", s.warnings}};
  }
  return art.finish(summary);
}

// f is quadratic when it matches its second-order expansion at the origin.
bool is_quadratic(const Objective& f, const Matrix& q, const Vector& p, Rng& rng) {
  const std::size_t n = f.dim();
  const Vector zero(n, 0.0);
  const double f0 = f.value(zero);
  for (int trial = 0; trial < 3; ++trial) {
    Vector x(n);
    rng.fill_normal(x);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<const Eigen::VectorXd> pv(p.data(), static_cast<Eigen::Index>(n));
    const double model = f0 + pv.dot(xv) + 0.5 * xv.dot(q * xv);
    if (std::abs(f.value(x) - model) > 1e-8 * (1 + std::abs(model))) return false;
  }
  return true;
}

ExperimentOutcome run_invariant_measure(const ExperimentConfig& cfg, Artifacts& art) {
  const TestCorpusEntry e = corpus(cfg);
  const std::size_t n = e.objective->dim();
  const Vector x = cfg.analysis.x.empty() ? e.start : cfg.analysis.x;
  if (x.size() != n) throw ConfigError("analysis.x", "needs " + std::to_string(n) + " components");
  const double gamma = cfg.analysis.gamma, beta_inv = cfg.analysis.beta_inv;
  if (!(beta_inv > 0)) throw ConfigError("analysis.beta_inv", "must be positive for sampling");

  const InvariantMeasureEstimate est =
      sample_invariant_measure(*e.objective, x, gamma, beta_inv, cfg.analysis.n_steps,
                               cfg.analysis.burn_in, derive_seed(cfg.seed, "sampler"),
                               cfg.analysis.eta_y);

  json summary{{"kind", "invariant-measure"},
               {"objective", e.name},
               {"x", x},
               {"gamma", gamma},
               {"beta_inv", beta_inv},
               {"n_samples", est.n_samples},
               {"autocorrelation_time", est.autocorrelation_time},
               {"mean", est.mean},
               {"mean_stderr", est.mean_stderr},
               {"variance_stderr", est.variance_stderr}};

  const Vector zero(n, 0.0);
  const std::optional<Matrix> q = e.objective->hessian(zero);
  const Vector p = e.objective->gradient(zero);
  Rng rng(derive_seed(cfg.seed, "quadratic-check"));
  const bool quadratic = q && is_quadratic(*e.objective, *q, p, rng);
  summary["quadratic"] = quadratic;

  std::ofstream out(art.path("invariant_measure.csv"));
  out << std::setprecision(12) << "component,sampled_mean,mean_stderr,sampled_variance,variance_stderr";
  if (quadratic) out << ",exact_mean,exact_variance,printed_mean,printed_variance";
  out << '\n';

  GaussianParameters exact, printed;
  if (quadratic) {
    exact = quadratic_invariant_closed_form(*q, p, x, gamma, 1 / beta_inv, QuadraticVariant::exact);
    printed = quadratic_invariant_closed_form(*q, p, x, gamma, 1 / beta_inv, QuadraticVariant::printed);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out << i << ',' << est.mean[i] << ',' << est.mean_stderr[i] << ',' << est.covariance(ii, ii)
        << ',' << est.variance_stderr[i];
    if (quadratic) {
      out << ',' << exact.mean[i] << ',' << exact.covariance(ii, ii) << ',' << printed.mean[i] << ','
          << printed.covariance(ii, ii);
      const double zm = (est.mean[i] - exact.mean[i]) / est.mean_stderr[i];
      const double zv = (est.covariance(ii, ii) - exact.covariance(ii, ii)) / est.variance_stderr[i];
      art.check(std::abs(zm) <= 3, "component " + std::to_string(i) + " mean " + fmt(est.mean[i]) +
                                       " vs " + fmt(exact.mean[i]) + " (z = " + fmt(zm) + ")");
      art.check(std::abs(zv) <= 3, "component " + std::to_string(i) + " variance " +
                                       fmt(est.covariance(ii, ii)) + " vs " +
                                       fmt(exact.covariance(ii, ii)) + " (z = " + fmt(zv) + ")");
    }
    out << '\n';
  }
  if (quadratic) {
    Vector exact_var(n), printed_var(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      exact_var[i] = exact.covariance(ii, ii);
      printed_var[i] = printed.covariance(ii, ii);
    }
    summary["exact"] = json{{"mean", exact.mean}, {"variance", exact_var}};
    summary["printed"] = json{{"mean", printed.mean}, {"variance", printed_var}};
  } else {
    art.log() << "  objective is not quadratic; no closed form to compare with\n";
  }
  return art.finish(summary);
}

ExperimentOutcome run_figure1(const ExperimentConfig& cfg, Artifacts& art) {
  const TestCorpusEntry e = corpus(cfg);
  require_1d(e, "reproduce-figure1");
  if (cfg.pde.dim != 1) throw ConfigError("pde.dim", "reproduce-figure1 is one-dimensional");
  const GridGeometry grid = cfg.pde.geometry();
  const Figure1Result r =
      figure1_densities(*e.objective, grid, cfg.analysis.gamma, cfg.pde.solve.beta_inv,
                        cfg.analysis.beta_inv, cfg.analysis.horizon, cfg.analysis.window);
  {
    std::ofstream out(art.path("densities.csv"));
    out << "x,viscous,hopf_lax,sgd\n" << std::setprecision(12);
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << grid.point(i)[0] << ',' << r.viscous[i] << ',' << r.hopf_lax[i] << ',' << r.sgd[i]
          << '\n';
  }
  art.log() << "  mass near x* = " << fmt(r.x_star) << ": viscous " << fmt(r.mass_viscous)
            << ", hopf-lax " << fmt(r.mass_hopf_lax) << ", sgd " << fmt(r.mass_sgd) << '\n';
  art.check(r.mass_viscous - r.mass_hopf_lax >= 0.02, "viscous mass exceeds non-viscous by 0.02");
  art.check(r.mass_hopf_lax - r.mass_sgd >= 0.02, "non-viscous mass exceeds SGD by 0.02");
  if (cfg.plot) {
    std::vector<Series> s{{"viscous HJ", {}, {}}, {"non-viscous HJ", {}, {}}, {"SGD", {}, {}}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.point(i)[0];
      for (auto& si : s) si.x.push_back(x);
      s[0].y.push_back(r.viscous[i]);
      s[1].y.push_back(r.hopf_lax[i]);
      s[2].y.push_back(r.sgd[i]);
    }
    emit_plot(s, art.path("plot.svg"), PlotOptions{e.name + ", terminal densities", "x", "density"});
  }
  json summary{{"kind", "reproduce-figure1"},
               {"objective", e.name},
               {"x_star", r.x_star},
               {"window", cfg.analysis.window},
               {"mass_viscous", r.mass_viscous},
               {"mass_hopf_lax", r.mass_hopf_lax},
               {"mass_sgd", r.mass_sgd},
               {"ordered", r.min_gap >= 0.02}};
  return art.finish(summary);
}

}  // namespace

void write_comparison_csv(std::vector<ComparisonRow> rows, const std::string& path) {
  std::sort(rows.begin(), rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) { return a.algorithm < b.algorithm; });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "algorithm,final_loss_mean,final_loss_std,n_seeds,effective_epochs,grad_evals\n"
      << std::setprecision(12);
  for (const ComparisonRow& r : rows)
    out << r.algorithm << ',' << r.final_loss.mean << ',' << r.final_loss.std << ','
        << r.final_loss.n << ',' << r.effective_epochs << ',' << r.grad_evals << '\n';
}

json make_manifest(const ExperimentConfig& cfg) {
  json resolved = json::object();
  for (Algorithm a : cfg.algorithms) resolved[to_string(a)] = to_json(resolve(a, cfg.optimizer));
  return json{{"config", to_json(cfg)}, {"resolved_optimizers", resolved}};
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const ExperimentKind kind = require_kind(cfg);
  validate(cfg);
  Artifacts art(cfg, log);
  art.write_json("manifest.json", make_manifest(cfg));
  log << to_string(kind) << " -> " << cfg.out << '\n';
  switch (kind) {
    case ExperimentKind::solve_pde: return run_solve_pde(cfg, art);
    case ExperimentKind::optimize: return run_optimizers(cfg, art, false);
    case ExperimentKind::compare: return run_optimizers(cfg, art, true);
    case ExperimentKind::verify_homogenization: return run_homogenization(cfg, art);
    case ExperimentKind::control_improvement: return run_control(cfg, art);
    case ExperimentKind::spectrum: return run_spectrum(cfg, art);
    case ExperimentKind::invariant_measure: return run_invariant_measure(cfg, art);
    case ExperimentKind::reproduce_figure1: return run_figure1(cfg, art);
  }
  throw ConfigError("experiment.kind", "unhandled kind");
}

}  // namespace pdesmooth
