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

#include "pdesmooth/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace pdesmooth {
namespace {

using nlohmann::json;

enum class Type { real, integer, boolean, string, real_list, algorithm_list };

struct Field {
  std::string key;
  Type type;
  bool nullable;  // optimizer keys: null means "algorithm default"
  std::function<void(ExperimentConfig&, const json&)> set;
  std::function<json(const ExperimentConfig&)> get;
  std::string help;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double as_real(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError(key, "expected a number, got " + v.dump());
  return v.get<double>();
}

long long as_integer(const std::string& key, const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(key, "expected an integer, got " + v.dump());
}

std::size_t as_count(const std::string& key, const json& v) {
  const long long n = as_integer(key, v);
  if (n < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(n);
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false, got " + v.dump());
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError(key, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

std::vector<double> as_reals(const std::string& key, const json& v) {
  if (!v.is_array()) throw ConfigError(key, "expected a list of numbers, got " + v.dump());
  std::vector<double> out;
  for (const json& e : v) out.push_back(as_real(key, e));
  return out;
}

template <class T, class Get>
Field optional_field(std::string key, Type type, std::optional<T> OptimizerOverrides::*member,
                     Get convert, std::string help) {
  return Field{
      key, type, true,
      [key, member, convert](ExperimentConfig& c, const json& v) {
        if (v.is_null())
          c.optimizer.*member = std::nullopt;
        else
          c.optimizer.*member = static_cast<T>(convert(key, v));
      },
      [member](const ExperimentConfig& c) {
        const auto& o = c.optimizer.*member;
        return o ? json(*o) : json(nullptr);
      },
      std::move(help)};
}

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    auto add = [&f](std::string key, Type type, std::function<void(ExperimentConfig&, const json&)> set,
                    std::function<json(const ExperimentConfig&)> get, std::string help) {
      f.push_back(Field{std::move(key), type, false, std::move(set), std::move(get), std::move(help)});
    };
#define PDESMOOTH_FIELD(key, type, conv, member, help)                                       \
  add(                                                                                        \
      key, type, [](ExperimentConfig& c, const json& v) { c.member = conv(key, v); },        \
      [](const ExperimentConfig& c) { return json(c.member); }, help)

    add(
        "experiment.kind", Type::string,
        [](ExperimentConfig& c, const json& v) {
          if (v.is_null()) {
            c.kind.reset();
            return;
          }
          try {
            c.kind = parse_experiment_kind(as_string("experiment.kind", v));
          } catch (const std::invalid_argument& e) {
            throw ConfigError("experiment.kind", e.what());
          }
        },
        [](const ExperimentConfig& c) { return c.kind ? json(to_string(*c.kind)) : json(nullptr); },
        "solve-pde, optimize, compare, verify-homogenization, control-improvement, spectrum, "
        "invariant-measure or reproduce-figure1");
    PDESMOOTH_FIELD("experiment.objective", Type::string, as_string, objective,
                    "corpus name, e.g. quadratic_c1_n2, double_well_a1, rugged_s7_m5, mlp_h16_n200");
    add(
        "experiment.algorithms", Type::algorithm_list,
        [](ExperimentConfig& c, const json& v) {
          if (!v.is_array() || v.empty())
            throw ConfigError("experiment.algorithms", "expected a non-empty list of algorithm names");
          c.algorithms.clear();
          for (const json& e : v) {
            try {
              c.algorithms.push_back(parse_algorithm(as_string("experiment.algorithms", e)));
            } catch (const ConfigError&) {
              throw;
            } catch (const std::invalid_argument& err) {
              throw ConfigError("experiment.algorithms", err.what());
            }
          }
        },
        [](const ExperimentConfig& c) {
          json a = json::array();
          for (Algorithm x : c.algorithms) a.push_back(to_string(x));
          return a;
        },
        "sgd, entropy_sgd, hj, hj2, heat, elastic (comma separated)");
    add(
        "experiment.seed", Type::integer,
        [](ExperimentConfig& c, const json& v) { c.seed = as_count("experiment.seed", v); },
        [](const ExperimentConfig& c) { return json(c.seed); }, "base seed; repeat r uses seed + r");
    PDESMOOTH_FIELD("experiment.out", Type::string, as_string, out, "output directory");
    PDESMOOTH_FIELD("experiment.run_csv", Type::string, as_string, run_csv,
                    "explicit path for the first run's CSV (optional)");
    add(
        "experiment.repeat", Type::integer,
        [](ExperimentConfig& c, const json& v) {
          c.repeat = static_cast<int>(as_integer("experiment.repeat", v));
        },
        [](const ExperimentConfig& c) { return json(c.repeat); }, "number of seeds");
    PDESMOOTH_FIELD("experiment.steps", Type::integer, as_count, steps, "outer updates per run");
    PDESMOOTH_FIELD("experiment.budget", Type::integer, as_count, budget,
                    "gradient evaluations per run; replaces steps when positive");
    PDESMOOTH_FIELD("experiment.log_every", Type::integer, as_count, log_every,
                    "log every n-th outer update");
    add(
        "experiment.threads", Type::integer,
        [](ExperimentConfig& c, const json& v) {
          c.threads = static_cast<int>(as_integer("experiment.threads", v));
        },
        [](const ExperimentConfig& c) { return json(c.threads); }, "worker threads");
    PDESMOOTH_FIELD("experiment.deterministic", Type::boolean, as_bool, deterministic,
                    "run repeats and path batches on one thread");
    PDESMOOTH_FIELD("experiment.plot", Type::boolean, as_bool, plot, "write plot.svg");

    f.push_back(optional_field<double>("optimizer.eta", Type::real, &OptimizerOverrides::eta,
                                       as_real, "outer step"));
    f.push_back(optional_field<double>("optimizer.eta_y", Type::real, &OptimizerOverrides::eta_y,
                                       as_real, "inner step (default 0.1)"));
    f.push_back(optional_field<int>("optimizer.L", Type::integer, &OptimizerOverrides::L,
                                    as_integer, "inner steps per outer update"));
    f.push_back(optional_field<double>("optimizer.gamma0", Type::real, &OptimizerOverrides::gamma0,
                                       as_real, "initial smoothing scale"));
    f.push_back(optional_field<double>("optimizer.gamma1", Type::real, &OptimizerOverrides::gamma1,
                                       as_real, "scoping rate (default 1e-3)"));
    f.push_back(optional_field<double>("optimizer.beta_inv_ex", Type::real,
                                       &OptimizerOverrides::beta_inv_ex, as_real,
                                       "extrinsic noise of the inner chain"));
    f.push_back(optional_field<double>("optimizer.alpha", Type::real, &OptimizerOverrides::alpha,
                                       as_real, "averaging weight (default 0.75)"));
    f.push_back(optional_field<double>("optimizer.delta", Type::real, &OptimizerOverrides::delta,
                                       as_real, "momentum (default 0.9)"));
    f.push_back(optional_field<int>("optimizer.workers", Type::integer, &OptimizerOverrides::workers,
                                    as_integer, "Elastic-SGD workers"));
    f.push_back(optional_field<int>("optimizer.worker_threads", Type::integer,
                                    &OptimizerOverrides::worker_threads, as_integer,
                                    "threads for Elastic-SGD workers"));
    f.push_back(optional_field<double>("optimizer.anneal_factor", Type::real,
                                       &OptimizerOverrides::anneal_factor, as_real,
                                       "step-size drop factor"));
    f.push_back(optional_field<double>("optimizer.anneal_period", Type::real,
                                       &OptimizerOverrides::anneal_period, as_real,
                                       "effective epochs between drops; 0 disables"));
    f.push_back(optional_field<bool>("optimizer.gamma_per_dim", Type::boolean,
                                     &OptimizerOverrides::gamma_per_dim, as_bool,
                                     "divide gamma0 by the dimension"));

    add(
        "pde.scheme", Type::string,
        [](ExperimentConfig& c, const json& v) {
          try {
            c.pde.solve.scheme = parse_scheme(as_string("pde.scheme", v));
          } catch (const ConfigError&) {
            throw;
          } catch (const std::invalid_argument& e) {
            throw ConfigError("pde.scheme", e.what());
          }
        },
        [](const ExperimentConfig& c) { return json(to_string(c.pde.solve.scheme)); },
        "cole_hopf, hopf_lax, monotone_fd or heat");
    add(
        "pde.boundary", Type::string,
        [](ExperimentConfig& c, const json& v) {
          try {
            c.pde.solve.boundary = parse_boundary(as_string("pde.boundary", v));
          } catch (const ConfigError&) {
            throw;
          } catch (const std::invalid_argument& e) {
            throw ConfigError("pde.boundary", e.what());
          }
        },
        [](const ExperimentConfig& c) { return json(to_string(c.pde.solve.boundary)); },
        "extrapolating or periodic");
    PDESMOOTH_FIELD("pde.beta_inv", Type::real, as_real, pde.solve.beta_inv, "viscosity");
    PDESMOOTH_FIELD("pde.t", Type::real, as_real, pde.solve.t_final, "final time (smoothing scale)");
    PDESMOOTH_FIELD("pde.dt", Type::real, as_real, pde.solve.dt, "time step; 0 chooses it");
    PDESMOOTH_FIELD("pde.cfl_fraction", Type::real, as_real, pde.solve.cfl_fraction,
                    "fraction of the stability limit");
    PDESMOOTH_FIELD("pde.grid_n", Type::integer, as_count, pde.grid_n, "points per axis");
    PDESMOOTH_FIELD("pde.lower", Type::real, as_real, pde.lower, "box lower bound");
    PDESMOOTH_FIELD("pde.upper", Type::real, as_real, pde.upper, "box upper bound");
    add(
        "pde.dim", Type::integer,
        [](ExperimentConfig& c, const json& v) { c.pde.dim = static_cast<int>(as_integer("pde.dim", v)); },
        [](const ExperimentConfig& c) { return json(c.pde.dim); }, "1 or 2");

    PDESMOOTH_FIELD("analysis.gamma", Type::real, as_real, analysis.gamma, "smoothing scale");
    PDESMOOTH_FIELD("analysis.beta_inv", Type::real, as_real, analysis.beta_inv, "temperature");
    PDESMOOTH_FIELD("analysis.x", Type::real_list, as_reals, analysis.x, "probe point");
    PDESMOOTH_FIELD("analysis.probes", Type::real_list, as_reals, analysis.probes,
                    "homogenization probe points");
    PDESMOOTH_FIELD("analysis.epsilons", Type::real_list, as_reals, analysis.epsilons,
                    "homogenization time-scale ratios");
    PDESMOOTH_FIELD("analysis.n_steps", Type::integer, as_count, analysis.n_steps,
                    "sampler steps including burn-in");
    PDESMOOTH_FIELD("analysis.burn_in", Type::integer, as_count, analysis.burn_in,
                    "sampler burn-in steps");
    PDESMOOTH_FIELD("analysis.eta_y", Type::real, as_real, analysis.eta_y, "sampler step");
    PDESMOOTH_FIELD("analysis.n_paths", Type::integer, as_count, analysis.n_paths,
                    "control path pairs");
    PDESMOOTH_FIELD("analysis.horizon", Type::real, as_real, analysis.horizon,
                    "control horizon, Fokker-Planck time for Figure 1");
    PDESMOOTH_FIELD("analysis.n_seeds", Type::integer, as_count, analysis.n_seeds,
                    "homogenization seeds");
    PDESMOOTH_FIELD("analysis.trials", Type::integer, as_count, analysis.trials,
                    "random matrices and vectors for the spectrum checks");
    add(
        "analysis.matrix_dim", Type::integer,
        [](ExperimentConfig& c, const json& v) {
          c.analysis.matrix_dim = static_cast<int>(as_integer("analysis.matrix_dim", v));
        },
        [](const ExperimentConfig& c) { return json(c.analysis.matrix_dim); },
        "size of the random SPD matrices");
    PDESMOOTH_FIELD("analysis.window", Type::real, as_real, analysis.window,
                    "Figure-1 mass window half-width");
    add(
        "analysis.reference", Type::string,
        [](ExperimentConfig& c, const json& v) {
          const std::string r = as_string("analysis.reference", v);
          if (r != "cole_hopf" && r != "hopf_lax")
            throw ConfigError("analysis.reference", "expected cole_hopf or hopf_lax, got '" + r + "'");
          c.analysis.reference = r;
        },
        [](const ExperimentConfig& c) { return json(c.analysis.reference); },
        "homogenization drift reference: cole_hopf or hopf_lax");
    PDESMOOTH_FIELD("analysis.tolerance", Type::real, as_real, analysis.tolerance,
                    "homogenization relative error allowed at the smallest epsilon");
#undef PDESMOOTH_FIELD
    return f;
  }();
  return fields;
}

const Field& find_field(std::string_view key) {
  for (const Field& f : schema())
    if (f.key == key) return f;
  throw ConfigError(std::string(key), "unknown key");
}

// Converts the textual value of a key-value line or flag into JSON of the field's type.
json text_to_json(const Field& f, std::string_view raw) {
  const std::string v = trim(raw);
  if (f.nullable && (v == "default" || v.empty())) return nullptr;
  auto number = [&](std::string_view s) -> json {
    const std::string t = trim(s);
    double d = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
      throw ConfigError(f.key, "expected a number, got '" + t + "'");
    if (f.type == Type::integer) {
      long long n = 0;
      const auto [q, ec2] = std::from_chars(t.data(), t.data() + t.size(), n);
      if (ec2 == std::errc() && q == t.data() + t.size()) return json(n);
    }
    return json(d);
  };
  switch (f.type) {
    case Type::real:
    case Type::integer:
      return number(v);
    case Type::boolean:
      if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
      if (v == "false" || v == "no" || v == "off" || v == "0") return false;
      throw ConfigError(f.key, "expected true or false, got '" + v + "'");
    case Type::string:
      return v;
    case Type::real_list:
    case Type::algorithm_list: {
      json a = json::array();
      std::string body = v;
      if (body.size() >= 2 && body.front() == '[' && body.back() == ']')
        body = body.substr(1, body.size() - 2);
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        if (f.type == Type::real_list)
          a.push_back(number(item));
        else
          a.push_back(trim(item));
      }
      return a;
    }
  }
  return nullptr;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::solve_pde: return "solve-pde";
    case ExperimentKind::optimize: return "optimize";
    case ExperimentKind::compare: return "compare";
    case ExperimentKind::verify_homogenization: return "verify-homogenization";
    case ExperimentKind::control_improvement: return "control-improvement";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::invariant_measure: return "invariant-measure";
    case ExperimentKind::reproduce_figure1: return "reproduce-figure1";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  for (auto k : {ExperimentKind::solve_pde, ExperimentKind::optimize, ExperimentKind::compare,
                 ExperimentKind::verify_homogenization, ExperimentKind::control_improvement,
                 ExperimentKind::spectrum, ExperimentKind::invariant_measure,
                 ExperimentKind::reproduce_figure1})
    if (to_string(k) == n) return k;
  throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

OptimizerConfig resolve(Algorithm a, const OptimizerOverrides& o) {
  OptimizerConfig c = default_config(a);
  if (o.eta) c.eta = *o.eta;
  if (o.eta_y) c.eta_y = *o.eta_y;
  if (o.L) c.L = *o.L;
  if (o.gamma0) c.gamma0 = *o.gamma0;
  if (o.gamma1) c.gamma1 = *o.gamma1;
  if (o.beta_inv_ex) c.beta_inv_ex = *o.beta_inv_ex;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.delta) c.delta = *o.delta;
  if (o.workers) c.n_workers = *o.workers;
  if (o.worker_threads) c.worker_threads = *o.worker_threads;
  if (o.anneal_factor) c.anneal_factor = *o.anneal_factor;
  if (o.anneal_period) c.anneal_period = *o.anneal_period;
  if (o.gamma_per_dim) c.gamma_per_dim = *o.gamma_per_dim;
  // SGD has no inner loop; an L given for the others does not apply to it.
  if (a == Algorithm::sgd) c.L = 1;
  return c;
}

GridGeometry PdeSettings::geometry() const {
  if (dim == 1) return GridGeometry::line(lower, upper, grid_n);
  return GridGeometry::square(lower, upper, grid_n);
}

bool operator==(const PdeSettings& a, const PdeSettings& b) {
  const auto& x = a.solve;
  const auto& y = b.solve;
  return x.beta_inv == y.beta_inv && x.t_final == y.t_final && x.dt == y.dt &&
         x.cfl_fraction == y.cfl_fraction && x.scheme == y.scheme && x.boundary == y.boundary &&
         a.grid_n == b.grid_n && a.lower == b.lower && a.upper == b.upper && a.dim == b.dim;
}

ExperimentConfig parse_config_json(const json& j, ExperimentConfig base) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object of sections");
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw ConfigError(section, "expected a section object");
    for (const auto& [name, value] : body.items()) {
      const std::string key = section + "." + name;
      const Field& f = find_field(key);
      if (value.is_null() && !f.nullable && key != "experiment.kind")
        throw ConfigError(key, "null is only allowed for optimizer keys");
      f.set(base, value);
    }
  }
  return base;
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno), "unterminated section");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ConfigError(key, "key outside of a section");
      key = section + "." + key;
    }
    apply_setting(base, key, std::string_view(t).substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string head = trim(text);
  if (path.extension() == ".json" || (!head.empty() && head.front() == '{')) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config_json(j, std::move(base));
  }
  return parse_config_text(text, std::move(base));
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const Field& f = find_field(key);
  f.set(cfg, text_to_json(f, value));
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.repeat < 1) throw ConfigError("experiment.repeat", "must be at least 1");
  if (cfg.threads < 1) throw ConfigError("experiment.threads", "must be at least 1");
  if (cfg.log_every < 1) throw ConfigError("experiment.log_every", "must be at least 1");
  if (cfg.algorithms.empty()) throw ConfigError("experiment.algorithms", "must not be empty");
  for (Algorithm a : cfg.algorithms) {
    try {
      validate(resolve(a, cfg.optimizer));
    } catch (const std::invalid_argument& e) {
      // Map the message back to the key it is about.
      const std::string msg = e.what();
      std::string key = "optimizer";
      for (const char* k : {"eta_y", "eta", "gamma0", "gamma1", "beta_inv_ex", "alpha", "delta",
                            "n_workers", "anneal factor", "anneal period", "worker_threads", "L "}) {
        if (msg.rfind(k, 0) == 0) {
          std::string name = k;
          if (name == "n_workers") name = "workers";
          if (name == "anneal factor") name = "anneal_factor";
          if (name == "anneal period") name = "anneal_period";
          if (name == "L ") name = "L";
          key = "optimizer." + name;
          break;
        }
      }
      throw ConfigError(key, msg + " (algorithm " + to_string(a) + ")");
    }
  }
  if (cfg.pde.dim != 1 && cfg.pde.dim != 2) throw ConfigError("pde.dim", "must be 1 or 2");
  if (cfg.pde.grid_n < 3) throw ConfigError("pde.grid_n", "needs at least 3 points");
  if (!(cfg.pde.upper > cfg.pde.lower)) throw ConfigError("pde.upper", "must exceed pde.lower");
  if (cfg.pde.solve.beta_inv < 0) throw ConfigError("pde.beta_inv", "must be non-negative");
  if (cfg.pde.solve.t_final < 0) throw ConfigError("pde.t", "must be non-negative");
  if (cfg.pde.solve.dt < 0) throw ConfigError("pde.dt", "must be non-negative");
  if (!(cfg.pde.solve.cfl_fraction > 0 && cfg.pde.solve.cfl_fraction <= 1))
    throw ConfigError("pde.cfl_fraction", "must lie in (0, 1]");
  if (!(cfg.analysis.gamma > 0)) throw ConfigError("analysis.gamma", "must be positive");
  if (cfg.analysis.beta_inv < 0) throw ConfigError("analysis.beta_inv", "must be non-negative");
  if (cfg.analysis.burn_in >= cfg.analysis.n_steps)
    throw ConfigError("analysis.burn_in", "must be smaller than analysis.n_steps");
  if (!(cfg.analysis.eta_y > 0)) throw ConfigError("analysis.eta_y", "must be positive");
  if (cfg.analysis.n_seeds < 2) throw ConfigError("analysis.n_seeds", "needs at least 2 seeds");
  if (cfg.analysis.matrix_dim < 1) throw ConfigError("analysis.matrix_dim", "must be positive");
  for (double e : cfg.analysis.epsilons)
    if (!(e > 0)) throw ConfigError("analysis.epsilons", "must be positive");
}

ExperimentKind require_kind(const ExperimentConfig& cfg) {
  if (!cfg.kind) throw ConfigError("experiment.kind", "missing required key");
  return *cfg.kind;
}

json to_json(const ExperimentConfig& cfg) {
  json j = json::object();
  for (const Field& f : schema()) {
    const auto dot = f.key.find('.');
    j[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.get(cfg);
  }
  return j;
}

std::string to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  std::string section;
  for (const Field& f : schema()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    const json v = f.get(cfg);
    if (v.is_null()) continue;
    out << f.key.substr(dot + 1) << " = ";
    if (v.is_string()) {
      out << v.get<std::string>();
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        if (v[i].is_string())
          out << v[i].get<std::string>();
        else
          out << v[i].dump();
      }
    } else {
      out << v.dump();
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::pair<std::string, std::string>> config_keys() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : schema()) out.emplace_back(f.key, f.help);
  return out;
}

}  // namespace pdesmooth
