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

// Command-line entry point. Every subcommand builds an ExperimentConfig from
// an optional config file, then applies flags on top of it.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdesmooth/config.hpp"
#include "pdesmooth/experiment.hpp"

namespace {

using pdesmooth::ExperimentKind;

struct FlagSpec {
  const char* flag;
  const char* key;
};

// Subcommand flags and the config keys they set.
const std::vector<FlagSpec> kObjectiveFlags{{"--objective", "experiment.objective"}};

const std::vector<FlagSpec> kOptimizerFlags{
    {"--algo", "experiment.algorithms"},   {"--eta", "optimizer.eta"},
    {"--eta-y", "optimizer.eta_y"},        {"--L", "optimizer.L"},
    {"--gamma0", "optimizer.gamma0"},      {"--gamma1", "optimizer.gamma1"},
    {"--alpha", "optimizer.alpha"},        {"--delta", "optimizer.delta"},
    {"--workers", "optimizer.workers"},    {"--beta-inv-ex", "optimizer.beta_inv_ex"},
    {"--anneal-factor", "optimizer.anneal_factor"},
    {"--anneal-period", "optimizer.anneal_period"},
    {"--steps", "experiment.steps"},       {"--budget", "experiment.budget"},
    {"--repeat", "experiment.repeat"},     {"--log-every", "experiment.log_every"},
};

const std::vector<FlagSpec> kPdeFlags{
    {"--scheme", "pde.scheme"}, {"--beta-inv", "pde.beta_inv"}, {"--t", "pde.t"},
    {"--dt", "pde.dt"},         {"--grid-n", "pde.grid_n"},     {"--lower", "pde.lower"},
    {"--upper", "pde.upper"},   {"--dim", "pde.dim"},           {"--boundary", "pde.boundary"},
};

const std::vector<FlagSpec> kAnalysisFlags{
    {"--gamma", "analysis.gamma"},       {"--beta-inv", "analysis.beta_inv"},
    {"--x", "analysis.x"},               {"--probes", "analysis.probes"},
    {"--epsilons", "analysis.epsilons"}, {"--n-steps", "analysis.n_steps"},
    {"--burn-in", "analysis.burn_in"},   {"--eta-y", "analysis.eta_y"},
    {"--paths", "analysis.n_paths"},     {"--horizon", "analysis.horizon"},
    {"--seeds", "analysis.n_seeds"},     {"--trials", "analysis.trials"},
    {"--matrix-dim", "analysis.matrix_dim"}, {"--window", "analysis.window"},
    {"--reference", "analysis.reference"},   {"--tolerance", "analysis.tolerance"},
};

struct Subcommand {
  ExperimentKind kind;
  CLI::App* app = nullptr;
  std::vector<std::pair<std::string, std::string>> values;  // flag value storage per key
  std::vector<std::pair<CLI::Option*, std::string>> options;
};

// Storage is sized before any option binds to it, so the references stay valid.
void add_flags(Subcommand& sub, const std::vector<FlagSpec>& flags) {
  sub.values.assign(flags.size(), {});
  for (std::size_t i = 0; i < flags.size(); ++i) {
    sub.values[i].first = flags[i].key;
    auto* opt = sub.app->add_option(flags[i].flag, sub.values[i].second,
                                    std::string("sets ") + flags[i].key);
    sub.options.emplace_back(opt, flags[i].key);
  }
}

std::string keys_footer() {
  std::string s = "\nConfig keys (file sections [experiment], [optimizer], [pde], [analysis]):\n";
  for (const auto& [key, help] : pdesmooth::config_keys()) s += "  " + key + "  " + help + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdesmooth: PDE-smoothed loss landscapes and the optimizers built on them"};
  app.require_subcommand(1);
  app.footer(keys_footer());

  std::string config_path, out;
  std::uint64_t seed = 0;
  int threads = 1;
  bool deterministic = false;
  std::vector<std::string> sets;
  auto* config_opt = app.add_option("--config", config_path, "config file (key-value text or JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "base seed");
  auto* out_opt = app.add_option("--out", out, "output directory, or a .csv path for the first run");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads");
  auto* det_opt = app.add_flag("--deterministic", deterministic, "run on one thread regardless of --threads");
  app.add_option("--set", sets, "override any key, e.g. --set optimizer.gamma0=0.1");
  for (auto* o : {config_opt, seed_opt, out_opt, threads_opt, det_opt}) o->configurable(false);
  app.fallthrough();

  const std::vector<std::pair<const char*, ExperimentKind>> kinds{
      {"solve-pde", ExperimentKind::solve_pde},
      {"optimize", ExperimentKind::optimize},
      {"compare", ExperimentKind::compare},
      {"verify-homogenization", ExperimentKind::verify_homogenization},
      {"control-improvement", ExperimentKind::control_improvement},
      {"spectrum", ExperimentKind::spectrum},
      {"invariant-measure", ExperimentKind::invariant_measure},
      {"reproduce-figure1", ExperimentKind::reproduce_figure1},
  };
  const std::map<std::string, std::string> descriptions{
      {"solve-pde", "solve a smoothing PDE on a grid and write u.csv / u.bin"},
      {"optimize", "run optimizers and write one CSV per seed"},
      {"compare", "run optimizers at a common gradient budget and write comparison.csv"},
      {"verify-homogenization", "compare inner-loop drift estimates with the smoothed gradient"},
      {"control-improvement", "paired controlled and uncontrolled SGD paths"},
      {"spectrum", "harmonic-mean eigenvalue bounds"},
      {"invariant-measure", "sample the inner dynamics and compare with the Gaussian closed form"},
      {"reproduce-figure1", "Fokker-Planck densities under three drifts"},
  };

  std::vector<Subcommand> subs(kinds.size());
  std::vector<std::vector<FlagSpec>> flag_sets(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    subs[i].kind = kinds[i].second;
    subs[i].app = app.add_subcommand(kinds[i].first, descriptions.at(kinds[i].first));
    std::vector<FlagSpec>& flags = flag_sets[i];
    flags = kObjectiveFlags;
    switch (kinds[i].second) {
      case ExperimentKind::solve_pde:
        flags.insert(flags.end(), kPdeFlags.begin(), kPdeFlags.end());
        break;
      case ExperimentKind::optimize:
      case ExperimentKind::compare:
        flags.insert(flags.end(), kOptimizerFlags.begin(), kOptimizerFlags.end());
        break;
      case ExperimentKind::reproduce_figure1:
        for (const FlagSpec& f : kAnalysisFlags)
          if (std::string(f.flag) != "--beta-inv") flags.push_back(f);
        flags.push_back({"--fp-beta-inv", "analysis.beta_inv"});
        flags.push_back({"--smoothing-beta-inv", "pde.beta_inv"});
        flags.push_back({"--grid-n", "pde.grid_n"});
        flags.push_back({"--lower", "pde.lower"});
        flags.push_back({"--upper", "pde.upper"});
        break;
      default:
        flags.insert(flags.end(), kAnalysisFlags.begin(), kAnalysisFlags.end());
        break;
    }
    add_flags(subs[i], flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    pdesmooth::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = pdesmooth::load_config(config_path);

    const Subcommand* chosen = nullptr;
    for (const Subcommand& s : subs)
      if (s.app->parsed()) chosen = &s;
    cfg.kind = chosen->kind;

    // Flags override the file.
    if (seed_opt->count()) cfg.seed = seed;
    if (threads_opt->count()) cfg.threads = threads;
    if (det_opt->count()) cfg.deterministic = deterministic;
    if (out_opt->count()) {
      const std::filesystem::path p(out);
      if (p.extension() == ".csv") {
        cfg.run_csv = out;
        cfg.out = p.has_parent_path() ? p.parent_path().string() : std::string(".");
      } else {
        cfg.out = out;
      }
    }
    for (const auto& [opt, key] : chosen->options)
      if (opt->count()) pdesmooth::apply_setting(cfg, key, opt->as<std::string>());
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw pdesmooth::ConfigError(s, "--set expects key=value");
      pdesmooth::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }

    const pdesmooth::ExperimentOutcome outcome = pdesmooth::run_experiment(cfg, std::cout);
    if (!outcome.passed()) {
      std::cerr << "failed assertions:\n";
      for (const std::string& f : outcome.failures) std::cerr << "  " << f << '\n';
    }
    return outcome.exit_code();
  } catch (const pdesmooth::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
