#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "specbayes/errors.hpp"
#include "specbayes/harness.hpp"
#include "specbayes/run_config.hpp"

namespace {

using nlohmann::json;
using namespace specbayes;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "master seed (overrides the config)");
  cmd->add_option("--out", flags.out, "output directory (overrides the config)");
  cmd->add_option("--threads", flags.threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
}

json load_document(const CommonFlags& flags) {
  if (flags.config.empty()) return json::object();
  std::ifstream in(flags.config);
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + flags.config + ": " + e.what());
  }
}

RunConfig resolve(const CommonFlags& flags, const std::optional<std::string>& experiment) {
  json doc = load_document(flags);
  if (experiment) doc["experiment"] = *experiment;
  if (flags.seed) doc["master_seed"] = *flags.seed;
  if (flags.out) doc["output_dir"] = *flags.out;
  if (flags.threads) doc["threads"] = *flags.threads;
  return parse_run_config(doc);
}

int report(const RunConfig& cfg, const RunManifest& man) {
  std::size_t failed = 0;
  for (const auto& c : man.cells) {
    if (c.status == "ok") continue;
    ++failed;
    std::cerr << "cell n=" << c.n << " seed=" << c.seed << " failed: " << c.error << '\n';
  }
  std::cout << to_string(cfg.experiment) << ": " << man.cells.size() - failed << "/" << man.cells.size()
            << " cells ok, outputs in " << cfg.output_dir.string() << '\n';
  for (const auto& [name, digest] : man.digests) std::cout << "  " << name << "  sha256 " << digest << '\n';
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian over-parameterized linear regression with a spectral truncated-Gaussian prior"};
  app.set_version_flag("--version", SPECBAYES_VERSION);
  app.require_subcommand(1);

  CommonFlags simulate_flags, fit_flags, approx_flags, compare_flags, check_flags, real_flags;
  auto* simulate = app.add_subcommand("simulate", "run the experiment named in the config");
  add_common(simulate, simulate_flags, true);
  auto* fit = app.add_subcommand("fit", "SNIS fit of one (n, seed) cell: samples.csv and risk.csv");
  add_common(fit, fit_flags, true);
  auto* approx = app.add_subcommand("approx", "truncated-Gaussian approximator draws: samples.csv");
  add_common(approx, approx_flags, true);
  auto* compare = app.add_subcommand("compare", "SNIS vs approximator overlay: samples.csv and tv.csv");
  add_common(compare, compare_flags, true);
  auto* check = app.add_subcommand("check-assumptions", "evaluate the contraction conditions: report.json");
  add_common(check, check_flags, false);
  auto* real = app.add_subcommand("real-data", "fit a CSV dataset: predictions.csv and mape.csv");
  add_common(real, real_flags, false);
  std::string data_path, response;
  real->add_option("--data", data_path, "CSV file (overrides real_data.path)")->check(CLI::ExistingFile);
  real->add_option("--response", response, "response column (overrides real_data.response)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const RunConfig cfg = resolve(simulate_flags, std::nullopt);
      return report(cfg, run_experiment(cfg));
    }
    if (*fit) {
      RunConfig cfg = resolve(fit_flags, std::nullopt);
      if (cfg.experiment != Experiment::RiskHistograms && cfg.experiment != Experiment::RiskCurve) {
        cfg.experiment = Experiment::RiskCurve;
      }
      cfg.n_grid.resize(1);
      cfg.seeds.resize(1);
      cfg.samples.write = true;
      if (std::find(cfg.estimators.begin(), cfg.estimators.end(), "spectral_bayes") == cfg.estimators.end()) {
        cfg.estimators.insert(cfg.estimators.begin(), "spectral_bayes");
      }
      return report(cfg, run_experiment(cfg));
    }
    if (*approx) {
      const RunConfig cfg = resolve(approx_flags, "approx_overlay");
      return report(cfg, run_approximator_samples(cfg));
    }
    if (*compare) {
      const RunConfig cfg = resolve(compare_flags, "approx_overlay");
      return report(cfg, run_experiment(cfg));
    }
    if (*check) {
      const RunConfig cfg = resolve(check_flags, "assumptions_check");
      return report(cfg, run_experiment(cfg));
    }
    if (*real) {
      json doc = load_document(real_flags);
      doc["experiment"] = "real_data";
      if (!data_path.empty()) doc["real_data"]["path"] = data_path;
      if (!response.empty()) doc["real_data"]["response"] = response;
      if (real_flags.seed) doc["master_seed"] = *real_flags.seed;
      if (real_flags.out) doc["output_dir"] = *real_flags.out;
      if (real_flags.threads) doc["threads"] = *real_flags.threads;
      const RunConfig cfg = parse_run_config(doc);
      return report(cfg, run_experiment(cfg));
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
