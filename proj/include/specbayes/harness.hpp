#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "specbayes/data_gen.hpp"
#include "specbayes/priors.hpp"
#include "specbayes/run_config.hpp"
#include "specbayes/spectral_core.hpp"

namespace specbayes {

/// Seed for one component of a run, e.g. derive_seed(master, {n, seed, 2}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// (X2'X2 + lambda I)^{-1} X2'y2, solved in the m x m kernel form
/// X2' (X2 X2' + lambda I)^{-1} y2.
VectorXd ridge_baseline(const Dataset& d2, double lambda_reg);

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct CellRecord {
  Index n = 0;
  Index p = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::string error;
  double ess = 0.0;
  bool low_ess_warning = false;
  double seconds = 0.0;
};

struct RunManifest {
  nlohmann::json config;
  std::string version;
  std::uint64_t master_seed = 0;
  std::vector<StageTiming> stages;
  std::vector<CellRecord> cells;
  std::map<std::string, std::string> digests;  // file name -> sha256
  nlohmann::json notes = nlohmann::json::object();

  bool all_cells_ok() const;
  nlohmann::json to_json() const;
};

/// One synthetic (n, seed) instance: truth, data, split and prior spectrum.
struct SimulatedCell {
  ScenarioSpec spec;
  VectorXd theta_star;
  SplitDataset data;
  SpectralDecomposition prior_spectrum;  // empirical spectrum of D1
  PriorConfig prior;
};

/// Covariance for sample size n, shared by every seed and scenario of a run.
SpectralDecomposition covariance_for(const RunConfig& cfg, Index n);

SimulatedCell simulate_cell(const RunConfig& cfg, const SpectralDecomposition& cov, Index n, std::uint64_t seed);

/// Runs the configured experiment, writes its CSV/JSON outputs into
/// cfg.output_dir and the manifest (manifest.json) last. A failing (n, seed)
/// cell is recorded in the manifest and does not stop the others.
RunManifest run_experiment(const RunConfig& cfg);

/// Approximator draws only (samples.csv with source = approx) for every cell.
RunManifest run_approximator_samples(const RunConfig& cfg);

}  // namespace specbayes
