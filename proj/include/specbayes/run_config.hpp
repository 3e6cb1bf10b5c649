#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specbayes/csv_loader.hpp"
#include "specbayes/data_gen.hpp"
#include "specbayes/posterior_snis.hpp"
#include "specbayes/priors.hpp"

namespace specbayes {

enum class Experiment { RiskHistograms, ApproxOverlay, RiskCurve, AssumptionsCheck, RealData };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// Prior settings before the sample size is known: unset bounds default to
/// (ceil(log n / 6), ceil(log n)) per n.
struct PriorSettings {
  double radius = 1e5;
  std::optional<int> L_kappa;
  std::optional<int> U_kappa;
  LevelPenalty f;
  double eta = 1.0;
  double xi = 1.0;

  PriorConfig resolve(long n) const;
};

/// Which design the approximator is built on in approx_overlay:
///   Full      Lambda = Sigma_hat^dagger_{1:L} + X2'X2 / (2 sigma^2) as written;
///   Projected X2 replaced by X2 V_L V_L', i.e. the exact conditional at k = L
///             under the span-restricted prior.
enum class ApproxDesign { Full, Projected };

struct ApproxSettings {
  int draws = 10000;
  double sigma2 = 1.0;  // fixed sigma^2 shared by SNIS and the approximator
  ApproxDesign design = ApproxDesign::Full;
  int tv_bins = 30;
  std::array<Index, 2> tv_coords{0, 1};
};

struct SampleOutput {
  bool write = false;
  std::vector<Index> coords{0, 1};
  bool full_theta = false;
};

/// One assumption check: an example tuple, optionally paired with a
/// different eigenvalue schedule, evaluated at each n.
struct AssumptionCheckSpec {
  std::string label;
  std::string example = "exponential";  // exponential | lambert | polynomial
  double tau = 2.0;
  double m = 1.0 / 3.0;
  double alpha = 8.0;
  double beta = 0.2;
  std::string dimension = "exponential";  // polynomial example: exponential | polynomial
  double theta_constant = 1.0;
  std::optional<double> nu;  // unset: n exp(-sqrt(n)) / p
  std::optional<double> power_schedule;  // lambda_k = k^{-power} over p = ceil(n^{4/3})
  std::vector<double> n_values{1e4, 1e5, 1e6};
  double c = 1.0;
};

struct RealDataSettings {
  std::filesystem::path path;
  std::string response;
  MissingPolicy policy;
  double test_fraction = 0.5;
  std::uint64_t split_seed = 0;
  double level = 0.95;
  Index predictive_draws = 100000;
};

struct RunConfig {
  Experiment experiment = Experiment::RiskHistograms;
  std::uint64_t master_seed = 20240601;
  int threads = 1;
  std::filesystem::path output_dir = "out";
  std::vector<Index> n_grid{100, 200, 400};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  ScenarioSpec scenario;
  Basis basis = Basis::RandomOrthogonal;
  PriorSettings prior;
  SNISConfig snis;
  std::vector<std::string> estimators{"spectral_bayes"};
  double ridge_lambda = 1.0;
  SampleOutput samples;
  ApproxSettings approx;
  std::vector<AssumptionCheckSpec> assumption_checks;
  RealDataSettings real_data;

  void validate() const;
};

/// Parses a config document; unknown keys are rejected so typos surface.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Default assumption checks: the exponential example at n in {1e4, 1e5, 1e6}
/// and the same tuple against lambda_k = k^{-1/2} at n = 1e6.
std::vector<AssumptionCheckSpec> default_assumption_checks();

}  // namespace specbayes
