#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specbayes/data_gen.hpp"
#include "specbayes/priors.hpp"
#include "specbayes/rng.hpp"
#include "specbayes/spectral_core.hpp"

namespace specbayes {

enum class ProposalMode {
  Prior,        // theta and sigma^2 from their priors given k
  Conditional,  // theta from the exact span-restricted conditional given (k, sigma^2)
};

struct SNISConfig {
  int num_draws = 10000;
  std::optional<double> fixed_sigma2;  // unset: sigma^2 drawn from its prior
  ProposalMode proposal = ProposalMode::Prior;
  std::uint64_t master_seed = 0;
  int threads = 1;

  void validate() const;
};

/// One SNIS draw. theta = basis * coefficients, where `basis` is the
/// posterior's shared p x U_kappa eigenvector block; entries past k are zero.
struct WeightedSample {
  VectorXd coefficients;
  double sigma2 = 1.0;
  int k = 1;
  double log_weight = 0.0;
};

struct WeightedPosterior {
  MatrixXd basis;
  std::vector<WeightedSample> samples;
  VectorXd normalized_weights;
  double ess = 0.0;
  bool low_ess_warning = false;

  /// Normalizes log-weights (max-subtracted) and computes ESS = 1 / sum w^2.
  /// Throws InferenceFailure when every log-weight is -inf.
  static WeightedPosterior from_samples(MatrixXd basis, std::vector<WeightedSample> samples);

  std::size_t size() const { return samples.size(); }
  VectorXd theta(std::size_t i) const;
  /// N x |coords| matrix of theta coordinates for every sample.
  MatrixXd coordinates(const std::vector<Index>& coords) const;
};

/// Gaussian log-likelihood of D2 at (theta, sigma^2).
double log_likelihood(const Dataset& d2, const VectorXd& theta, double sigma2);

/// log pi_theta (unnormalized) + log pi(k) + log pi(sigma^2) + log-likelihood.
double log_unnorm_posterior(const VectorXd& theta, double sigma2, int k, const Dataset& d2,
                            const SpectralDecomposition& dec, const PriorConfig& cfg);

/// Self-normalized importance sampling over (theta, sigma^2, k) with
/// k ~ Uniform[L, U] as importance density. `dec` is the spectrum of D1.
/// Draws are generated in fixed-size blocks, each with its own stream
/// derived from (master_seed, block), so results do not depend on the
/// thread count.
WeightedPosterior snis_sample(const SplitDataset& data, const SpectralDecomposition& dec,
                              const PriorConfig& cfg, const SNISConfig& sn);

/// Convenience overload computing the D1 spectrum first.
WeightedPosterior snis_sample(const SplitDataset& data, const PriorConfig& cfg, const SNISConfig& sn);

VectorXd posterior_mean(const WeightedPosterior& wp);

/// Weighted empirical quantiles of x_new' theta_i + N(0, sigma^2_i), from
/// `draws` posterior-predictive draws.
std::vector<double> predictive_quantiles(const WeightedPosterior& wp, const VectorXd& x_new,
                                         const std::vector<double>& probs, Rng& rng,
                                         Index draws = 100000);

struct PredictiveInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool warning = false;  // low ESS or collapsed interval
};

PredictiveInterval predictive_interval(const WeightedPosterior& wp, const VectorXd& x_new, double level,
                                       Rng& rng, Index draws = 100000);

}  // namespace specbayes
