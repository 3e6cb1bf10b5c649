#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "specbayes/rng.hpp"
#include "specbayes/spectral_core.hpp"

namespace specbayes {

/// Log-weight function f of the truncation-level prior, pi(k) ∝ exp(f(k)).
/// The default f(k) = -k^2 - 4k does not satisfy |f(k) - f(L)| = omega(n)
/// at finite n; the approximation guarantee for the truncated-Gaussian
/// approximator assumes that growth, so treat the default as a practical
/// choice rather than a theory-backed one.
struct LevelPenalty {
  double quadratic = 1.0;
  double linear = 4.0;
  double offset = 0.0;
  double operator()(int k) const { return offset - quadratic * k * k - linear * k; }
};

struct PriorConfig {
  double radius = 1e5;  // R
  int L_kappa = 1;
  int U_kappa = 1;
  std::function<double(int)> f = LevelPenalty{};
  double eta = 1.0;  // inverse-Gaussian mean
  double xi = 1.0;   // inverse-Gaussian shape

  /// (L, U) = (ceil(log n / 6), ceil(log n)), both at least 1.
  static PriorConfig for_sample_size(long n);
  void validate() const;
};

/// -theta' Sigma_hat^dagger_{1:k} theta on the support
/// span{v_1..v_k} ∩ {||theta|| <= R}, -inf off it. No 1/2 in the exponent.
double log_prior_theta_unnorm(const VectorXd& theta, const SpectralDecomposition& dec, int k,
                              const PriorConfig& cfg);

/// Normalized log pi(k) over [L, U].
std::vector<std::pair<int, double>> prior_k_logweights(const PriorConfig& cfg);

/// Inverse-Gaussian log density with mean eta and shape xi.
double log_prior_sigma2(double sigma2, const PriorConfig& cfg);

/// Counts trials of a rejection sampler and raises ConfigurationError when
/// the acceptance rate over a block of trials falls below the floor.
class RejectionMonitor {
 public:
  explicit RejectionMonitor(std::string what, std::uint64_t block = 10000, double min_rate = 1e-4)
      : what_(std::move(what)), block_(block), min_rate_(min_rate) {}
  void record(bool accepted);

 private:
  std::string what_;
  std::uint64_t block_;
  double min_rate_;
  std::uint64_t trials_ = 0;
  std::uint64_t accepts_ = 0;
};

/// Eigen-coordinates u (theta = V_k u) of a draw from the truncated theta
/// prior: u_j ~ N(0, lambda_j / 2), rejected until ||u|| <= R.
VectorXd sample_prior_coefficients(int k, const SpectralDecomposition& dec, const PriorConfig& cfg,
                                   Rng& rng, RejectionMonitor& monitor);

/// Inverse-Gaussian draw (transformation with two roots).
double sample_inverse_gaussian(double mean, double shape, Rng& rng);

struct PriorDraw {
  VectorXd theta;
  double sigma2;
};

PriorDraw sample_prior(int k, const SpectralDecomposition& dec, const PriorConfig& cfg, Rng& rng);

}  // namespace specbayes
