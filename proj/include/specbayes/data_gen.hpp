#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "specbayes/spectral_core.hpp"

namespace specbayes {

enum class ScheduleKind { ExponentialFloor, Polynomial, Identity };

/// Eigenvalue schedule of a synthetic covariance.
///   ExponentialFloor: scale * exp(-rate * j) + n * exp(-sqrt(n)) / p  (floor optional)
///   Polynomial:       scale * j^(-rate)
///   Identity:         1
/// with j = 1..p.
struct EigenSchedule {
  ScheduleKind kind = ScheduleKind::ExponentialFloor;
  double scale = 10.0;
  double rate = 1.0 / 8.0;
  bool floor = true;

  static EigenSchedule exponential_floor() { return {}; }
  static EigenSchedule polynomial(double exponent = 1.0) {
    return {ScheduleKind::Polynomial, 1.0, exponent, false};
  }
  static EigenSchedule identity() { return {ScheduleKind::Identity, 1.0, 0.0, false}; }

  /// The p eigenvalues for sample size n, non-increasing.
  VectorXd eigenvalues(Index p, Index n) const;
};

enum class Basis { Diagonal, RandomOrthogonal };

/// Covariance with the scheduled spectrum, in the standard basis or in a
/// seeded random orthogonal basis (QR of a Gaussian matrix, sign-fixed).
SpectralDecomposition build_covariance(const EigenSchedule& schedule, Index p, Index n, Basis basis,
                                       std::uint64_t seed);

enum class Scenario { I, II, III, IV };
enum class CovariateLaw { Gaussian, Laplace, IdentityGaussian };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);
std::string to_string(CovariateLaw law);

struct ScenarioSpec {
  Scenario id = Scenario::I;
  Index n = 100;
  CovariateLaw law = CovariateLaw::Gaussian;
  double theta_variance = 100.0;
  double noise_sd = 1.0;
  double sparse_fraction = 1.0 / 3.0;  // scenario iii: p1 = ceil(p * fraction)

  /// Scenario defaults: (i) gaussian, (ii) laplace, (iii) gaussian with
  /// sparse truth, (iv) identity covariance.
  static ScenarioSpec make(Scenario id, Index n);

  /// p = ceil(n^(4/3)).
  Index p() const;
  EigenSchedule schedule() const;
  void validate() const;
};

/// ceil(n^(4/3)) computed without floating-point drift at exact cubes.
Index dimension_for(Index n);

struct Dataset {
  MatrixXd X;
  VectorXd y;
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<std::string> feature_names;  // empty for synthetic data

  Index rows() const { return X.rows(); }
  Index dim() const { return X.cols(); }
};

struct SplitDataset {
  Dataset d1;  // builds the prior
  Dataset d2;  // forms the likelihood
};

/// theta*: i.i.d. N(0, theta_variance); scenario iii zeroes entries past p1.
VectorXd sample_theta_star(const ScenarioSpec& spec, std::uint64_t seed);

/// x_i with covariance cov (gaussian: Sigma^{1/2} z; laplace: sqrt(W) Sigma^{1/2} z,
/// W ~ Exp(1)); y_i = x_i' theta* + N(0, noise_sd^2).
Dataset sample_dataset(const ScenarioSpec& spec, const SpectralDecomposition& cov,
                       const VectorXd& theta_star, std::uint64_t seed);

/// First n/2 rows and last n/2 rows. Odd n is rejected.
SplitDataset split_dataset(const Dataset& d);

}  // namespace specbayes
