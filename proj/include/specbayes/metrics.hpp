#pragma once

#include <cstdint>
#include <string>

#include "specbayes/spectral_core.hpp"

namespace specbayes {

struct RiskReport {
  std::string scenario;
  Index n = 0;
  Index p = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  double risk = 0.0;
};

/// ||theta - theta*||^2_Sigma = E[(x'(theta - theta*))^2] for x with covariance cov.
double predictive_risk(const VectorXd& theta, const VectorXd& theta_star, const SpectralDecomposition& cov);

/// K(P*, P_{theta, sigma^2}) for the regression laws y = x'theta + N(0, sigma^2)
/// with x of covariance cov:
///   r/2 - log(r)/2 - 1/2 + ||theta* - theta||^2_Sigma / (2 sigma^2),  r = sigma*^2 / sigma^2.
double kl_divergence(const VectorXd& theta, double sigma2, const VectorXd& theta_star, double sigma_star2,
                     const SpectralDecomposition& cov);

/// r^2/2 - r + 1/2 + r ||theta* - theta||^2_Sigma / sigma^2.
/// This is E_x[ Var(log-ratio | x) ]; for Gaussian covariates the
/// unconditional variance adds ||theta* - theta||^4_Sigma / (2 sigma^4).
double kl_variation(const VectorXd& theta, double sigma2, const VectorXd& theta_star, double sigma_star2,
                    const SpectralDecomposition& cov);

/// (100 / n) sum |y_true - y_pred| / |y_true|.
double mape(const VectorXd& y_true, const VectorXd& y_pred);

}  // namespace specbayes
