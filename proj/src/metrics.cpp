#include "specbayes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specbayes {

namespace {

double sigma_norm_sq(const VectorXd& theta, const VectorXd& theta_star, const SpectralDecomposition& cov) {
  if (theta.size() != theta_star.size() || theta.size() != cov.dim()) {
    throw std::invalid_argument("metrics: dimension mismatch");
  }
  return std::max(0.0, cov.quadratic_form(theta - theta_star));
}

void check_variances(double sigma2, double sigma_star2) {
  if (!(sigma2 > 0.0) || !(sigma_star2 > 0.0)) {
    throw std::invalid_argument("metrics: variances must be positive");
  }
}

}  // namespace

double predictive_risk(const VectorXd& theta, const VectorXd& theta_star, const SpectralDecomposition& cov) {
  return sigma_norm_sq(theta, theta_star, cov);
}

double kl_divergence(const VectorXd& theta, double sigma2, const VectorXd& theta_star, double sigma_star2,
                     const SpectralDecomposition& cov) {
  check_variances(sigma2, sigma_star2);
  const double r = sigma_star2 / sigma2;
  const double dist = sigma_norm_sq(theta, theta_star, cov);
  // r - log r - 1 loses everything to cancellation near r = 1; log1p keeps it exact at the truth.
  const double shape = (r - 1.0) - std::log1p(r - 1.0);
  return std::max(0.0, 0.5 * shape) + 0.5 * dist / sigma2;
}

double kl_variation(const VectorXd& theta, double sigma2, const VectorXd& theta_star, double sigma_star2,
                    const SpectralDecomposition& cov) {
  check_variances(sigma2, sigma_star2);
  const double r = sigma_star2 / sigma2;
  const double dist = sigma_norm_sq(theta, theta_star, cov);
  return 0.5 * (r - 1.0) * (r - 1.0) + r * dist / sigma2;
}

double mape(const VectorXd& y_true, const VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("mape: length mismatch");
  if (y_true.size() == 0) throw std::invalid_argument("mape: empty input");
  double total = 0.0;
  for (Index i = 0; i < y_true.size(); ++i) {
    if (y_true(i) == 0.0) throw std::invalid_argument("mape: zero ground-truth entry at index " + std::to_string(i));
    total += std::abs(y_true(i) - y_pred(i)) / std::abs(y_true(i));
  }
  return 100.0 * total / static_cast<double>(y_true.size());
}

}  // namespace specbayes
