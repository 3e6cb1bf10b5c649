#include "specbayes/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "specbayes/errors.hpp"

namespace specbayes {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

PriorConfig PriorConfig::for_sample_size(long n) {
  if (n < 2) throw std::invalid_argument("PriorConfig::for_sample_size: n must be >= 2");
  const double log_n = std::log(static_cast<double>(n));
  PriorConfig cfg;
  cfg.L_kappa = std::max(1, static_cast<int>(std::ceil(log_n / 6.0)));
  cfg.U_kappa = std::max(cfg.L_kappa, static_cast<int>(std::ceil(log_n)));
  return cfg;
}

void PriorConfig::validate() const {
  if (L_kappa < 1 || U_kappa < L_kappa) {
    throw std::invalid_argument("PriorConfig: need 1 <= L_kappa <= U_kappa");
  }
  if (!(radius > 0.0) || !(eta > 0.0) || !(xi > 0.0)) {
    throw std::invalid_argument("PriorConfig: radius, eta and xi must be positive");
  }
  if (!f) throw std::invalid_argument("PriorConfig: f is empty");
  for (int k = L_kappa; k < U_kappa; ++k) {
    if (f(k) < f(k + 1)) throw std::invalid_argument("PriorConfig: f must be non-increasing on the support");
  }
}

double log_prior_theta_unnorm(const VectorXd& theta, const SpectralDecomposition& dec, int k,
                              const PriorConfig& cfg) {
  if (k < cfg.L_kappa || k > cfg.U_kappa) {
    throw std::invalid_argument("log_prior_theta_unnorm: k=" + std::to_string(k) + " outside [L, U]");
  }
  if (theta.size() != dec.dim()) throw std::invalid_argument("log_prior_theta_unnorm: dimension mismatch");
  const double norm = theta.norm();
  if (norm > cfg.radius) return kNegInf;

  const Index kept = std::min<Index>(k, dec.stored());
  const double lead = dec.eigenvalue(0);
  // directions with a numerically zero eigenvalue carry no prior mass
  Index live = 0;
  while (live < kept && dec.eigenvalues(live) > 1e-12 * lead) ++live;
  const auto basis = dec.eigenvectors.leftCols(live);
  const VectorXd coef = basis.transpose() * theta;
  const double off_span = (theta - basis * coef).norm();
  if (off_span > 1e-8 * norm) return kNegInf;
  return -(coef.array().square() / dec.eigenvalues.head(live).array()).sum();
}

std::vector<std::pair<int, double>> prior_k_logweights(const PriorConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<int, double>> out;
  double top = kNegInf;
  for (int k = cfg.L_kappa; k <= cfg.U_kappa; ++k) {
    out.emplace_back(k, cfg.f(k));
    top = std::max(top, out.back().second);
  }
  double total = 0.0;
  for (const auto& [k, v] : out) total += std::exp(v - top);
  const double log_norm = top + std::log(total);
  for (auto& [k, v] : out) v -= log_norm;
  return out;
}

double log_prior_sigma2(double sigma2, const PriorConfig& cfg) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("log_prior_sigma2: sigma2 must be positive");
  const double eta = cfg.eta;
  const double xi = cfg.xi;
  const double dev = sigma2 - eta;
  return 0.5 * (std::log(xi) - std::log(2.0 * std::numbers::pi) - 3.0 * std::log(sigma2)) -
         xi * dev * dev / (2.0 * eta * eta * sigma2);
}

void RejectionMonitor::record(bool accepted) {
  ++trials_;
  if (accepted) ++accepts_;
  if (trials_ >= block_) {
    const double rate = static_cast<double>(accepts_) / static_cast<double>(trials_);
    if (rate < min_rate_) {
      throw ConfigurationError(what_ + ": rejection acceptance rate " + std::to_string(rate) +
                               " below " + std::to_string(min_rate_) + " (R too small for spectrum)");
    }
    trials_ = 0;
    accepts_ = 0;
  }
}

VectorXd sample_prior_coefficients(int k, const SpectralDecomposition& dec, const PriorConfig& cfg,
                                   Rng& rng, RejectionMonitor& monitor) {
  if (k < 1 || k > dec.stored() || !(dec.eigenvalues(k - 1) > 0.0)) {
    throw std::invalid_argument("sample_prior: lambda_k must be positive for every kept direction");
  }
  const VectorXd sd = (dec.eigenvalues.head(k) / 2.0).cwiseSqrt();
  std::normal_distribution<double> normal;
  VectorXd u(k);
  for (;;) {
    for (int j = 0; j < k; ++j) u(j) = sd(j) * normal(rng);
    const bool inside = u.norm() <= cfg.radius;
    monitor.record(inside);
    if (inside) return u;
  }
}

double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double nu = normal(rng);
  const double y = nu * nu;
  const double my = mean * y;
  const double x =
      mean + mean * my / (2.0 * shape) - mean / (2.0 * shape) * std::sqrt(4.0 * shape * my + my * my);
  if (unif(rng) <= mean / (mean + x)) return x;
  return mean * mean / x;
}

PriorDraw sample_prior(int k, const SpectralDecomposition& dec, const PriorConfig& cfg, Rng& rng) {
  RejectionMonitor monitor("sample_prior");
  const VectorXd u = sample_prior_coefficients(k, dec, cfg, rng, monitor);
  PriorDraw d;
  d.theta = dec.eigenvectors.leftCols(k) * u;
  d.sigma2 = sample_inverse_gaussian(cfg.eta, cfg.xi, rng);
  return d;
}

}  // namespace specbayes
