#include "specbayes/posterior_snis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "specbayes/bvm_approx.hpp"
#include "specbayes/errors.hpp"
#include "specbayes/parallel.hpp"

namespace specbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 1024;

double gaussian_loglik(const VectorXd& residual, double sigma2) {
  const double m = static_cast<double>(residual.size());
  return -0.5 * m * std::log(2.0 * std::numbers::pi * sigma2) - residual.squaredNorm() / (2.0 * sigma2);
}

}  // namespace

void SNISConfig::validate() const {
  if (num_draws < 1) throw std::invalid_argument("SNISConfig: num_draws must be >= 1");
  if (fixed_sigma2 && !(*fixed_sigma2 > 0.0)) {
    throw std::invalid_argument("SNISConfig: fixed sigma2 must be positive");
  }
  if (threads < 1) throw std::invalid_argument("SNISConfig: threads must be >= 1");
}

WeightedPosterior WeightedPosterior::from_samples(MatrixXd basis, std::vector<WeightedSample> samples) {
  WeightedPosterior wp;
  wp.basis = std::move(basis);
  wp.samples = std::move(samples);
  const auto n = static_cast<Index>(wp.samples.size());
  if (n == 0) throw InferenceFailure("WeightedPosterior: no samples");
  double top = kNegInf;
  for (const auto& s : wp.samples) top = std::max(top, s.log_weight);
  if (!std::isfinite(top)) throw InferenceFailure("SNIS: every importance weight is zero");
  wp.normalized_weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    wp.normalized_weights(i) = std::exp(wp.samples[static_cast<std::size_t>(i)].log_weight - top);
  }
  wp.normalized_weights /= wp.normalized_weights.sum();
  wp.ess = 1.0 / wp.normalized_weights.squaredNorm();
  wp.low_ess_warning = wp.ess < 10.0;
  return wp;
}

VectorXd WeightedPosterior::theta(std::size_t i) const {
  return basis * samples.at(i).coefficients;
}

MatrixXd WeightedPosterior::coordinates(const std::vector<Index>& coords) const {
  MatrixXd rows(static_cast<Index>(coords.size()), basis.cols());
  for (std::size_t c = 0; c < coords.size(); ++c) {
    if (coords[c] < 0 || coords[c] >= basis.rows()) {
      throw std::invalid_argument("WeightedPosterior::coordinates: coordinate out of range");
    }
    rows.row(static_cast<Index>(c)) = basis.row(coords[c]);
  }
  MatrixXd out(static_cast<Index>(samples.size()), static_cast<Index>(coords.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.row(static_cast<Index>(i)) = (rows * samples[i].coefficients).transpose();
  }
  return out;
}

double log_likelihood(const Dataset& d2, const VectorXd& theta, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("log_likelihood: sigma2 must be positive");
  if (theta.size() != d2.X.cols()) throw std::invalid_argument("log_likelihood: dimension mismatch");
  return gaussian_loglik(d2.y - d2.X * theta, sigma2);
}

double log_unnorm_posterior(const VectorXd& theta, double sigma2, int k, const Dataset& d2,
                            const SpectralDecomposition& dec, const PriorConfig& cfg) {
  const double log_theta = log_prior_theta_unnorm(theta, dec, k, cfg);
  const double log_sigma = log_prior_sigma2(sigma2, cfg);
  double log_k = kNegInf;
  for (const auto& [level, lp] : prior_k_logweights(cfg))
    if (level == k) log_k = lp;
  if (log_theta == kNegInf) return kNegInf;
  return log_theta + log_k + log_sigma + log_likelihood(d2, theta, sigma2);
}

WeightedPosterior snis_sample(const SplitDataset& data, const SpectralDecomposition& dec,
                              const PriorConfig& cfg, const SNISConfig& sn) {
  sn.validate();
  cfg.validate();
  const Dataset& d2 = data.d2;
  if (d2.rows() < 1) throw std::invalid_argument("snis_sample: D2 is empty");
  if (d2.X.cols() != dec.dim()) throw std::invalid_argument("snis_sample: D2 and spectrum dimensions differ");

  const double lead = dec.eigenvalue(0);
  Index live = 0;
  while (live < dec.stored() && dec.eigenvalues(live) > 1e-12 * lead) ++live;
  if (cfg.U_kappa > live) {
    throw ConfigurationError("snis_sample: U_kappa=" + std::to_string(cfg.U_kappa) +
                             " exceeds the number of positive empirical eigenvalues (" +
                             std::to_string(live) + ")");
  }

  const int L = cfg.L_kappa;
  const int U = cfg.U_kappa;
  const int levels = U - L + 1;
  const double log_levels = std::log(static_cast<double>(levels));
  std::vector<double> log_pk(static_cast<std::size_t>(U + 1), kNegInf);
  for (const auto& [k, lp] : prior_k_logweights(cfg)) log_pk[static_cast<std::size_t>(k)] = lp;

  MatrixXd basis = dec.eigenvectors.leftCols(U);
  const MatrixXd design = d2.X * basis;  // m x U
  const VectorXd& y = d2.y;
  const VectorXd lambda = dec.eigenvalues.head(U);

  const bool conditional = sn.proposal == ProposalMode::Conditional;
  MatrixXd gram;
  VectorXd design_t_y;
  std::vector<double> log_prior_norm(static_cast<std::size_t>(U + 1), 0.0);
  std::vector<CoordinateGaussian> fixed_cond(static_cast<std::size_t>(U + 1));
  if (conditional) {
    gram = design.transpose() * design;
    design_t_y = design.transpose() * y;
    for (int k = 1; k <= U; ++k) {
      log_prior_norm[static_cast<std::size_t>(k)] =
          0.5 * (std::numbers::pi * lambda.head(k).array()).log().sum();
    }
    if (sn.fixed_sigma2) {
      for (int k = L; k <= U; ++k) {
        fixed_cond[static_cast<std::size_t>(k)] =
            eigenspace_conditional(lambda.head(k), gram.topLeftCorner(k, k), design_t_y.head(k),
                                   y.squaredNorm(), y.size(), *sn.fixed_sigma2);
      }
    }
  }

  const auto total = static_cast<std::size_t>(sn.num_draws);
  std::vector<WeightedSample> samples(total);
  const std::size_t blocks = (total + kBlock - 1) / kBlock;

  parallel_for(blocks, sn.threads, [&](std::size_t b) {
    Rng rng = make_stream(sn.master_seed, b);
    std::uniform_int_distribution<int> level_dist(L, U);
    RejectionMonitor monitor("snis_sample");
    const std::size_t end = std::min(total, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      WeightedSample& s = samples[i];
      s.k = level_dist(rng);
      s.sigma2 = sn.fixed_sigma2 ? *sn.fixed_sigma2 : sample_inverse_gaussian(cfg.eta, cfg.xi, rng);
      const auto k = static_cast<std::size_t>(s.k);
      VectorXd u;
      double log_w = log_pk[k] + log_levels;
      if (!conditional) {
        u = sample_prior_coefficients(s.k, dec, cfg, rng, monitor);
        log_w += gaussian_loglik(y - design.leftCols(s.k) * u, s.sigma2);
      } else {
        CoordinateGaussian local;
        if (!sn.fixed_sigma2) {
          local = eigenspace_conditional(lambda.head(s.k), gram.topLeftCorner(s.k, s.k),
                                         design_t_y.head(s.k), y.squaredNorm(), y.size(), s.sigma2);
        }
        const CoordinateGaussian& g = sn.fixed_sigma2 ? fixed_cond[k] : local;
        for (;;) {
          u = g.sample(rng);
          const bool inside = u.norm() <= cfg.radius;
          monitor.record(inside);
          if (inside) break;
        }
        const double log_target_theta =
            -(u.array().square() / lambda.head(s.k).array()).sum() - log_prior_norm[k] +
            gaussian_loglik(y - design.leftCols(s.k) * u, s.sigma2);
        log_w += log_target_theta - g.log_density(u);
      }
      s.log_weight = log_w;
      s.coefficients = VectorXd::Zero(U);
      s.coefficients.head(s.k) = u;
    }
  });

  return WeightedPosterior::from_samples(std::move(basis), std::move(samples));
}

WeightedPosterior snis_sample(const SplitDataset& data, const PriorConfig& cfg, const SNISConfig& sn) {
  return snis_sample(data, empirical_spectrum(data.d1.X), cfg, sn);
}

VectorXd posterior_mean(const WeightedPosterior& wp) {
  VectorXd coef = VectorXd::Zero(wp.basis.cols());
  for (std::size_t i = 0; i < wp.samples.size(); ++i) {
    coef += wp.normalized_weights(static_cast<Index>(i)) * wp.samples[i].coefficients;
  }
  return wp.basis * coef;
}

std::vector<double> predictive_quantiles(const WeightedPosterior& wp, const VectorXd& x_new,
                                         const std::vector<double>& probs, Rng& rng, Index draws) {
  if (x_new.size() != wp.basis.rows()) throw std::invalid_argument("predictive_quantiles: dimension mismatch");
  if (draws < 1) throw std::invalid_argument("predictive_quantiles: draws must be >= 1");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("predictive_quantiles: probability outside [0, 1]");
  }
  const VectorXd projected = wp.basis.transpose() * x_new;
  std::vector<double> weights(wp.normalized_weights.data(),
                              wp.normalized_weights.data() + wp.normalized_weights.size());
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal;
  std::vector<double> values(static_cast<std::size_t>(draws));
  for (auto& v : values) {
    const auto& s = wp.samples[pick(rng)];
    v = projected.dot(s.coefficients) + std::sqrt(s.sigma2) * normal(rng);
  }
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double p : probs) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back(values[lo] + frac * (values[hi] - values[lo]));
  }
  return out;
}

PredictiveInterval predictive_interval(const WeightedPosterior& wp, const VectorXd& x_new, double level,
                                       Rng& rng, Index draws) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("predictive_interval: level must be in (0, 1)");
  const auto q = predictive_quantiles(wp, x_new, {(1.0 - level) / 2.0, (1.0 + level) / 2.0}, rng, draws);
  PredictiveInterval out{q[0], q[1], wp.low_ess_warning};
  if (!(out.hi > out.lo)) out.warning = true;
  return out;
}

}  // namespace specbayes
