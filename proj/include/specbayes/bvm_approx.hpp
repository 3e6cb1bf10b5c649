#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>

#include "specbayes/data_gen.hpp"
#include "specbayes/rng.hpp"
#include "specbayes/spectral_core.hpp"

namespace specbayes {

/// Truncated Gaussian approximator of the fixed-sigma^2 posterior:
///   density ∝ exp(-(theta - mu)' Lambda (theta - mu)) on
///   {||theta|| <= R} ∩ (mu + range(Lambda)),
///   Lambda = Sigma_hat^dagger_{1:L} + X2'X2 / (2 sigma^2),
///   mu     = Lambda^dagger X2'X2 theta_bar / (2 sigma^2).
/// `precision` holds Lambda in thin spectral form (rank r <= L + |D2|).
struct TruncatedGaussianApprox {
  VectorXd mu;
  SpectralDecomposition precision;
  double radius = 0.0;
  double sigma2 = 0.0;
  VectorXd mni;  // theta_bar

  Index dim() const { return mu.size(); }
  Index rank() const { return precision.stored(); }
};

/// (X'X)^dagger X'y: the least-norm least-squares solution.
VectorXd minimum_norm_interpolator(const MatrixXd& X2, const VectorXd& y2);

TruncatedGaussianApprox build_approximator(const SpectralDecomposition& dec, int L_kappa,
                                           double sigma2, const Dataset& d2, double R);

/// Gaussian over eigen-coordinates u of span{v_1..v_k}:
///   exp(-u' diag(1/lambda) u) * prod_i N(y_i; a_i' u, sigma^2)
///   ∝ exp(-(u - mean)' precision (u - mean)),
///   precision = diag(1/lambda) + A'A / (2 sigma^2).
/// This is the span-restricted conditional posterior of theta given
/// (k, sigma^2); it coincides with build_approximator applied to the design
/// projected onto span{v_1..v_k}.
struct CoordinateGaussian {
  VectorXd mean;
  MatrixXd precision;
  Eigen::LLT<MatrixXd> chol;
  /// log of  ∫ exp(-u' D^{-1} u) prod N(y_i; a_i'u, sigma^2) du
  ///        / ∫ exp(-u' D^{-1} u) du
  /// i.e. the marginal likelihood of y under the (untruncated) prior.
  double log_evidence = 0.0;

  /// log of the normalized density at u (untruncated).
  double log_density(const VectorXd& u) const;
  VectorXd sample(Rng& rng) const;
};

CoordinateGaussian eigenspace_conditional(const VectorXd& prior_eigenvalues, const MatrixXd& design,
                                          const VectorXd& y, double sigma2);

/// Same, from the sufficient statistics A'A, A'y, y'y and the row count.
CoordinateGaussian eigenspace_conditional(const VectorXd& prior_eigenvalues, const MatrixXd& gram,
                                          const VectorXd& design_t_y, double y_sq_norm, Index rows,
                                          double sigma2);

/// m draws (rows), by rejection onto the R-ball. null(Lambda) carries no mass.
MatrixXd sample_approximator(const TruncatedGaussianApprox& appr, Index m, Rng& rng);

/// Same law as sample_approximator, returning only the listed coordinates.
MatrixXd sample_approximator_coordinates(const TruncatedGaussianApprox& appr, Index m,
                                         const std::vector<Index>& coords, Rng& rng);

double approx_logdensity_unnorm(const TruncatedGaussianApprox& appr, const VectorXd& theta);

/// Weighted point cloud; rows are points. Weights need not be normalized.
struct WeightedPoints {
  MatrixXd points;
  VectorXd weights;

  static WeightedPoints uniform(MatrixXd pts);
};

/// Histogram total variation on two coordinates: both sets are binned on a
/// common bins x bins grid spanning their joint bounding box and
/// 1/2 sum |p_cell - q_cell| is returned.
double estimate_tv(const WeightedPoints& a, const WeightedPoints& b, std::array<Index, 2> coords,
                   int bins = 30);

}  // namespace specbayes
