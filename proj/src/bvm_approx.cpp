#include "specbayes/bvm_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "specbayes/priors.hpp"

namespace specbayes {

VectorXd minimum_norm_interpolator(const MatrixXd& X2, const VectorXd& y2) {
  if (X2.rows() < 1) throw std::invalid_argument("minimum_norm_interpolator: no rows");
  if (X2.rows() != y2.size()) throw std::invalid_argument("minimum_norm_interpolator: row mismatch");
  if (X2.cwiseAbs().maxCoeff() == 0.0) return VectorXd::Zero(X2.cols());
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(X2);
  return cod.solve(y2);
}

namespace {

// Orthonormal basis (columns) of the range of `m`, keeping singular values
// above `cutoff`. The cutoff must come from the scale of the matrix `m` was
// derived from: a residual that is pure rounding noise has no range.
MatrixXd range_basis(const MatrixXd& m, double cutoff) {
  if (m.cols() == 0 || m.rows() == 0) return MatrixXd(m.rows(), 0);
  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
  const VectorXd& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

TruncatedGaussianApprox build_approximator(const SpectralDecomposition& dec, int L_kappa,
                                           double sigma2, const Dataset& d2, double R) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("build_approximator: sigma2 must be positive");
  if (L_kappa < 1) throw std::invalid_argument("build_approximator: L_kappa must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("build_approximator: R must be positive");
  const Index p = dec.dim();
  const MatrixXd& X2 = d2.X;
  if (X2.cols() != p) throw std::invalid_argument("build_approximator: design dimension mismatch");

  // prior directions with a nonzero eigenvalue among the first L
  const Index kept = std::min<Index>(L_kappa, dec.stored());
  const double lead = dec.eigenvalue(0);
  Index live = 0;
  while (live < kept && dec.eigenvalues(live) > 1e-12 * lead) ++live;
  const MatrixXd prior_vecs = dec.eigenvectors.leftCols(live);
  const VectorXd prior_prec = dec.eigenvalues.head(live).cwiseInverse();

  // joint basis [V_L, orth((I - V_L V_L') X2')]
  const MatrixXd rows_t = X2.transpose();
  const MatrixXd residual = rows_t - prior_vecs * (prior_vecs.transpose() * rows_t);
  MatrixXd extra = range_basis(residual, 1e-10 * rows_t.norm());
  MatrixXd basis(p, live + extra.cols());
  basis << prior_vecs, extra;
  const Index q = basis.cols();

  const MatrixXd design_b = X2 * basis;  // m x q
  MatrixXd lambda_b = design_b.transpose() * design_b / (2.0 * sigma2);
  lambda_b.topLeftCorner(live, live).diagonal() += prior_prec;
  lambda_b = 0.5 * (lambda_b + lambda_b.transpose()).eval();

  TruncatedGaussianApprox out;
  out.radius = R;
  out.sigma2 = sigma2;
  out.mni = minimum_norm_interpolator(X2, d2.y);

  if (q == 0) {
    out.precision.eigenvalues.resize(0);
    out.precision.eigenvectors.resize(p, 0);
    out.mu = VectorXd::Zero(p);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(lambda_b);
  const VectorXd& raw = eig.eigenvalues();  // ascending
  const double top = raw(q - 1);
  Index rank = 0;
  for (Index j = q - 1; j >= 0 && raw(j) > 1e-12 * top; --j) ++rank;
  out.precision.eigenvalues = raw.tail(rank).reverse();
  out.precision.eigenvectors = basis * eig.eigenvectors().rightCols(rank).rowwise().reverse();
  normalize_signs(out.precision.eigenvectors);

  const VectorXd rhs = X2.transpose() * (X2 * out.mni) / (2.0 * sigma2);
  const VectorXd coef = out.precision.eigenvectors.transpose() * rhs;
  out.mu = out.precision.eigenvectors * coef.cwiseQuotient(out.precision.eigenvalues);
  return out;
}

double CoordinateGaussian::log_density(const VectorXd& u) const {
  const VectorXd d = u - mean;
  const double k = static_cast<double>(mean.size());
  const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  return -0.5 * k * std::log(std::numbers::pi) + 0.5 * log_det - d.dot(precision * d);
}

VectorXd CoordinateGaussian::sample(Rng& rng) const {
  std::normal_distribution<double> normal;
  VectorXd z(mean.size());
  for (Index j = 0; j < z.size(); ++j) z(j) = normal(rng) / std::numbers::sqrt2;
  // cov (2P)^{-1}: u = mean + L^{-T} z / sqrt(2) with P = L L'
  return mean + chol.matrixU().solve(z);
}

CoordinateGaussian eigenspace_conditional(const VectorXd& prior_eigenvalues, const MatrixXd& gram,
                                          const VectorXd& design_t_y, double y_sq_norm, Index rows,
                                          double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("eigenspace_conditional: sigma2 must be positive");
  if (gram.rows() != prior_eigenvalues.size() || gram.cols() != prior_eigenvalues.size() ||
      design_t_y.size() != prior_eigenvalues.size()) {
    throw std::invalid_argument("eigenspace_conditional: shape mismatch");
  }
  if (!(prior_eigenvalues.array() > 0.0).all()) {
    throw std::invalid_argument("eigenspace_conditional: prior eigenvalues must be positive");
  }
  CoordinateGaussian g;
  g.precision = gram / (2.0 * sigma2);
  g.precision.diagonal() += prior_eigenvalues.cwiseInverse();
  g.chol.compute(g.precision);
  if (g.chol.info() != Eigen::Success) {
    throw std::runtime_error("eigenspace_conditional: precision is not positive definite");
  }
  const VectorXd b = design_t_y / (2.0 * sigma2);
  g.mean = g.chol.solve(b);
  const double log_det = 2.0 * g.chol.matrixLLT().diagonal().array().log().sum();
  g.log_evidence = -0.5 * static_cast<double>(rows) * std::log(2.0 * std::numbers::pi * sigma2) -
                   y_sq_norm / (2.0 * sigma2) + g.mean.dot(b) - 0.5 * log_det -
                   0.5 * prior_eigenvalues.array().log().sum();
  return g;
}

CoordinateGaussian eigenspace_conditional(const VectorXd& prior_eigenvalues, const MatrixXd& design,
                                          const VectorXd& y, double sigma2) {
  if (design.cols() != prior_eigenvalues.size() || design.rows() != y.size()) {
    throw std::invalid_argument("eigenspace_conditional: shape mismatch");
  }
  return eigenspace_conditional(prior_eigenvalues, design.transpose() * design, design.transpose() * y,
                                y.squaredNorm(), design.rows(), sigma2);
}

namespace {

// Coefficient draws w (rank-dim) with theta = mu + U w inside the R-ball.
MatrixXd draw_coefficients(const TruncatedGaussianApprox& appr, Index m, Rng& rng) {
  const Index r = appr.rank();
  if (r < 1) throw std::invalid_argument("sample_approximator: rank(Lambda) must be >= 1");
  const VectorXd sd = (2.0 * appr.precision.eigenvalues).cwiseInverse().cwiseSqrt();
  const VectorXd a = appr.precision.eigenvectors.transpose() * appr.mu;
  const double off = std::max(0.0, appr.mu.squaredNorm() - a.squaredNorm());
  const double r2 = appr.radius * appr.radius;
  RejectionMonitor monitor("sample_approximator");
  std::normal_distribution<double> normal;
  MatrixXd w(m, r);
  VectorXd draw(r);
  for (Index i = 0; i < m; ++i) {
    for (;;) {
      for (Index j = 0; j < r; ++j) draw(j) = sd(j) * normal(rng);
      const bool inside = off + (a + draw).squaredNorm() <= r2;
      monitor.record(inside);
      if (inside) break;
    }
    w.row(i) = draw.transpose();
  }
  return w;
}

}  // namespace

MatrixXd sample_approximator(const TruncatedGaussianApprox& appr, Index m, Rng& rng) {
  const MatrixXd w = draw_coefficients(appr, m, rng);
  MatrixXd out = w * appr.precision.eigenvectors.transpose();
  out.rowwise() += appr.mu.transpose();
  return out;
}

MatrixXd sample_approximator_coordinates(const TruncatedGaussianApprox& appr, Index m,
                                         const std::vector<Index>& coords, Rng& rng) {
  const MatrixXd w = draw_coefficients(appr, m, rng);
  MatrixXd rows(static_cast<Index>(coords.size()), appr.rank());
  VectorXd offset(static_cast<Index>(coords.size()));
  for (std::size_t c = 0; c < coords.size(); ++c) {
    if (coords[c] < 0 || coords[c] >= appr.dim()) {
      throw std::invalid_argument("sample_approximator_coordinates: coordinate out of range");
    }
    rows.row(static_cast<Index>(c)) = appr.precision.eigenvectors.row(coords[c]);
    offset(static_cast<Index>(c)) = appr.mu(coords[c]);
  }
  MatrixXd out = w * rows.transpose();
  out.rowwise() += offset.transpose();
  return out;
}

double approx_logdensity_unnorm(const TruncatedGaussianApprox& appr, const VectorXd& theta) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (theta.size() != appr.dim()) throw std::invalid_argument("approx_logdensity_unnorm: dimension mismatch");
  if (theta.norm() > appr.radius) return kNegInf;
  const VectorXd d = theta - appr.mu;
  const VectorXd c = appr.precision.eigenvectors.transpose() * d;
  const double off = (d - appr.precision.eigenvectors * c).norm();
  if (off > 1e-8 * (d.norm() + appr.mu.norm())) return kNegInf;
  return -(appr.precision.eigenvalues.array() * c.array().square()).sum();
}

WeightedPoints WeightedPoints::uniform(MatrixXd pts) {
  WeightedPoints w;
  w.weights = VectorXd::Ones(pts.rows());
  w.points = std::move(pts);
  return w;
}

double estimate_tv(const WeightedPoints& a, const WeightedPoints& b, std::array<Index, 2> coords,
                   int bins) {
  if (a.points.rows() == 0 || b.points.rows() == 0) throw std::invalid_argument("estimate_tv: empty sample set");
  if (bins < 2) throw std::invalid_argument("estimate_tv: bins must be >= 2");
  if (a.weights.size() != a.points.rows() || b.weights.size() != b.points.rows()) {
    throw std::invalid_argument("estimate_tv: weight count does not match point count");
  }
  for (Index c : coords) {
    if (c < 0 || c >= a.points.cols() || c >= b.points.cols()) {
      throw std::invalid_argument("estimate_tv: coordinate out of range");
    }
  }
  std::array<double, 2> lo{}, hi{};
  for (int ax = 0; ax < 2; ++ax) {
    const Index c = coords[static_cast<std::size_t>(ax)];
    lo[ax] = std::min(a.points.col(c).minCoeff(), b.points.col(c).minCoeff());
    hi[ax] = std::max(a.points.col(c).maxCoeff(), b.points.col(c).maxCoeff());
  }
  auto cell = [&](const MatrixXd& pts, Index i) {
    Index idx[2];
    for (int ax = 0; ax < 2; ++ax) {
      const double width = hi[ax] - lo[ax];
      const double x = pts(i, coords[static_cast<std::size_t>(ax)]);
      Index bin = 0;
      if (width > 0.0) {
        bin = static_cast<Index>(std::floor((x - lo[ax]) / width * bins));
        bin = std::clamp<Index>(bin, 0, bins - 1);
      }
      idx[ax] = bin;
    }
    return idx[0] * bins + idx[1];
  };
  VectorXd hist_a = VectorXd::Zero(static_cast<Index>(bins) * bins);
  VectorXd hist_b = hist_a;
  for (Index i = 0; i < a.points.rows(); ++i) hist_a(cell(a.points, i)) += a.weights(i);
  for (Index i = 0; i < b.points.rows(); ++i) hist_b(cell(b.points, i)) += b.weights(i);
  const double sa = hist_a.sum();
  const double sb = hist_b.sum();
  if (!(sa > 0.0) || !(sb > 0.0)) throw std::invalid_argument("estimate_tv: weights sum to zero");
  return std::clamp(0.5 * (hist_a / sa - hist_b / sb).cwiseAbs().sum(), 0.0, 1.0);
}

}  // namespace specbayes
