#include "specbayes/spectral_core.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "specbayes/errors.hpp"

namespace specbayes {

SymmetricMatrix::SymmetricMatrix(MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw std::invalid_argument("SymmetricMatrix: matrix is not square");
  }
  if (values_.size() == 0) return;
  const double scale = values_.cwiseAbs().maxCoeff();
  const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * (1.0 + scale))) {
    throw std::invalid_argument("SymmetricMatrix: asymmetry " + std::to_string(asym) +
                                " exceeds tolerance");
  }
}

MatrixXd SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

VectorXd SpectralDecomposition::apply(const VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("SpectralDecomposition::apply: dimension mismatch");
  const VectorXd coef = eigenvectors.transpose() * x;
  return eigenvectors * eigenvalues.cwiseProduct(coef);
}

double SpectralDecomposition::quadratic_form(const VectorXd& x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("SpectralDecomposition::quadratic_form: dimension mismatch");
  }
  const VectorXd coef = eigenvectors.transpose() * x;
  return (eigenvalues.array() * coef.array().square()).sum();
}

SymmetricMatrix empirical_covariance(const MatrixXd& rows) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw std::invalid_argument("empirical_covariance: empty input");
  }
  const VectorXd mean = rows.colwise().mean().transpose();
  const MatrixXd centered = rows.rowwise() - mean.transpose();
  MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(rows.rows());
  // exact symmetry; the product is symmetric only up to rounding
  cov = 0.5 * (cov + cov.transpose()).eval();
  return SymmetricMatrix(std::move(cov));
}

void normalize_signs(MatrixXd& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors.rows() > 0 && vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

namespace {

// Descending order; equal eigenvalues keep ascending solver index.
std::vector<Index> descending_order(const VectorXd& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });
  return order;
}

void check_rank(const SpectralDecomposition& dec, Index k, const char* who) {
  if (k < 1 || k > dec.dim()) {
    throw std::invalid_argument(std::string(who) + ": k=" + std::to_string(k) +
                                " outside [1, " + std::to_string(dec.dim()) + "]");
  }
}

}  // namespace

SpectralDecomposition spectral_decompose(const SymmetricMatrix& s) {
  const Index p = s.dim();
  SpectralDecomposition out;
  if (p == 0) return out;
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(s.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_decompose: eigensolver did not converge");
  }
  const VectorXd& raw_values = solver.eigenvalues();
  const auto order = descending_order(raw_values);
  out.eigenvalues.resize(p);
  out.eigenvectors.resize(p, p);
  for (Index j = 0; j < p; ++j) {
    out.eigenvalues(j) = raw_values(order[static_cast<std::size_t>(j)]);
    out.eigenvectors.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  const double lead = std::max(out.eigenvalues(0), 0.0);
  for (Index j = 0; j < p; ++j) {
    double& v = out.eigenvalues(j);
    if (v < 0.0 && v >= -1e-10 * lead) v = 0.0;
  }
  normalize_signs(out.eigenvectors);
  return out;
}

SpectralDecomposition empirical_spectrum(const MatrixXd& rows, double rank_tol) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw std::invalid_argument("empirical_spectrum: empty input");
  }
  const Index m = rows.rows();
  const Index p = rows.cols();
  const VectorXd mean = rows.colwise().mean().transpose();
  const MatrixXd centered = rows.rowwise() - mean.transpose();

  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  const VectorXd values = svd.singularValues().array().square() / static_cast<double>(m);
  const double lead = values.size() > 0 ? values(0) : 0.0;
  Index keep = 0;
  while (keep < values.size() && lead > 0.0 && values(keep) > rank_tol * lead) ++keep;

  SpectralDecomposition out;
  out.eigenvalues = values.head(keep);
  out.eigenvectors = svd.matrixV().leftCols(keep);
  if (keep == 0) out.eigenvectors.resize(p, 0);
  normalize_signs(out.eigenvectors);
  return out;
}

Truncation truncate(const SpectralDecomposition& dec, Index k) {
  check_rank(dec, k, "truncate");
  const Index kept = std::min(k, dec.stored());
  const auto head_vecs = dec.eigenvectors.leftCols(kept);
  const auto tail_vecs = dec.eigenvectors.rightCols(dec.stored() - kept);
  MatrixXd head = head_vecs * dec.eigenvalues.head(kept).asDiagonal() * head_vecs.transpose();
  MatrixXd tail = tail_vecs * dec.eigenvalues.tail(dec.stored() - kept).asDiagonal() *
                  tail_vecs.transpose();
  head = 0.5 * (head + head.transpose()).eval();
  tail = 0.5 * (tail + tail.transpose()).eval();
  return Truncation{SymmetricMatrix(std::move(head)), SymmetricMatrix(std::move(tail))};
}

SymmetricMatrix pseudoinverse_truncated(const SpectralDecomposition& dec, Index k, double tol) {
  check_rank(dec, k, "pseudoinverse_truncated");
  if (tol < 0.0) throw std::invalid_argument("pseudoinverse_truncated: tol < 0");
  const Index kept = std::min(k, dec.stored());
  const double lead = dec.eigenvalue(0);
  Index used = 0;
  while (used < kept && dec.eigenvalues(used) > tol * lead && dec.eigenvalues(used) > 0.0) ++used;
  const auto vecs = dec.eigenvectors.leftCols(used);
  MatrixXd inv = vecs * dec.eigenvalues.head(used).cwiseInverse().asDiagonal() * vecs.transpose();
  inv = 0.5 * (inv + inv.transpose()).eval();
  return SymmetricMatrix(std::move(inv));
}

double effective_rank(const SpectralDecomposition& dec) {
  const double lead = dec.eigenvalue(0);
  if (!(lead > 0.0)) throw DegenerateInputError("effective_rank: leading eigenvalue is zero");
  return dec.trace() / lead;
}

double effective_rank(const SymmetricMatrix& s) {
  if (s.dim() == 0) throw DegenerateInputError("effective_rank: empty matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(s.matrix(), Eigen::EigenvaluesOnly);
  const double lead = solver.eigenvalues().maxCoeff();
  if (!(lead > 0.0)) throw DegenerateInputError("effective_rank: leading eigenvalue is zero");
  return s.matrix().trace() / lead;
}

}  // namespace specbayes
