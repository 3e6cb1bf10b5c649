#pragma once

#include <Eigen/Dense>

namespace specbayes {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Square matrix validated symmetric on construction:
/// max |S_ij - S_ji| <= 1e-12 * (1 + max |S|).
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(MatrixXd values);

  const MatrixXd& matrix() const { return values_; }
  Index dim() const { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  MatrixXd values_;
};

/// Eigenpairs of a symmetric PSD matrix, eigenvalues in descending order.
///
/// The decomposition may be thin: `eigenvectors` is dim x r with r <= dim and
/// every pair that is not stored has eigenvalue zero. Decompositions of
/// covariance matrices estimated from m < dim rows are kept thin (r <= m).
struct SpectralDecomposition {
  VectorXd eigenvalues;   // length r, descending
  MatrixXd eigenvectors;  // dim x r, orthonormal columns

  Index dim() const { return eigenvectors.rows(); }
  Index stored() const { return eigenvalues.size(); }
  /// Eigenvalue j (0-based); zero for pairs beyond the stored ones.
  double eigenvalue(Index j) const { return j < stored() ? eigenvalues(j) : 0.0; }
  double trace() const { return eigenvalues.sum(); }
  MatrixXd reconstruct() const;
  /// Sigma * x evaluated through the eigenpairs.
  VectorXd apply(const VectorXd& x) const;
  /// x' Sigma x.
  double quadratic_form(const VectorXd& x) const;
};

/// (1/m) sum_i (x_i - xbar)(x_i - xbar)' over the m rows.
SymmetricMatrix empirical_covariance(const MatrixXd& rows);

/// Full eigendecomposition. Ties keep the solver's index order, each
/// eigenvector's largest-magnitude entry is made positive and eigenvalues in
/// [-1e-10 * lambda_1, 0) are clamped to zero.
SpectralDecomposition spectral_decompose(const SymmetricMatrix& s);

/// Thin decomposition of empirical_covariance(rows) computed from an SVD of
/// the centered rows. Pairs with eigenvalue <= rank_tol * lambda_1 are dropped.
SpectralDecomposition empirical_spectrum(const MatrixXd& rows, double rank_tol = 1e-12);

struct Truncation {
  SymmetricMatrix head;  // sum_{j<=k} lambda_j v_j v_j'
  SymmetricMatrix tail;  // original - head
};

/// Rank-k split of the decomposed matrix; requires 1 <= k <= dim.
Truncation truncate(const SpectralDecomposition& dec, Index k);

/// Moore-Penrose pseudoinverse of the rank-k head. Eigenvalues at or below
/// tol * lambda_1 count as zero.
SymmetricMatrix pseudoinverse_truncated(const SpectralDecomposition& dec, Index k,
                                        double tol = 1e-12);

/// tr(S) / lambda_1. Throws DegenerateInputError when lambda_1 <= 0.
double effective_rank(const SymmetricMatrix& s);
double effective_rank(const SpectralDecomposition& dec);

/// Deterministic sign convention: largest-magnitude entry of each column
/// positive (first such entry on exact ties).
void normalize_signs(MatrixXd& vectors);

}  // namespace specbayes
