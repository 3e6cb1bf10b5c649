#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specbayes/bvm_approx.hpp"
#include "specbayes/errors.hpp"
#include "test_support.hpp"

using namespace specbayes;
using testing::gaussian_matrix;
using testing::gaussian_vector;
using testing::moments;
using testing::op_norm;
using testing::pinv;

namespace {

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Low-rank D1 spectrum and an independent D2, p > rows.
struct Problem {
  SpectralDecomposition dec;
  Dataset d2;
};

Problem make_problem(Index p, Index m1, Index m2, std::uint64_t seed) {
  Rng rng = make_stream(seed);
  Problem pr;
  const MatrixXd scale = VectorXd::LinSpaced(p, 3.0, 0.2).asDiagonal();
  pr.dec = empirical_spectrum(gaussian_matrix(m1, p, rng) * scale);
  pr.d2.X = gaussian_matrix(m2, p, rng) * scale;
  pr.d2.y = pr.d2.X * gaussian_vector(p, rng) + 0.3 * gaussian_vector(m2, rng);
  return pr;
}

// Dense Lambda and mu built directly from the defining formulas.
std::pair<MatrixXd, VectorXd> dense_oracle(const Problem& pr, int L, double sigma2) {
  const Index p = pr.dec.dim();
  MatrixXd prior = MatrixXd::Zero(p, p);
  for (int j = 0; j < L; ++j) {
    prior += pr.dec.eigenvectors.col(j) * pr.dec.eigenvectors.col(j).transpose() / pr.dec.eigenvalues(j);
  }
  const MatrixXd gram = pr.d2.X.transpose() * pr.d2.X;
  const MatrixXd lambda = prior + gram / (2.0 * sigma2);
  const VectorXd mni = pinv(pr.d2.X) * pr.d2.y;
  const VectorXd mu = pinv(lambda) * gram * mni / (2.0 * sigma2);
  return {lambda, mu};
}

}  // namespace

TEST_CASE("minimum-norm interpolator") {
  SUBCASE("wide full-row-rank design interpolates with least norm") {
    Rng rng = make_stream(1);
    const MatrixXd X = gaussian_matrix(5, 12, rng);
    const VectorXd y = gaussian_vector(5, rng);
    const VectorXd t = minimum_norm_interpolator(X, y);
    CHECK(max_abs(X * t - y) <= 1e-10);
    const VectorXd oracle = X.transpose() * (X * X.transpose()).inverse() * y;
    CHECK(max_abs(t - oracle) <= 1e-10);
  }
  SUBCASE("rank-deficient design matches the SVD pseudoinverse") {
    Rng rng = make_stream(2);
    MatrixXd X = gaussian_matrix(6, 9, rng);
    X.row(3) = X.row(0) * 2.0;
    X.row(5) = X.row(1) - X.row(2);
    const VectorXd y = gaussian_vector(6, rng);
    CHECK(max_abs(minimum_norm_interpolator(X, y) - pinv(X) * y) <= 1e-9);
  }
  SUBCASE("zero design") {
    CHECK(minimum_norm_interpolator(MatrixXd::Zero(3, 4), VectorXd::Ones(3)).isZero(0.0));
  }
  SUBCASE("tall design reduces to least squares") {
    MatrixXd X(3, 1);
    X << 1, 2, 3;
    VectorXd y(3);
    y << 1, 2, 2;
    CHECK(minimum_norm_interpolator(X, y)(0) == doctest::Approx(11.0 / 14.0));
  }
}

TEST_CASE("approximator matches the dense formulas") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto pr = make_problem(25, 10, 8, seed);
    for (int L : {1, 3, 9}) {
      for (double sigma2 : {0.5, 2.0}) {
        const auto appr = build_approximator(pr.dec, L, sigma2, pr.d2, 1e6);
        const auto [lambda, mu] = dense_oracle(pr, L, sigma2);
        const double scale = max_abs(lambda);
        CHECK(max_abs(appr.precision.reconstruct() - lambda) <= 1e-9 * scale);
        CHECK(max_abs(appr.mu - mu) <= 1e-8 * (1.0 + mu.norm()));
        CHECK(appr.rank() == static_cast<Index>(
                                 Eigen::FullPivLU<MatrixXd>(lambda).setThreshold(1e-10).rank()));
        CHECK(max_abs(appr.mni - pinv(pr.d2.X) * pr.d2.y) <= 1e-9);
      }
    }
  }
}

TEST_CASE("approximator with no data is the truncated prior") {
  Rng rng = make_stream(6);
  const auto dec = empirical_spectrum(gaussian_matrix(6, 10, rng));
  Dataset empty_like;
  empty_like.X = MatrixXd::Zero(2, 10);
  empty_like.y = VectorXd::Zero(2);
  const auto appr = build_approximator(dec, 2, 1.0, empty_like, 1e6);
  CHECK(appr.rank() == 2);
  CHECK(appr.mu.isZero(1e-12));
  CHECK(appr.precision.eigenvalues(0) == doctest::Approx(1.0 / dec.eigenvalues(1)));
  CHECK(appr.precision.eigenvalues(1) == doctest::Approx(1.0 / dec.eigenvalues(0)));
}

TEST_CASE("approximator draws") {
  const auto pr = make_problem(12, 5, 4, 7);
  const auto appr = build_approximator(pr.dec, 2, 1.0, pr.d2, 1e6);
  Rng rng = make_stream(8);
  const MatrixXd draws = sample_approximator(appr, 200000, rng);
  const auto [mean, cov] = moments(draws);
  const MatrixXd target = pinv(2.0 * appr.precision.reconstruct());
  CHECK(max_abs(mean - appr.mu) <= 0.02 * std::sqrt(target.diagonal().maxCoeff()) * 5.0);
  CHECK(op_norm(cov - target) <= 0.03 * op_norm(target));

  SUBCASE("draws stay in mu + range(Lambda)") {
    const MatrixXd& U = appr.precision.eigenvectors;
    for (Index i = 0; i < 50; ++i) {
      const VectorXd d = draws.row(i).transpose() - appr.mu;
      CHECK((d - U * (U.transpose() * d)).norm() <= 1e-9 * (1.0 + d.norm()));
      CHECK(std::isfinite(approx_logdensity_unnorm(appr, draws.row(i).transpose())));
    }
  }
  SUBCASE("selected coordinates reproduce the full draw") {
    Rng a = make_stream(9), b = make_stream(9);
    const MatrixXd full = sample_approximator(appr, 100, a);
    const MatrixXd part = sample_approximator_coordinates(appr, 100, {3, 0}, b);
    CHECK(max_abs(part.col(0) - full.col(3)) <= 1e-12);
    CHECK(max_abs(part.col(1) - full.col(0)) <= 1e-12);
  }
  SUBCASE("radius truncation") {
    auto small = appr;
    small.radius = appr.mu.norm() + 0.1;
    Rng r = make_stream(10);
    const MatrixXd t = sample_approximator(small, 500, r);
    CHECK(t.rowwise().norm().maxCoeff() <= small.radius + 1e-12);
  }
}

TEST_CASE("approximator log density") {
  const auto pr = make_problem(10, 4, 3, 11);
  const auto appr = build_approximator(pr.dec, 2, 1.0, pr.d2, 1e6);
  CHECK(approx_logdensity_unnorm(appr, appr.mu) == doctest::Approx(0.0));
  const VectorXd e = appr.precision.eigenvectors.col(0);
  CHECK(approx_logdensity_unnorm(appr, appr.mu + e) == doctest::Approx(-appr.precision.eigenvalues(0)));

  VectorXd off = appr.mu;
  const MatrixXd& U = appr.precision.eigenvectors;
  Rng rng = make_stream(12);
  VectorXd g = gaussian_vector(10, rng);
  g -= U * (U.transpose() * g);
  if (g.norm() > 1e-6) CHECK(approx_logdensity_unnorm(appr, off + g) == -INFINITY);

  auto tight = appr;
  tight.radius = 1e-3;
  CHECK(approx_logdensity_unnorm(tight, appr.mu + 5.0 * e) == -INFINITY);
}

TEST_CASE("eigen-coordinate conditional") {
  Rng rng = make_stream(13);
  const MatrixXd A = gaussian_matrix(6, 3, rng);
  const VectorXd y = gaussian_vector(6, rng);
  VectorXd lam(3);
  lam << 3.0, 1.0, 0.25;
  const double sigma2 = 0.7;
  const auto g = eigenspace_conditional(lam, A, y, sigma2);

  SUBCASE("precision and mean from the definition") {
    MatrixXd P = A.transpose() * A / (2.0 * sigma2);
    P.diagonal() += lam.cwiseInverse();
    CHECK(max_abs(g.precision - P) <= 1e-12);
    CHECK(max_abs(g.mean - P.inverse() * A.transpose() * y / (2.0 * sigma2)) <= 1e-12);
  }
  SUBCASE("evidence is the Gaussian marginal of y") {
    // u ~ N(0, diag(lam) / 2) untruncated, y | u ~ N(A u, sigma2 I)
    const MatrixXd C = sigma2 * MatrixXd::Identity(6, 6) + A * (lam / 2.0).asDiagonal() * A.transpose();
    const Eigen::LLT<MatrixXd> llt(C);
    const double log_det = 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    const double oracle = -0.5 * (6 * std::log(2.0 * std::numbers::pi) + log_det + y.dot(llt.solve(y)));
    CHECK(g.log_evidence == doctest::Approx(oracle).epsilon(1e-10));
  }
  SUBCASE("log density is normalized (one dimension)") {
    VectorXd l1(1);
    l1 << 2.0;
    const auto g1 = eigenspace_conditional(l1, A.leftCols(1), y, sigma2);
    const double sd = std::sqrt(0.5 / g1.precision(0, 0));
    double total = 0.0;
    const int steps = 20000;
    const double lo = g1.mean(0) - 12 * sd, h = 24 * sd / steps;
    for (int i = 0; i <= steps; ++i) {
      VectorXd u(1);
      u << lo + i * h;
      total += (i == 0 || i == steps ? 0.5 : 1.0) * std::exp(g1.log_density(u));
    }
    CHECK(total * h == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("draws have covariance (2P)^{-1}") {
    Rng r = make_stream(14);
    MatrixXd draws(100000, 3);
    for (Index i = 0; i < draws.rows(); ++i) draws.row(i) = g.sample(r).transpose();
    const auto [mean, cov] = moments(draws);
    const MatrixXd target = (2.0 * g.precision).inverse();
    CHECK(op_norm(cov - target) <= 0.03 * op_norm(target));
    CHECK((mean - g.mean).norm() <= 0.02);
  }
  SUBCASE("shape and positivity checks") {
    CHECK_THROWS_AS(eigenspace_conditional(lam.head(2), A, y, sigma2), std::invalid_argument);
    VectorXd bad = lam;
    bad(2) = 0.0;
    CHECK_THROWS_AS(eigenspace_conditional(bad, A, y, sigma2), std::invalid_argument);
    CHECK_THROWS_AS(eigenspace_conditional(lam, A, y, 0.0), std::invalid_argument);
  }
}

TEST_CASE("projected design reproduces the exact level-L conditional") {
  const auto pr = make_problem(20, 8, 6, 15);
  const int L = 3;
  const double sigma2 = 1.3;
  const MatrixXd V = pr.dec.eigenvectors.leftCols(L);
  Dataset projected = pr.d2;
  projected.X = pr.d2.X * V * V.transpose();
  const auto appr = build_approximator(pr.dec, L, sigma2, projected, 1e6);
  const auto cond = eigenspace_conditional(pr.dec.eigenvalues.head(L), pr.d2.X * V, pr.d2.y, sigma2);
  CHECK(max_abs(appr.mu - V * cond.mean) <= 1e-9);
  const MatrixXd cov_appr = pinv(2.0 * appr.precision.reconstruct());
  const MatrixXd cov_cond = V * (2.0 * cond.precision).inverse() * V.transpose();
  CHECK(max_abs(cov_appr - cov_cond) <= 1e-9 * (1.0 + max_abs(cov_cond)));
}

TEST_CASE("histogram total variation") {
  Rng rng = make_stream(16);
  const MatrixXd a = gaussian_matrix(200000, 2, rng);
  MatrixXd b = gaussian_matrix(200000, 2, rng);

  SUBCASE("a set against itself") {
    CHECK(estimate_tv(WeightedPoints::uniform(a), WeightedPoints::uniform(a), {0, 1}) == 0.0);
  }
  SUBCASE("two draws from one law") {
    CHECK(estimate_tv(WeightedPoints::uniform(a), WeightedPoints::uniform(b), {0, 1}) <= 0.03);
  }
  SUBCASE("unit mean shift: TV = 2 Phi(1/2) - 1") {
    b.col(0).array() += 1.0;
    const double exact = std::erf(0.5 / std::numbers::sqrt2);
    CHECK(estimate_tv(WeightedPoints::uniform(a), WeightedPoints::uniform(b), {0, 1}) ==
          doctest::Approx(exact).epsilon(0.08));
  }
  SUBCASE("disjoint supports") {
    b.col(1).array() += 100.0;
    CHECK(estimate_tv(WeightedPoints::uniform(a), WeightedPoints::uniform(b), {0, 1}) == doctest::Approx(1.0));
  }
  SUBCASE("weights reproduce a duplicated sample") {
    MatrixXd pts(3, 2);
    pts << 0, 0, 1, 1, 2, 2;
    VectorXd w(3);
    w << 2, 1, 1;
    MatrixXd dup(4, 2);
    dup << 0, 0, 0, 0, 1, 1, 2, 2;
    CHECK(estimate_tv({pts, w}, WeightedPoints::uniform(dup), {0, 1}, 5) == doctest::Approx(0.0));
    CHECK(estimate_tv({pts, 3.0 * w}, WeightedPoints::uniform(dup), {0, 1}, 5) == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed grid") {
    // two cells populated: p = (1, 0), q = (1/2, 1/2)
    MatrixXd p(2, 2), q(2, 2);
    p << 0, 0, 0, 0;
    q << 0, 0, 1, 1;
    CHECK(estimate_tv(WeightedPoints::uniform(p), WeightedPoints::uniform(q), {0, 1}, 2) == doctest::Approx(0.5));
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(estimate_tv(WeightedPoints::uniform(a), WeightedPoints::uniform(b), {0, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_tv(WeightedPoints::uniform(a), WeightedPoints::uniform(b), {0, 1}, 1),
                    std::invalid_argument);
  }
}
