#include "specbayes/data_gen.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

#include "specbayes/rng.hpp"

namespace specbayes {

VectorXd EigenSchedule::eigenvalues(Index p, Index n) const {
  if (p < 1) throw std::invalid_argument("EigenSchedule: p must be positive");
  if (n < 1) throw std::invalid_argument("EigenSchedule: n must be positive");
  VectorXd out(p);
  const double nd = static_cast<double>(n);
  const double floor_value =
      floor ? nd * std::exp(-std::sqrt(nd)) / static_cast<double>(p) : 0.0;
  for (Index j = 1; j <= p; ++j) {
    const double jd = static_cast<double>(j);
    switch (kind) {
      case ScheduleKind::ExponentialFloor:
        out(j - 1) = scale * std::exp(-rate * jd) + floor_value;
        break;
      case ScheduleKind::Polynomial:
        out(j - 1) = scale * std::pow(jd, -rate) + floor_value;
        break;
      case ScheduleKind::Identity:
        out(j - 1) = 1.0;
        break;
    }
  }
  return out;
}

SpectralDecomposition build_covariance(const EigenSchedule& schedule, Index p, Index n, Basis basis,
                                       std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("build_covariance: p must be positive");
  SpectralDecomposition out;
  out.eigenvalues = schedule.eigenvalues(p, n);
  if (basis == Basis::Diagonal) {
    out.eigenvectors = MatrixXd::Identity(p, p);
    return out;
  }
  Rng rng = make_stream(seed, 0xC0FFEEu);
  std::normal_distribution<double> normal;
  MatrixXd gauss(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) gauss(i, j) = normal(rng);
  Eigen::HouseholderQR<MatrixXd> qr(gauss);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(p, p);
  const MatrixXd& r = qr.matrixQR();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  normalize_signs(q);
  out.eigenvectors = std::move(q);
  return out;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::I: return "i";
    case Scenario::II: return "ii";
    case Scenario::III: return "iii";
    case Scenario::IV: return "iv";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "i") return Scenario::I;
  if (s == "ii") return Scenario::II;
  if (s == "iii") return Scenario::III;
  if (s == "iv") return Scenario::IV;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected i, ii, iii, iv)");
}

std::string to_string(CovariateLaw law) {
  switch (law) {
    case CovariateLaw::Gaussian: return "gaussian";
    case CovariateLaw::Laplace: return "laplace";
    case CovariateLaw::IdentityGaussian: return "identity_gaussian";
  }
  return "?";
}

ScenarioSpec ScenarioSpec::make(Scenario id, Index n) {
  ScenarioSpec spec;
  spec.id = id;
  spec.n = n;
  switch (id) {
    case Scenario::I:
    case Scenario::III: spec.law = CovariateLaw::Gaussian; break;
    case Scenario::II: spec.law = CovariateLaw::Laplace; break;
    case Scenario::IV: spec.law = CovariateLaw::IdentityGaussian; break;
  }
  return spec;
}

Index dimension_for(Index n) {
  if (n < 1) throw std::invalid_argument("dimension_for: n must be positive");
  const __int128 target = static_cast<__int128>(n) * n * n * n;
  auto p = static_cast<Index>(std::ceil(std::pow(static_cast<long double>(n), 4.0L / 3.0L)));
  auto cube = [](Index v) { return static_cast<__int128>(v) * v * v; };
  while (p > 1 && cube(p - 1) >= target) --p;
  while (cube(p) < target) ++p;
  return p;
}

Index ScenarioSpec::p() const { return dimension_for(n); }

EigenSchedule ScenarioSpec::schedule() const {
  return id == Scenario::IV ? EigenSchedule::identity() : EigenSchedule::exponential_floor();
}

void ScenarioSpec::validate() const {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("ScenarioSpec: n must be even and >= 2");
  if (!(theta_variance > 0.0)) throw std::invalid_argument("ScenarioSpec: theta_variance must be > 0");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("ScenarioSpec: noise_sd must be >= 0");
  if (!(sparse_fraction > 0.0 && sparse_fraction <= 1.0)) {
    throw std::invalid_argument("ScenarioSpec: sparse_fraction must lie in (0, 1]");
  }
}

VectorXd sample_theta_star(const ScenarioSpec& spec, std::uint64_t seed) {
  if (spec.theta_variance < 0.0) throw std::invalid_argument("sample_theta_star: negative variance");
  const Index p = spec.p();
  VectorXd theta = VectorXd::Zero(p);
  if (spec.theta_variance == 0.0) return theta;
  Rng rng = make_stream(seed, 0x7E7Au);
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.theta_variance));
  for (Index j = 0; j < p; ++j) theta(j) = normal(rng);
  if (spec.id == Scenario::III) {
    const auto p1 = static_cast<Index>(std::ceil(static_cast<double>(p) * spec.sparse_fraction));
    theta.tail(p - std::min(p1, p)).setZero();
  }
  return theta;
}

Dataset sample_dataset(const ScenarioSpec& spec, const SpectralDecomposition& cov,
                       const VectorXd& theta_star, std::uint64_t seed) {
  const Index p = cov.dim();
  if (theta_star.size() != p) {
    throw std::invalid_argument("sample_dataset: theta_star has length " +
                                std::to_string(theta_star.size()) + ", covariance dimension " +
                                std::to_string(p));
  }
  const Index n = spec.n;
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be positive");
  const Index r = cov.stored();

  Rng rng = make_stream(seed, 0xDA7Au);
  std::normal_distribution<double> normal;
  MatrixXd z(n, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j) z(i, j) = normal(rng);
  if (spec.law == CovariateLaw::Laplace) {
    std::exponential_distribution<double> expo(1.0);
    for (Index i = 0; i < n; ++i) z.row(i) *= std::sqrt(expo(rng));
  }
  z *= cov.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Dataset d;
  if (r == p && cov.eigenvectors.isIdentity(0.0)) {
    d.X = std::move(z);
  } else {
    d.X = z * cov.eigenvectors.transpose();
  }
  d.y = d.X * theta_star;
  for (Index i = 0; i < n; ++i) d.y(i) += spec.noise_sd * normal(rng);
  d.provenance = {{"source", "synthetic"},
                  {"scenario", to_string(spec.id)},
                  {"law", to_string(spec.law)},
                  {"n", n},
                  {"p", p},
                  {"seed", seed},
                  {"theta_variance", spec.theta_variance},
                  {"noise_sd", spec.noise_sd}};
  return d;
}

SplitDataset split_dataset(const Dataset& d) {
  const Index n = d.rows();
  if (d.y.size() != n) throw std::invalid_argument("split_dataset: X and y row counts differ");
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("split_dataset: row count " + std::to_string(n) +
                                " is not even and positive; drop a row explicitly");
  }
  const Index half = n / 2;
  SplitDataset s;
  s.d1.X = d.X.topRows(half);
  s.d1.y = d.y.head(half);
  s.d2.X = d.X.bottomRows(half);
  s.d2.y = d.y.tail(half);
  s.d1.feature_names = s.d2.feature_names = d.feature_names;
  s.d1.provenance = {{"parent", d.provenance}, {"part", "D1"}, {"rows", half}};
  s.d2.provenance = {{"parent", d.provenance}, {"part", "D2"}, {"rows", half}};
  return s;
}

}  // namespace specbayes
