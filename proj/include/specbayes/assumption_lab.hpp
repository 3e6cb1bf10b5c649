#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace specbayes {

/// (epsilon_n, L_kappa, U_kappa, H_n, rho_n) of the precise contraction assumption.
struct AssumptionTuple {
  double epsilon_n = 0.0;
  std::int64_t L_kappa = 1;
  std::int64_t U_kappa = 1;
  double H_n = 0.0;
  double rho_n = 0.0;

  void validate() const;
};

/// Eigenvalues lambda_1, lambda_2, ... (1-based), finite or unbounded.
struct EigenvalueSequence {
  std::function<double(std::int64_t)> at;
  std::int64_t length = 0;  // 0: unbounded
  /// Optional closed form of sum_{k > L} lambda_k; required when unbounded.
  std::function<long double(std::int64_t)> tail_closed_form;

  static EigenvalueSequence from_vector(std::vector<double> eigs);
  /// sum_{k > L} lambda_k: the closed form when present, otherwise
  /// compensated long-double summation over the finite sequence.
  long double tail_sum(std::int64_t L) const;
};

struct ConditionResult {
  std::string id;  // "i", "ii", "iii", "iv-a", "iv-b"
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // c * rhs - lhs
  bool pass = false;
  std::int64_t worst_k = 0;           // condition ii only
  bool log_argument_le_one = false;   // condition ii only
  std::string note;
};

struct CheckReport {
  double n = 0.0;
  double c = 1.0;
  AssumptionTuple tuple;
  std::vector<ConditionResult> conditions;

  bool all_pass() const;
  const ConditionResult& condition(const std::string& id) const;
  nlohmann::json to_json() const;
};

/// Evaluates the four conditions at finite n, each as lhs <= c * rhs:
///   i    max(n^{-1/2} / rho, rho / eps^2) <= c * 1
///   ii   for every k in [L, U]:
///        eps^2 (1 - n k (rho + l_k) l_k) / (k (rho + l_k) l_k) <= c (k/2) log(eps^2 / (k (rho + l_k) l_k));
///        reported at the k with the smallest margin; a log argument <= 1
///        anywhere fails the condition and is flagged
///   iii  sum_{k > L} l_k <= c n eps^4 / H^2
///   iv-a U log(H U / eps) <= c n eps^2
///   iv-b n eps^2 <= c (H^2 + L^2)
CheckReport check_precomb(const EigenvalueSequence& eigs, double n, const AssumptionTuple& t, double c = 1.0);
CheckReport check_precomb(const std::vector<double>& eigs, double n, const AssumptionTuple& t, double c = 1.0);

struct ExampleTuple {
  AssumptionTuple tuple;
  EigenvalueSequence eigenvalues;
};

/// lambda_k = exp(-k / tau) + nu_n, k <= p (p = 0: unbounded, needs nu_n = 0);
/// H = sqrt(n), L = floor(m log n), U = ceil(tau/2 log n), eps = n^{-1/(6 tau)},
/// rho = n^{-1/(2 tau)}.
ExampleTuple example_exponential_tuple(double n, double tau, double m, double nu_n, std::int64_t p = 0);

/// Second tuple of the exponential example: L = U = round(theta_constant *
/// -2 tau W_{-1}(-1 / (2 tau n^{1/4}))), H = sqrt(n) k^3, eps = k / sqrt(n),
/// rho = log n, with k = L.
ExampleTuple example_lambert_tuple(double n, double tau, double nu_n, std::int64_t p = 0,
                                   double theta_constant = 1.0);

enum class PolynomialDimension {
  Exponential,  // p = exp(n^beta), 0 < beta < (alpha - 4) / alpha
  Polynomial,   // p polynomial in n (caller-supplied)
};

/// lambda_k = 1/k; eps = n^{-1/alpha}, L = floor(n^{(alpha-1)/(2 alpha)}),
/// U = ceil(n^{(alpha-3)/alpha}); exponential dimension: H = n^{(alpha-4)/(2 alpha) - beta/2},
/// rho = n^{-2/(alpha-1)}; polynomial dimension: H = n^{(alpha-5)/(2 alpha)}, rho = n^{-1/2}.
ExampleTuple example_polynomial_tuple(double n, double alpha, double beta,
                                      PolynomialDimension variant = PolynomialDimension::Exponential,
                                      std::int64_t p = 0);

/// Principal branch of w e^w = x, x >= -1/e.
double lambert_w0(double x);
/// Lower branch of w e^w = x, -1/e <= x < 0 (w <= -1).
double lambert_wm1(double x);

}  // namespace specbayes
