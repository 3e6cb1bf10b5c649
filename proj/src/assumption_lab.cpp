#include "specbayes/assumption_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace specbayes {

namespace {

using ld = long double;

// Integer rounding of tuple bounds that are exact in real arithmetic
// (e.g. m log n = 2 at n = e^6) must not flip on the last ulp.
constexpr double kRoundSlack = 1e-9;

std::int64_t floor_bound(double x) { return static_cast<std::int64_t>(std::floor(x + kRoundSlack)); }
std::int64_t ceil_bound(double x) { return static_cast<std::int64_t>(std::ceil(x - kRoundSlack)); }

// H_b - H_a = sum_{k=a+1}^{b} 1/k, with b given through log b when b is too
// large to enumerate.
ld harmonic(ld b) {
  constexpr ld gamma = 0.577215664901532860606512090082402431L;
  if (b < 1e6L) {
    ld sum = 0.0L;
    for (auto k = static_cast<std::int64_t>(b); k >= 1; --k) sum += 1.0L / static_cast<ld>(k);
    return sum;
  }
  const ld inv = 1.0L / b;
  const ld inv2 = inv * inv;
  return std::log(b) + gamma + 0.5L * inv - inv2 / 12.0L + inv2 * inv2 / 120.0L;
}

ConditionResult make_result(std::string id, ld lhs, ld rhs, double c) {
  ConditionResult r;
  r.id = std::move(id);
  r.lhs = static_cast<double>(lhs);
  r.rhs = static_cast<double>(rhs);
  r.margin = static_cast<double>(static_cast<ld>(c) * rhs - lhs);
  r.pass = lhs <= static_cast<ld>(c) * rhs;
  return r;
}

double halley(double w, double x) {
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace

void AssumptionTuple::validate() const {
  if (!(epsilon_n > 0.0) || !(H_n > 0.0) || !(rho_n > 0.0)) {
    throw std::invalid_argument("AssumptionTuple: epsilon_n, H_n and rho_n must be positive");
  }
  if (L_kappa < 1 || L_kappa > U_kappa) {
    throw std::invalid_argument("AssumptionTuple: need 1 <= L_kappa <= U_kappa");
  }
}

EigenvalueSequence EigenvalueSequence::from_vector(std::vector<double> eigs) {
  EigenvalueSequence seq;
  seq.length = static_cast<std::int64_t>(eigs.size());
  auto shared = std::make_shared<std::vector<double>>(std::move(eigs));
  seq.at = [shared](std::int64_t k) { return (*shared).at(static_cast<std::size_t>(k - 1)); };
  return seq;
}

long double EigenvalueSequence::tail_sum(std::int64_t L) const {
  if (tail_closed_form) return tail_closed_form(L);
  if (length == 0) throw std::invalid_argument("EigenvalueSequence: unbounded sequence needs a closed-form tail");
  // Neumaier-compensated summation.
  ld sum = 0.0L;
  ld comp = 0.0L;
  for (std::int64_t k = L + 1; k <= length; ++k) {
    const ld v = at(k);
    const ld t = sum + v;
    comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

bool CheckReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& r) { return r.pass; });
}

const ConditionResult& CheckReport::condition(const std::string& id) const {
  for (const auto& r : conditions)
    if (r.id == id) return r;
  throw std::out_of_range("CheckReport: no condition " + id);
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["c"] = c;
  j["tuple"] = {{"epsilon_n", tuple.epsilon_n},
                {"L_kappa", tuple.L_kappa},
                {"U_kappa", tuple.U_kappa},
                {"H_n", tuple.H_n},
                {"rho_n", tuple.rho_n}};
  j["conditions"] = nlohmann::json::array();
  for (const auto& r : conditions) {
    nlohmann::json e = {{"condition_id", r.id}, {"lhs", r.lhs}, {"rhs", r.rhs},
                        {"margin", r.margin}, {"pass", r.pass}};
    if (r.id == "ii") {
      e["worst_k"] = r.worst_k;
      e["log_argument_le_one"] = r.log_argument_le_one;
    }
    if (!r.note.empty()) e["note"] = r.note;
    j["conditions"].push_back(std::move(e));
  }
  j["all_pass"] = all_pass();
  return j;
}

CheckReport check_precomb(const EigenvalueSequence& eigs, double n, const AssumptionTuple& t, double c) {
  t.validate();
  if (!(n > 0.0)) throw std::invalid_argument("check_precomb: n must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("check_precomb: c must be positive");
  if (!eigs.at) throw std::invalid_argument("check_precomb: empty eigenvalue sequence");
  if (eigs.length != 0 && eigs.length < t.U_kappa) {
    throw std::invalid_argument("check_precomb: eigenvalue sequence shorter than U_kappa");
  }

  CheckReport report;
  report.n = n;
  report.c = c;
  report.tuple = t;
  const ld nn = n;
  const ld eps2 = static_cast<ld>(t.epsilon_n) * t.epsilon_n;
  const ld rho = t.rho_n;
  const ld H = t.H_n;

  report.conditions.push_back(make_result("i", std::max(1.0L / std::sqrt(nn) / rho, rho / eps2), 1.0L, c));

  ConditionResult worst;
  bool have = false;
  std::int64_t flagged_k = 0;
  for (std::int64_t k = t.L_kappa; k <= t.U_kappa; ++k) {
    const ld lambda = eigs.at(k);
    const ld a = static_cast<ld>(k) * (rho + lambda) * lambda;
    const ld arg = eps2 / a;
    auto r = make_result("ii", eps2 * (1.0L - nn * a) / a, 0.5L * static_cast<ld>(k) * std::log(arg), c);
    r.worst_k = k;
    if (arg <= 1.0L && flagged_k == 0) flagged_k = k;
    if (!have || r.margin < worst.margin) {
      worst = r;
      have = true;
    }
  }
  if (flagged_k != 0) {
    worst.pass = false;
    worst.log_argument_le_one = true;
    worst.note = "log argument eps^2/(k(rho+lambda_k)lambda_k) <= 1 at k=" + std::to_string(flagged_k);
  }
  report.conditions.push_back(worst);

  report.conditions.push_back(make_result("iii", eigs.tail_sum(t.L_kappa), nn * eps2 * eps2 / (H * H), c));
  const ld U = static_cast<ld>(t.U_kappa);
  const ld L = static_cast<ld>(t.L_kappa);
  report.conditions.push_back(
      make_result("iv-a", U * std::log(H * U / static_cast<ld>(t.epsilon_n)), nn * eps2, c));
  report.conditions.push_back(make_result("iv-b", nn * eps2, H * H + L * L, c));
  return report;
}

CheckReport check_precomb(const std::vector<double>& eigs, double n, const AssumptionTuple& t, double c) {
  return check_precomb(EigenvalueSequence::from_vector(eigs), n, t, c);
}

namespace {

EigenvalueSequence exponential_sequence(double tau, double nu_n, std::int64_t p) {
  if (nu_n < 0.0) throw std::invalid_argument("exponential example: nu_n must be >= 0");
  if (p < 0) throw std::invalid_argument("exponential example: p must be >= 0");
  if (p == 0 && nu_n > 0.0) {
    throw std::invalid_argument("exponential example: an unbounded sequence needs nu_n = 0");
  }
  EigenvalueSequence seq;
  seq.length = p;
  seq.at = [tau, nu_n](std::int64_t k) { return std::exp(-static_cast<double>(k) / tau) + nu_n; };
  seq.tail_closed_form = [tau, nu_n, p](std::int64_t L) -> ld {
    const ld q = std::exp(-1.0L / static_cast<ld>(tau));
    const ld head = std::exp(-static_cast<ld>(L + 1) / static_cast<ld>(tau));
    if (p == 0) return head / (1.0L - q);
    if (L >= p) return 0.0L;
    const ld count = static_cast<ld>(p - L);
    return head * -std::expm1(-count / static_cast<ld>(tau)) / (1.0L - q) + count * static_cast<ld>(nu_n);
  };
  return seq;
}

}  // namespace

ExampleTuple example_exponential_tuple(double n, double tau, double m, double nu_n, std::int64_t p) {
  if (!(n > 1.0)) throw std::invalid_argument("example_exponential_tuple: n must exceed 1");
  if (!(tau > 1.0)) throw std::invalid_argument("example_exponential_tuple: tau must exceed 1");
  if (!(m > 1.0 / 6.0 && m < tau / 2.0)) {
    throw std::invalid_argument("example_exponential_tuple: m must lie in (1/6, tau/2)");
  }
  const double log_n = std::log(n);
  ExampleTuple ex;
  ex.tuple.H_n = std::sqrt(n);
  ex.tuple.L_kappa = std::max<std::int64_t>(1, floor_bound(m * log_n));
  ex.tuple.U_kappa = std::max(ex.tuple.L_kappa, ceil_bound(tau / 2.0 * log_n));
  ex.tuple.epsilon_n = std::pow(n, -1.0 / (6.0 * tau));
  ex.tuple.rho_n = std::pow(n, -1.0 / (2.0 * tau));
  ex.eigenvalues = exponential_sequence(tau, nu_n, p);
  return ex;
}

ExampleTuple example_lambert_tuple(double n, double tau, double nu_n, std::int64_t p, double theta_constant) {
  if (!(n > 1.0)) throw std::invalid_argument("example_lambert_tuple: n must exceed 1");
  if (!(tau > 1.0)) throw std::invalid_argument("example_lambert_tuple: tau must exceed 1");
  if (!(theta_constant > 0.0)) throw std::invalid_argument("example_lambert_tuple: theta_constant must be positive");
  const double w = lambert_wm1(-1.0 / (2.0 * tau * std::pow(n, 0.25)));
  const auto k = std::max<std::int64_t>(1, std::llround(theta_constant * -2.0 * tau * w));
  ExampleTuple ex;
  ex.tuple.L_kappa = k;
  ex.tuple.U_kappa = k;
  ex.tuple.H_n = std::sqrt(n) * std::pow(static_cast<double>(k), 3.0);
  ex.tuple.epsilon_n = static_cast<double>(k) / std::sqrt(n);
  ex.tuple.rho_n = std::log(n);
  ex.eigenvalues = exponential_sequence(tau, nu_n, p);
  return ex;
}

ExampleTuple example_polynomial_tuple(double n, double alpha, double beta, PolynomialDimension variant,
                                      std::int64_t p) {
  if (!(n > 1.0)) throw std::invalid_argument("example_polynomial_tuple: n must exceed 1");
  if (!(alpha > 6.0)) throw std::invalid_argument("example_polynomial_tuple: alpha must exceed 6");
  ExampleTuple ex;
  ex.tuple.epsilon_n = std::pow(n, -1.0 / alpha);
  ex.tuple.L_kappa = std::max<std::int64_t>(1, floor_bound(std::pow(n, (alpha - 1.0) / (2.0 * alpha))));
  ex.tuple.U_kappa = std::max(ex.tuple.L_kappa, ceil_bound(std::pow(n, (alpha - 3.0) / alpha)));

  ld log_p = 0.0L;
  if (variant == PolynomialDimension::Exponential) {
    if (!(beta > 0.0 && beta < (alpha - 4.0) / alpha)) {
      throw std::invalid_argument("example_polynomial_tuple: beta must lie in (0, (alpha-4)/alpha)");
    }
    ex.tuple.H_n = std::pow(n, (alpha - 4.0) / (2.0 * alpha) - beta / 2.0);
    ex.tuple.rho_n = std::pow(n, -2.0 / (alpha - 1.0));
    log_p = std::pow(static_cast<ld>(n), static_cast<ld>(beta));
  } else {
    if (p < 0) throw std::invalid_argument("example_polynomial_tuple: p must be >= 0");
    if (p == 0) p = static_cast<std::int64_t>(std::ceil(std::pow(n, 4.0 / 3.0) - kRoundSlack));
    ex.tuple.H_n = std::pow(n, (alpha - 5.0) / (2.0 * alpha));
    ex.tuple.rho_n = 1.0 / std::sqrt(n);
    log_p = std::log(static_cast<ld>(p));
  }

  const bool enumerable = log_p < std::log(9.0e18L);
  EigenvalueSequence seq;
  seq.length = enumerable ? static_cast<std::int64_t>(std::llround(std::exp(log_p))) : 0;
  if (seq.length != 0 && seq.length < ex.tuple.U_kappa) {
    throw std::invalid_argument("example_polynomial_tuple: dimension smaller than U_kappa");
  }
  seq.at = [](std::int64_t k) { return 1.0 / static_cast<double>(k); };
  seq.tail_closed_form = [log_p, length = seq.length](std::int64_t L) -> ld {
    const ld upper = length != 0 ? harmonic(static_cast<ld>(length))
                                 : log_p + 0.577215664901532860606512090082402431L;
    return upper - harmonic(static_cast<ld>(L));
  };
  ex.eigenvalues = std::move(seq);
  return ex;
}

double lambert_w0(double x) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(x) || x < branch) throw std::domain_error("lambert_w0: argument below -1/e");
  if (x == branch) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  double w;
  if (x < -0.32) {
    const double q = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
  } else if (x < 3.0) {
    w = std::log1p(x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(w, x);
}

double lambert_wm1(double x) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(x) || x < branch || x >= 0.0) {
    throw std::domain_error("lambert_wm1: argument outside [-1/e, 0)");
  }
  if (x == branch) return -1.0;
  double w;
  if (x < -0.25) {
    const double q = -std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(w, x);
}

}  // namespace specbayes
