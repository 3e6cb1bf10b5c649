#include "specbayes/run_config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "specbayes/errors.hpp"

namespace specbayes {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigurationError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigurationError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

CovariateLaw law_from_string(const std::string& s) {
  if (s == "gaussian") return CovariateLaw::Gaussian;
  if (s == "laplace") return CovariateLaw::Laplace;
  if (s == "identity_gaussian") return CovariateLaw::IdentityGaussian;
  throw ConfigurationError("unknown covariate law '" + s + "'");
}

std::string to_string(Basis b) { return b == Basis::Diagonal ? "diagonal" : "random_orthogonal"; }

Basis basis_from_string(const std::string& s) {
  if (s == "diagonal") return Basis::Diagonal;
  if (s == "random_orthogonal") return Basis::RandomOrthogonal;
  throw ConfigurationError("unknown basis '" + s + "'");
}

void parse_scenario(const json& j, RunConfig& cfg) {
  check_keys(j, "scenario", {"id", "law", "theta_variance", "noise_sd", "sparse_fraction", "basis"});
  const Scenario id = scenario_from_string(j.value("id", std::string("i")));
  cfg.scenario = ScenarioSpec::make(id, cfg.n_grid.empty() ? 2 : cfg.n_grid.front());
  if (j.contains("law")) cfg.scenario.law = law_from_string(j.at("law").get<std::string>());
  read(j, "theta_variance", cfg.scenario.theta_variance);
  read(j, "noise_sd", cfg.scenario.noise_sd);
  read(j, "sparse_fraction", cfg.scenario.sparse_fraction);
  if (j.contains("basis")) cfg.basis = basis_from_string(j.at("basis").get<std::string>());
}

void parse_prior(const json& j, PriorSettings& p) {
  check_keys(j, "prior", {"radius", "L_kappa", "U_kappa", "f", "eta", "xi"});
  read(j, "radius", p.radius);
  if (j.contains("L_kappa") && !j.at("L_kappa").is_null()) p.L_kappa = j.at("L_kappa").get<int>();
  if (j.contains("U_kappa") && !j.at("U_kappa").is_null()) p.U_kappa = j.at("U_kappa").get<int>();
  if (j.contains("f")) {
    const json& f = j.at("f");
    check_keys(f, "prior.f", {"quadratic", "linear", "offset"});
    read(f, "quadratic", p.f.quadratic);
    read(f, "linear", p.f.linear);
    read(f, "offset", p.f.offset);
  }
  read(j, "eta", p.eta);
  read(j, "xi", p.xi);
}

void parse_snis(const json& j, SNISConfig& s) {
  check_keys(j, "snis", {"num_draws", "sigma2", "proposal"});
  read(j, "num_draws", s.num_draws);
  if (j.contains("sigma2")) {
    const json& v = j.at("sigma2");
    if (v.is_string() && v.get<std::string>() == "prior") {
      s.fixed_sigma2.reset();
    } else if (v.is_number()) {
      s.fixed_sigma2 = v.get<double>();
    } else {
      throw ConfigurationError("snis.sigma2: expected \"prior\" or a number");
    }
  }
  if (j.contains("proposal")) {
    const auto mode = j.at("proposal").get<std::string>();
    if (mode == "prior") s.proposal = ProposalMode::Prior;
    else if (mode == "conditional") s.proposal = ProposalMode::Conditional;
    else throw ConfigurationError("snis.proposal: expected \"prior\" or \"conditional\"");
  }
}

void parse_approx(const json& j, ApproxSettings& a) {
  check_keys(j, "approx", {"draws", "sigma2", "design", "tv_bins", "tv_coords"});
  read(j, "draws", a.draws);
  read(j, "sigma2", a.sigma2);
  if (j.contains("design")) {
    const auto d = j.at("design").get<std::string>();
    if (d == "full") a.design = ApproxDesign::Full;
    else if (d == "projected") a.design = ApproxDesign::Projected;
    else throw ConfigurationError("approx.design: expected \"full\" or \"projected\"");
  }
  read(j, "tv_bins", a.tv_bins);
  if (j.contains("tv_coords")) {
    const auto c = j.at("tv_coords").get<std::vector<Index>>();
    if (c.size() != 2) throw ConfigurationError("approx.tv_coords: expected two indices");
    a.tv_coords = {c[0], c[1]};
  }
}

void parse_samples(const json& j, SampleOutput& s) {
  check_keys(j, "samples", {"write", "coords", "full_theta"});
  read(j, "write", s.write);
  read(j, "coords", s.coords);
  read(j, "full_theta", s.full_theta);
}

AssumptionCheckSpec parse_check(const json& j) {
  check_keys(j, "assumptions.checks[]", {"label", "example", "tau", "m", "alpha", "beta", "dimension",
                                         "theta_constant", "nu", "power_schedule", "n", "c"});
  AssumptionCheckSpec s;
  read(j, "label", s.label);
  read(j, "example", s.example);
  read(j, "tau", s.tau);
  read(j, "m", s.m);
  read(j, "alpha", s.alpha);
  read(j, "beta", s.beta);
  read(j, "dimension", s.dimension);
  read(j, "theta_constant", s.theta_constant);
  if (j.contains("nu") && !j.at("nu").is_null()) s.nu = j.at("nu").get<double>();
  if (j.contains("power_schedule") && !j.at("power_schedule").is_null()) {
    s.power_schedule = j.at("power_schedule").get<double>();
  }
  read(j, "n", s.n_values);
  read(j, "c", s.c);
  if (s.label.empty()) s.label = s.example;
  return s;
}

void parse_real_data(const json& j, RealDataSettings& r) {
  check_keys(j, "real_data", {"path", "response", "column_missing_threshold", "drop_columns", "missing_tokens",
                              "test_fraction", "split_seed", "level", "predictive_draws"});
  if (j.contains("path")) r.path = j.at("path").get<std::string>();
  read(j, "response", r.response);
  read(j, "column_missing_threshold", r.policy.column_missing_threshold);
  read(j, "drop_columns", r.policy.drop_columns);
  read(j, "missing_tokens", r.policy.missing_tokens);
  read(j, "test_fraction", r.test_fraction);
  read(j, "split_seed", r.split_seed);
  read(j, "level", r.level);
  read(j, "predictive_draws", r.predictive_draws);
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::RiskHistograms: return "risk_histograms";
    case Experiment::ApproxOverlay: return "approx_overlay";
    case Experiment::RiskCurve: return "risk_curve";
    case Experiment::AssumptionsCheck: return "assumptions_check";
    case Experiment::RealData: return "real_data";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::RiskHistograms, Experiment::ApproxOverlay, Experiment::RiskCurve,
                 Experiment::AssumptionsCheck, Experiment::RealData}) {
    if (to_string(e) == s) return e;
  }
  throw ConfigurationError("unknown experiment '" + s + "'");
}

PriorConfig PriorSettings::resolve(long n) const {
  PriorConfig cfg = PriorConfig::for_sample_size(n);
  if (L_kappa) cfg.L_kappa = *L_kappa;
  if (U_kappa) cfg.U_kappa = *U_kappa;
  cfg.radius = radius;
  cfg.f = f;
  cfg.eta = eta;
  cfg.xi = xi;
  cfg.validate();
  return cfg;
}

std::vector<AssumptionCheckSpec> default_assumption_checks() {
  AssumptionCheckSpec exp_tuple;
  exp_tuple.label = "exponential_tau2_m1/3";
  AssumptionCheckSpec power = exp_tuple;
  power.label = "exponential_tuple_vs_k^-1/2";
  power.power_schedule = 0.5;
  power.n_values = {1e6};
  return {exp_tuple, power};
}

void RunConfig::validate() const {
  if (threads < 1) throw ConfigurationError("threads must be >= 1");
  const bool simulated = experiment == Experiment::RiskHistograms || experiment == Experiment::ApproxOverlay ||
                         experiment == Experiment::RiskCurve;
  if (simulated) {
    if (n_grid.empty()) throw ConfigurationError("n_grid must be nonempty");
    if (seeds.empty()) throw ConfigurationError("seeds must be nonempty");
    for (Index n : n_grid) {
      ScenarioSpec s = scenario;
      s.n = n;
      try {
        s.validate();
        prior.resolve(static_cast<long>(n));
      } catch (const std::invalid_argument& e) {
        throw ConfigurationError(std::string("n=") + std::to_string(n) + ": " + e.what());
      }
    }
    try {
      snis.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigurationError(e.what());
    }
    for (const auto& e : estimators) {
      if (e != "spectral_bayes" && e != "mni" && e != "ridge") {
        throw ConfigurationError("unknown estimator '" + e + "'");
      }
    }
    if (!(ridge_lambda > 0.0)) throw ConfigurationError("ridge_lambda must be positive");
    if (experiment == Experiment::ApproxOverlay) {
      if (approx.draws < 1) throw ConfigurationError("approx.draws must be >= 1");
      if (!(approx.sigma2 > 0.0)) throw ConfigurationError("approx.sigma2 must be positive");
      if (approx.tv_bins < 2) throw ConfigurationError("approx.tv_bins must be >= 2");
    }
  }
  if (experiment == Experiment::AssumptionsCheck && assumption_checks.empty()) {
    throw ConfigurationError("assumptions.checks must be nonempty");
  }
  if (experiment == Experiment::RealData) {
    if (real_data.path.empty() || real_data.response.empty()) {
      throw ConfigurationError("real_data.path and real_data.response are required");
    }
    if (!(real_data.test_fraction > 0.0 && real_data.test_fraction < 1.0)) {
      throw ConfigurationError("real_data.test_fraction must lie in (0, 1)");
    }
    if (!(real_data.level > 0.0 && real_data.level < 1.0)) {
      throw ConfigurationError("real_data.level must lie in (0, 1)");
    }
  }
}

RunConfig parse_run_config(const json& j) {
  check_keys(j, "config", {"experiment", "master_seed", "threads", "output_dir", "n_grid", "seeds", "scenario",
                           "prior", "snis", "estimators", "ridge_lambda", "samples", "approx", "assumptions",
                           "real_data"});
  RunConfig cfg;
  try {
    if (!j.contains("experiment")) throw ConfigurationError("config: 'experiment' is required");
    cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    read(j, "master_seed", cfg.master_seed);
    read(j, "threads", cfg.threads);
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    read(j, "n_grid", cfg.n_grid);
    read(j, "seeds", cfg.seeds);
    parse_scenario(j.value("scenario", json::object()), cfg);
    if (j.contains("prior")) parse_prior(j.at("prior"), cfg.prior);
    if (j.contains("snis")) parse_snis(j.at("snis"), cfg.snis);
    if (cfg.experiment == Experiment::RiskCurve) cfg.estimators = {"spectral_bayes", "mni", "ridge"};
    read(j, "estimators", cfg.estimators);
    read(j, "ridge_lambda", cfg.ridge_lambda);
    if (cfg.experiment == Experiment::ApproxOverlay) cfg.samples.write = true;
    if (j.contains("samples")) parse_samples(j.at("samples"), cfg.samples);
    if (j.contains("approx")) parse_approx(j.at("approx"), cfg.approx);
    if (j.contains("assumptions")) {
      const json& a = j.at("assumptions");
      check_keys(a, "assumptions", {"checks"});
      for (const auto& c : a.at("checks")) cfg.assumption_checks.push_back(parse_check(c));
    } else if (cfg.experiment == Experiment::AssumptionsCheck) {
      cfg.assumption_checks = default_assumption_checks();
    }
    if (j.contains("real_data")) parse_real_data(j.at("real_data"), cfg.real_data);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["master_seed"] = cfg.master_seed;
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir.string();
  j["n_grid"] = cfg.n_grid;
  j["seeds"] = cfg.seeds;
  j["scenario"] = {{"id", to_string(cfg.scenario.id)},
                   {"law", to_string(cfg.scenario.law)},
                   {"theta_variance", cfg.scenario.theta_variance},
                   {"noise_sd", cfg.scenario.noise_sd},
                   {"sparse_fraction", cfg.scenario.sparse_fraction},
                   {"basis", to_string(cfg.basis)}};
  j["prior"] = {{"radius", cfg.prior.radius},
                {"L_kappa", cfg.prior.L_kappa ? json(*cfg.prior.L_kappa) : json(nullptr)},
                {"U_kappa", cfg.prior.U_kappa ? json(*cfg.prior.U_kappa) : json(nullptr)},
                {"f", {{"quadratic", cfg.prior.f.quadratic}, {"linear", cfg.prior.f.linear},
                       {"offset", cfg.prior.f.offset}}},
                {"eta", cfg.prior.eta},
                {"xi", cfg.prior.xi}};
  j["snis"] = {{"num_draws", cfg.snis.num_draws},
               {"sigma2", cfg.snis.fixed_sigma2 ? json(*cfg.snis.fixed_sigma2) : json("prior")},
               {"proposal", cfg.snis.proposal == ProposalMode::Prior ? "prior" : "conditional"}};
  j["estimators"] = cfg.estimators;
  j["ridge_lambda"] = cfg.ridge_lambda;
  j["samples"] = {{"write", cfg.samples.write}, {"coords", cfg.samples.coords},
                  {"full_theta", cfg.samples.full_theta}};
  j["approx"] = {{"draws", cfg.approx.draws},
                 {"sigma2", cfg.approx.sigma2},
                 {"design", cfg.approx.design == ApproxDesign::Full ? "full" : "projected"},
                 {"tv_bins", cfg.approx.tv_bins},
                 {"tv_coords", {cfg.approx.tv_coords[0], cfg.approx.tv_coords[1]}}};
  json checks = json::array();
  for (const auto& c : cfg.assumption_checks) {
    checks.push_back({{"label", c.label},
                      {"example", c.example},
                      {"tau", c.tau},
                      {"m", c.m},
                      {"alpha", c.alpha},
                      {"beta", c.beta},
                      {"dimension", c.dimension},
                      {"theta_constant", c.theta_constant},
                      {"nu", c.nu ? json(*c.nu) : json(nullptr)},
                      {"power_schedule", c.power_schedule ? json(*c.power_schedule) : json(nullptr)},
                      {"n", c.n_values},
                      {"c", c.c}});
  }
  j["assumptions"] = {{"checks", checks}};
  j["real_data"] = {{"path", cfg.real_data.path.string()},
                    {"response", cfg.real_data.response},
                    {"column_missing_threshold", cfg.real_data.policy.column_missing_threshold},
                    {"drop_columns", cfg.real_data.policy.drop_columns},
                    {"missing_tokens", cfg.real_data.policy.missing_tokens},
                    {"test_fraction", cfg.real_data.test_fraction},
                    {"split_seed", cfg.real_data.split_seed},
                    {"level", cfg.real_data.level},
                    {"predictive_draws", cfg.real_data.predictive_draws}};
  return j;
}

}  // namespace specbayes
