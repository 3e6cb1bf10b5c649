#include "specbayes/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>

#include <Eigen/Cholesky>

#include "specbayes/assumption_lab.hpp"
#include "specbayes/bvm_approx.hpp"
#include "specbayes/csv_loader.hpp"
#include "specbayes/errors.hpp"
#include "specbayes/io.hpp"
#include "specbayes/metrics.hpp"
#include "specbayes/parallel.hpp"
#include "specbayes/posterior_snis.hpp"

#ifndef SPECBAYES_VERSION
#define SPECBAYES_VERSION "0.0.0"
#endif

namespace specbayes {

namespace fs = std::filesystem;
using nlohmann::json;
using Row = std::vector<std::string>;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn>
auto timed(RunManifest& man, const std::string& stage, Fn&& fn) {
  const auto t0 = Clock::now();
  if constexpr (std::is_void_v<decltype(fn())>) {
    fn();
    man.stages.push_back({stage, seconds_since(t0)});
  } else {
    auto result = fn();
    man.stages.push_back({stage, seconds_since(t0)});
    return result;
  }
}

std::string str(Index v) { return std::to_string(v); }
std::string str(std::uint64_t v) { return std::to_string(v); }

Row sample_header(const std::vector<Index>& coords) {
  Row h{"source", "scenario", "n", "p", "seed", "draw_id", "k", "sigma2", "log_weight"};
  for (Index c : coords) h.push_back("theta_" + std::to_string(c));
  return h;
}

std::vector<Index> stored_coords(const RunConfig& cfg, Index p) {
  if (!cfg.samples.full_theta) return cfg.samples.coords;
  std::vector<Index> all(static_cast<std::size_t>(p));
  std::iota(all.begin(), all.end(), Index{0});
  return all;
}

struct CellOutput {
  CellRecord record;
  std::vector<Row> risk_rows;
  std::vector<Row> sample_rows;
  std::vector<Row> tv_rows;
};

enum class SimulationMode { Risk, Overlay, ApproxOnly };

Dataset project_design(const Dataset& d2, const SpectralDecomposition& dec, int L) {
  const MatrixXd V = dec.eigenvectors.leftCols(std::min<Index>(L, dec.stored()));
  Dataset out = d2;
  out.X = (d2.X * V) * V.transpose();
  return out;
}

TruncatedGaussianApprox cell_approximator(const RunConfig& cfg, const SimulatedCell& c) {
  const Dataset d2 = cfg.approx.design == ApproxDesign::Projected
                         ? project_design(c.data.d2, c.prior_spectrum, c.prior.L_kappa)
                         : c.data.d2;
  return build_approximator(c.prior_spectrum, c.prior.L_kappa, cfg.approx.sigma2, d2, c.prior.radius);
}

CellOutput run_cell(const RunConfig& cfg, const SpectralDecomposition& cov, Index n, std::uint64_t seed,
                    SimulationMode mode, int snis_threads) {
  const auto t0 = Clock::now();
  CellOutput out;
  out.record.n = n;
  out.record.p = dimension_for(n);
  out.record.seed = seed;
  try {
    const SimulatedCell c = simulate_cell(cfg, cov, n, seed);
    const std::string scen = to_string(c.spec.id);
    const Row prefix{scen, str(n), str(out.record.p), str(seed)};
    const auto coords = stored_coords(cfg, out.record.p);
    auto sample_row = [&](const char* source, std::size_t id, int k, double s2, double lw,
                          const VectorXd& vals) {
      Row r{source};
      r.insert(r.end(), prefix.begin(), prefix.end());
      r.insert(r.end(), {std::to_string(id), std::to_string(k), format_double(s2), format_double(lw)});
      for (Index j = 0; j < vals.size(); ++j) r.push_back(format_double(vals(j)));
      return r;
    };

    const bool uses_bayes = std::find(cfg.estimators.begin(), cfg.estimators.end(), "spectral_bayes") !=
                            cfg.estimators.end();
    std::optional<WeightedPosterior> wp;
    if (mode == SimulationMode::Overlay || (mode == SimulationMode::Risk && (uses_bayes || cfg.samples.write))) {
      SNISConfig sn = cfg.snis;
      sn.master_seed = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(n), seed, 3});
      sn.threads = snis_threads;
      if (mode == SimulationMode::Overlay) sn.fixed_sigma2 = cfg.approx.sigma2;
      wp = snis_sample(c.data, c.prior_spectrum, c.prior, sn);
      out.record.ess = wp->ess;
      out.record.low_ess_warning = wp->low_ess_warning;
      if (cfg.samples.write) {
        const MatrixXd pts = wp->coordinates(coords);
        for (std::size_t i = 0; i < wp->size(); ++i) {
          const auto& s = wp->samples[i];
          out.sample_rows.push_back(
              sample_row("snis", i, s.k, s.sigma2, s.log_weight, pts.row(static_cast<Index>(i)).transpose()));
        }
      }
    }

    if (mode == SimulationMode::Risk) {
      for (const auto& est : cfg.estimators) {
        VectorXd theta;
        if (est == "spectral_bayes") theta = posterior_mean(*wp);
        else if (est == "mni") theta = minimum_norm_interpolator(c.data.d2.X, c.data.d2.y);
        else theta = ridge_baseline(c.data.d2, cfg.ridge_lambda);
        Row r = prefix;
        r.push_back(est);
        r.push_back(format_double(predictive_risk(theta, c.theta_star, cov)));
        out.risk_rows.push_back(std::move(r));
      }
    }

    if (mode == SimulationMode::Overlay || mode == SimulationMode::ApproxOnly) {
      const auto appr = cell_approximator(cfg, c);
      Rng rng = make_stream(derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(n), seed, 4}));
      // Only the coordinates written out or used for TV are materialized.
      std::vector<Index> need{cfg.approx.tv_coords[0], cfg.approx.tv_coords[1]};
      need.insert(need.end(), coords.begin(), coords.end());
      const MatrixXd draws = cfg.samples.full_theta
                                 ? sample_approximator(appr, cfg.approx.draws, rng)
                                 : sample_approximator_coordinates(appr, cfg.approx.draws, need, rng);
      auto column = [&](std::size_t need_index) {
        return cfg.samples.full_theta ? need[need_index] : static_cast<Index>(need_index);
      };
      const auto L = c.prior.L_kappa;
      if (cfg.samples.write || mode == SimulationMode::ApproxOnly) {
        for (Index i = 0; i < draws.rows(); ++i) {
          VectorXd vals(static_cast<Index>(coords.size()));
          for (std::size_t j = 0; j < coords.size(); ++j) vals(static_cast<Index>(j)) = draws(i, column(j + 2));
          out.sample_rows.push_back(
              sample_row("approx", static_cast<std::size_t>(i), L, cfg.approx.sigma2, 0.0, vals));
        }
      }
      if (mode == SimulationMode::Overlay) {
        const std::vector<Index> tvc{cfg.approx.tv_coords[0], cfg.approx.tv_coords[1]};
        const WeightedPoints a{wp->coordinates(tvc), wp->normalized_weights};
        MatrixXd b(draws.rows(), 2);
        b.col(0) = draws.col(column(0));
        b.col(1) = draws.col(column(1));
        const double tv = estimate_tv(a, WeightedPoints::uniform(std::move(b)), {0, 1}, cfg.approx.tv_bins);
        out.tv_rows.push_back({scen, str(n), str(seed), std::to_string(cfg.approx.tv_bins), format_double(tv)});
      }
    }
  } catch (const std::exception& e) {
    out.record.status = "failed";
    out.record.error = e.what();
    out.risk_rows.clear();
    out.sample_rows.clear();
    out.tv_rows.clear();
  }
  out.record.seconds = seconds_since(t0);
  return out;
}

void record_digest(RunManifest& man, const fs::path& dir, const std::string& name) {
  man.digests[name] = sha256_file(dir / name);
}

void run_simulation(const RunConfig& cfg, RunManifest& man, SimulationMode mode) {
  const auto& grid = cfg.n_grid;
  std::vector<SpectralDecomposition> covs(grid.size());
  timed(man, "covariance", [&] {
    parallel_for(grid.size(), cfg.threads, [&](std::size_t i) { covs[i] = covariance_for(cfg, grid[i]); });
  });

  struct CellKey {
    std::size_t grid_index;
    std::uint64_t seed;
  };
  std::vector<CellKey> keys;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (auto s : cfg.seeds) keys.push_back({i, s});
  std::vector<CellOutput> outputs(keys.size());
  const int snis_threads = keys.size() >= static_cast<std::size_t>(cfg.threads) ? 1 : cfg.threads;
  timed(man, "cells", [&] {
    parallel_for(keys.size(), cfg.threads, [&](std::size_t i) {
      const auto& key = keys[i];
      outputs[i] = run_cell(cfg, covs[key.grid_index], grid[key.grid_index], key.seed, mode, snis_threads);
    });
  });

  timed(man, "write", [&] {
    const fs::path& dir = cfg.output_dir;
    for (const auto& o : outputs) man.cells.push_back(o.record);
    if (mode == SimulationMode::Risk) {
      CsvWriter risk(dir / "risk.csv", {"scenario", "n", "p", "seed", "estimator", "risk"});
      for (const auto& o : outputs)
        for (const auto& r : o.risk_rows) risk.write_row(r);
    }
    const bool write_samples = cfg.samples.write || mode == SimulationMode::ApproxOnly;
    if (write_samples) {
      if (cfg.samples.full_theta && grid.size() > 1) {
        throw ConfigurationError("samples.full_theta needs a single n (the column count depends on p)");
      }
      CsvWriter samples(dir / "samples.csv", sample_header(stored_coords(cfg, dimension_for(grid.front()))));
      for (const auto& o : outputs)
        for (const auto& r : o.sample_rows) samples.write_row(r);
    }
    if (mode == SimulationMode::Overlay) {
      CsvWriter tv(dir / "tv.csv", {"scenario", "n", "seed", "bins", "tv"});
      for (const auto& o : outputs)
        for (const auto& r : o.tv_rows) tv.write_row(r);
    }
    if (mode == SimulationMode::Risk) record_digest(man, dir, "risk.csv");
    if (write_samples) record_digest(man, dir, "samples.csv");
    if (mode == SimulationMode::Overlay) record_digest(man, dir, "tv.csv");
  });

  man.notes["dimension_rule"] = "p = ceil(n^(4/3))";
  man.notes["theta_variance"] = cfg.scenario.theta_variance;
  man.notes["covariance"] = "one covariance per n, shared by every seed and scenario of the run";
  if (mode == SimulationMode::Risk) {
    man.notes["sigma2"] = cfg.snis.fixed_sigma2 ? json(*cfg.snis.fixed_sigma2) : json("sampled from prior");
    man.notes["estimators_omitted"] = "horseshoe and spike-and-slab baselines are not implemented";
  } else {
    man.notes["sigma2"] = cfg.approx.sigma2;
    man.notes["approximator_design"] = cfg.approx.design == ApproxDesign::Full ? "full" : "projected";
    man.notes["tv_estimator"] = {{"kind", "2-D histogram over the joint bounding box"},
                                 {"bins", cfg.approx.tv_bins},
                                 {"coords", {cfg.approx.tv_coords[0], cfg.approx.tv_coords[1]}}};
  }
}

EigenvalueSequence power_sequence(double power, std::int64_t p) {
  EigenvalueSequence seq;
  seq.length = p;
  seq.at = [power](std::int64_t k) { return std::pow(static_cast<double>(k), -power); };
  return seq;
}

void run_assumptions(const RunConfig& cfg, RunManifest& man) {
  json checks = json::array();
  bool all = true;
  timed(man, "checks", [&] {
    for (const auto& spec : cfg.assumption_checks) {
      for (double n : spec.n_values) {
        const auto p = static_cast<std::int64_t>(dimension_for(static_cast<Index>(std::llround(n))));
        const double nu = spec.nu ? *spec.nu : n * std::exp(-std::sqrt(n)) / static_cast<double>(p);
        ExampleTuple ex;
        if (spec.example == "exponential") {
          ex = example_exponential_tuple(n, spec.tau, spec.m, nu, p);
        } else if (spec.example == "lambert") {
          ex = example_lambert_tuple(n, spec.tau, nu, p, spec.theta_constant);
        } else if (spec.example == "polynomial") {
          const auto variant = spec.dimension == "polynomial" ? PolynomialDimension::Polynomial
                                                              : PolynomialDimension::Exponential;
          ex = example_polynomial_tuple(n, spec.alpha, spec.beta, variant);
        } else {
          throw ConfigurationError("unknown assumption example '" + spec.example + "'");
        }
        std::string schedule = spec.example == "polynomial" ? "k^-1" : "exp(-k/tau) + nu_n";
        if (spec.power_schedule) {
          ex.eigenvalues = power_sequence(*spec.power_schedule, p);
          schedule = "k^-" + format_double(*spec.power_schedule);
        }
        const CheckReport report = check_precomb(ex.eigenvalues, n, ex.tuple, spec.c);
        all = all && report.all_pass();
        checks.push_back({{"label", spec.label},
                          {"example", spec.example},
                          {"n", n},
                          {"p", ex.eigenvalues.length},
                          {"eigenvalues", schedule},
                          {"report", report.to_json()}});
      }
    }
  });
  const fs::path path = cfg.output_dir / "report.json";
  std::ofstream(path) << json{{"checks", checks}, {"all_pass", all}}.dump(2) << '\n';
  record_digest(man, cfg.output_dir, "report.json");
  CellRecord rec;
  rec.status = "ok";
  man.cells.push_back(rec);
}

void run_real_data(const RunConfig& cfg, RunManifest& man) {
  const auto& rd = cfg.real_data;
  CellRecord rec;
  const auto t0 = Clock::now();
  try {
    const Dataset full = timed(man, "load", [&] { return load_csv_dataset(rd.path, rd.response, rd.policy); });
    const Index rows = full.rows();
    std::vector<Index> order(static_cast<std::size_t>(rows));
    std::iota(order.begin(), order.end(), Index{0});
    Rng split_rng = make_stream(rd.split_seed, 0x5917u);
    std::shuffle(order.begin(), order.end(), split_rng);
    const auto n_test = static_cast<Index>(std::llround(rd.test_fraction * static_cast<double>(rows)));
    std::vector<Index> test(order.begin(), order.begin() + n_test);
    std::vector<Index> train(order.begin() + n_test, order.end());
    bool dropped_odd = false;
    if (train.size() % 2 == 1) {
      train.pop_back();
      dropped_odd = true;
    }
    if (train.size() < 4) throw DegenerateInputError("real_data: fewer than 4 training rows after cleansing");
    if (test.empty()) throw DegenerateInputError("real_data: empty test split");

    const auto n_train = static_cast<Index>(train.size());
    Dataset tr;
    tr.X = full.X(train, Eigen::all);
    tr.y = full.y(train);
    const Eigen::RowVectorXd x_mean = tr.X.colwise().mean();
    const double y_mean = tr.y.mean();
    tr.X.rowwise() -= x_mean;
    tr.y.array() -= y_mean;
    const SplitDataset split = split_dataset(tr);
    const PriorConfig prior = cfg.prior.resolve(static_cast<long>(n_train));
    const SpectralDecomposition dec = empirical_spectrum(split.d1.X);

    SNISConfig sn = cfg.snis;
    sn.master_seed = derive_seed(cfg.master_seed, {0xDA7Au, 3});
    sn.threads = cfg.threads;
    const WeightedPosterior wp = timed(man, "snis", [&] { return snis_sample(split, dec, prior, sn); });
    rec.n = n_train;
    rec.p = full.dim();
    rec.ess = wp.ess;
    rec.low_ess_warning = wp.low_ess_warning;
    const VectorXd theta_hat = posterior_mean(wp);

    struct Pred {
      std::string split;
      Index row;
      double y, mean, median, lo, hi;
    };
    std::vector<std::pair<std::string, Index>> targets;
    for (Index r : train) targets.emplace_back("train", r);
    for (Index r : test) targets.emplace_back("test", r);
    std::vector<Pred> preds(targets.size());
    const double lo_p = (1.0 - rd.level) / 2.0;
    const double hi_p = (1.0 + rd.level) / 2.0;
    timed(man, "predict", [&] {
      parallel_for(targets.size(), cfg.threads, [&](std::size_t i) {
        const auto& [name, r] = targets[i];
        const VectorXd x = (full.X.row(r) - x_mean).transpose();
        Rng rng = make_stream(derive_seed(cfg.master_seed, {0xDA7Au, 4}), static_cast<std::uint64_t>(r));
        const auto q = predictive_quantiles(wp, x, {0.5, lo_p, hi_p}, rng, rd.predictive_draws);
        preds[i] = {name, r, full.y(r), x.dot(theta_hat) + y_mean, q[0] + y_mean, q[1] + y_mean, q[2] + y_mean};
      });
    });

    const fs::path& dir = cfg.output_dir;
    {
      CsvWriter out(dir / "predictions.csv", {"split", "row", "y", "mean", "median", "lo", "hi"});
      for (const auto& pr : preds) {
        out.write_row({pr.split, str(pr.row), format_double(pr.y), format_double(pr.mean), format_double(pr.median),
                       format_double(pr.lo), format_double(pr.hi)});
      }
    }
    json mapes = json::object();
    {
      CsvWriter out(dir / "mape.csv", {"split", "rows", "mape"});
      for (const std::string name : {"train", "test"}) {
        std::vector<double> yt, yp;
        for (const auto& pr : preds) {
          if (pr.split != name) continue;
          yt.push_back(pr.y);
          yp.push_back(pr.mean);
        }
        const double m = mape(Eigen::Map<VectorXd>(yt.data(), static_cast<Index>(yt.size())),
                              Eigen::Map<VectorXd>(yp.data(), static_cast<Index>(yp.size())));
        mapes[name] = m;
        out.write_row({name, std::to_string(yt.size()), format_double(m)});
      }
    }
    record_digest(man, dir, "predictions.csv");
    record_digest(man, dir, "mape.csv");
    man.notes["cleansing"] = full.provenance;
    man.notes["train_rows"] = n_train;
    man.notes["test_rows"] = test.size();
    man.notes["dropped_odd_training_row"] = dropped_odd;
    man.notes["centering"] = "features and response centered on training means; predictions add the mean back";
    man.notes["predictor"] = "posterior mean x'theta_hat; interval from posterior-predictive quantiles";
    man.notes["mape"] = mapes;
    man.notes["prior_levels"] = {prior.L_kappa, prior.U_kappa};
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.error = e.what();
  }
  rec.seconds = seconds_since(t0);
  man.cells.push_back(rec);
}

RunManifest begin_manifest(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  RunManifest man;
  man.config = to_json(cfg);
  man.version = SPECBAYES_VERSION;
  man.master_seed = cfg.master_seed;
  return man;
}

void finish_manifest(const RunConfig& cfg, const RunManifest& man) {
  const fs::path path = cfg.output_dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << man.to_json().dump(2) << '\n';
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)};
  for (auto v : path) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

VectorXd ridge_baseline(const Dataset& d2, double lambda_reg) {
  if (!(lambda_reg > 0.0)) throw std::invalid_argument("ridge_baseline: lambda must be positive");
  const MatrixXd& X = d2.X;
  if (X.rows() != d2.y.size()) throw std::invalid_argument("ridge_baseline: row count mismatch");
  MatrixXd K = X * X.transpose();
  K.diagonal().array() += lambda_reg;
  const Eigen::LLT<MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ridge_baseline: kernel system not positive definite");
  return X.transpose() * llt.solve(d2.y);
}

bool RunManifest::all_cells_ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.status == "ok"; });
}

json RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["master_seed"] = master_seed;
  j["config"] = config;
  j["stages"] = json::array();
  for (const auto& s : stages) j["stages"].push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["cells"] = json::array();
  for (const auto& c : cells) {
    json e = {{"n", c.n}, {"p", c.p}, {"seed", c.seed}, {"status", c.status}, {"seconds", c.seconds}};
    if (c.ess > 0.0) {
      e["ess"] = c.ess;
      e["low_ess_warning"] = c.low_ess_warning;
    }
    if (!c.error.empty()) e["error"] = c.error;
    j["cells"].push_back(std::move(e));
  }
  j["outputs"] = digests;
  j["notes"] = notes;
  return j;
}

SpectralDecomposition covariance_for(const RunConfig& cfg, Index n) {
  ScenarioSpec spec = cfg.scenario;
  spec.n = n;
  const EigenSchedule schedule = spec.schedule();
  const Basis basis = schedule.kind == ScheduleKind::Identity ? Basis::Diagonal : cfg.basis;
  return build_covariance(schedule, spec.p(), n, basis,
                          derive_seed(cfg.master_seed, {0xC0u, static_cast<std::uint64_t>(n)}));
}

SimulatedCell simulate_cell(const RunConfig& cfg, const SpectralDecomposition& cov, Index n, std::uint64_t seed) {
  SimulatedCell c;
  c.spec = cfg.scenario;
  c.spec.n = n;
  c.spec.validate();
  const auto un = static_cast<std::uint64_t>(n);
  c.theta_star = sample_theta_star(c.spec, derive_seed(cfg.master_seed, {un, seed, 1}));
  c.data = split_dataset(sample_dataset(c.spec, cov, c.theta_star, derive_seed(cfg.master_seed, {un, seed, 2})));
  c.prior_spectrum = empirical_spectrum(c.data.d1.X);
  c.prior = cfg.prior.resolve(static_cast<long>(n));
  return c;
}

RunManifest run_experiment(const RunConfig& cfg) {
  RunManifest man = begin_manifest(cfg);
  switch (cfg.experiment) {
    case Experiment::RiskHistograms:
    case Experiment::RiskCurve: run_simulation(cfg, man, SimulationMode::Risk); break;
    case Experiment::ApproxOverlay: run_simulation(cfg, man, SimulationMode::Overlay); break;
    case Experiment::AssumptionsCheck: run_assumptions(cfg, man); break;
    case Experiment::RealData: run_real_data(cfg, man); break;
  }
  finish_manifest(cfg, man);
  return man;
}

RunManifest run_approximator_samples(const RunConfig& cfg) {
  RunManifest man = begin_manifest(cfg);
  run_simulation(cfg, man, SimulationMode::ApproxOnly);
  finish_manifest(cfg, man);
  return man;
}

}  // namespace specbayes
