// Copyright 2026 The cesm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cesm/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cesm/asymptotics.hpp"
#include "cesm/distributions.hpp"
#include "cesm/error.hpp"
#include "cesm/estimator.hpp"
#include "cesm/io.hpp"
#include "cesm/rng.hpp"
#include "cesm/validation.hpp"
#include "cesm/weights.hpp"

namespace cesm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct ModelOptions {
  std::string data = "student-t";
  double d = 4.0;
  double nu = 4.0;
  double theta = 0.25;
  int m = 3;
  std::string loc;
  std::string scatter = "identity";
};

struct WeightOptions {
  std::string weights = "student-t";
  std::optional<double> weights_d;
};

struct EngineOptions {
  std::string engine = "auto";
  std::size_t mc_samples = 10'000'000;
};

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 500;
};

struct Shared {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = ".";
};

void add_model_flags(CLI::App* app, ModelOptions& o) {
  app->add_option("--data", o.data, "Data family")
      ->check(CLI::IsMember({"gaussian", "student-t", "k"}))
      ->capture_default_str();
  app->add_option("--d", o.d, "Student-t degrees of freedom (data and weights)")
      ->capture_default_str();
  app->add_option("--nu", o.nu, "K-distribution shape")->capture_default_str();
  app->add_option("--theta", o.theta, "K-distribution scale")->capture_default_str();
  app->add_option("--m", o.m, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--loc", o.loc, "Location as re,im pairs (default: zero)");
  app->add_option("--scatter", o.scatter, "Scatter matrix CSV path or \"identity\"")
      ->capture_default_str();
}

void add_weight_flags(CLI::App* app, WeightOptions& o) {
  app->add_option("--weights", o.weights, "Weight family")
      ->check(CLI::IsMember({"gaussian", "student-t"}))
      ->capture_default_str();
  app->add_option("--weights-d", o.weights_d,
                  "Degrees of freedom of the Student-t weights (default: --d)");
}

void add_engine_flags(CLI::App* app, EngineOptions& o) {
  app->add_option("--engine", o.engine,
                  "Expectation engine; auto uses the closed form when one exists")
      ->check(CLI::IsMember({"auto", "mc", "closed-form"}))
      ->capture_default_str();
  app->add_option("--mc-samples", o.mc_samples, "Monte Carlo modular draws")
      ->check(CLI::Range(std::size_t{10'000}, std::size_t{1'000'000'000}))
      ->capture_default_str();
}

void add_solver_flags(CLI::App* app, SolverOptions& o) {
  app->add_option("--tol", o.tol, "Relative solver tolerance")->capture_default_str();
  app->add_option("--max-iter", o.max_iter, "Maximum reweighting sweeps")->capture_default_str();
}

void add_shared_flags(CLI::App* app, Shared& o) {
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
}

Family make_family(const ModelOptions& o) {
  if (o.data == "gaussian") return GaussianFamily{};
  if (o.data == "student-t") return StudentTFamily{o.d};
  return KFamily{o.nu, o.theta};
}

CESModel make_model(const ModelOptions& o) {
  const Eigen::Index m = o.m;
  ComplexVector loc = o.loc.empty() ? ComplexVector::Zero(m) : io::parse_complex_list(o.loc);
  if (loc.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "--loc must have m complex entries");
  }
  const ComplexMatrix scatter = o.scatter == "identity" ? ComplexMatrix::Identity(m, m)
                                                        : io::read_matrix_csv(o.scatter);
  if (scatter.rows() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "--scatter must be m x m");
  }
  return CESModel(std::move(loc), HermitianPD(scatter), make_family(o));
}

WeightFamily make_weights(const WeightOptions& w, double data_d, Eigen::Index m) {
  if (w.weights == "gaussian") return WeightFamily::gaussian();
  return WeightFamily::student_t(w.weights_d.value_or(data_d), m);
}

ExpectationEngine make_engine(const EngineOptions& e, const Family& family, Eigen::Index m,
                              const WeightFamily& w, const Shared& shared) {
  auto monte_carlo = [&]() -> ExpectationEngine {
    if (!shared.seed) throw CLI::ValidationError("--seed", "required by the Monte Carlo engine");
    return MonteCarloEngine{e.mc_samples, *shared.seed, shared.threads};
  };
  if (e.engine == "closed-form") return ClosedFormEngine{};
  if (e.engine == "mc") return monte_carlo();
  try {
    make_expectation(family, m, w, ClosedFormEngine{});
    return ClosedFormEngine{};
  } catch (const Error&) {
    return monte_carlo();
  }
}

std::string engine_name(const ExpectationEngine& e) {
  return std::holds_alternative<ClosedFormEngine>(e) ? "closed-form" : "mc";
}

ordered_json complex_json(Complex c) { return ordered_json::array({c.real(), c.imag()}); }

ordered_json vector_json(const ComplexVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

ordered_json matrix_json(const ComplexMatrix& a) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(complex_json(a(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json model_json(const ModelOptions& o) {
  return {{"data", o.data}, {"d", o.d},   {"nu", o.nu},          {"theta", o.theta},
          {"m", o.m},       {"loc", o.loc}, {"scatter", o.scatter}};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kParse, "cannot write " + path.string());
  out << text;
}

/// Manifest written before the computation starts and completed with output
/// hashes at the end.
class Manifest {
 public:
  Manifest(const std::string& command, ordered_json config, const Shared& shared,
           std::vector<std::string> outputs)
      : dir_(shared.out), outputs_(std::move(outputs)) {
    fs::create_directories(dir_);
    doc_["command"] = command;
    doc_["version"] = kVersion;
    doc_["seed"] = shared.seed ? ordered_json(*shared.seed) : ordered_json(nullptr);
    doc_["threads"] = shared.threads;
    doc_["config"] = std::move(config);
    doc_["started_at"] = utc_now();
    doc_["finished_at"] = nullptr;
    ordered_json files = ordered_json::array();
    for (const auto& name : outputs_) files.push_back({{"path", name}, {"sha256", nullptr}});
    doc_["outputs"] = std::move(files);
    flush();
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void finish() {
    doc_["finished_at"] = utc_now();
    for (auto& file : doc_["outputs"]) {
      file["sha256"] = io::sha256_file(dir_ / file["path"].get<std::string>());
    }
    flush();
  }

 private:
  void flush() { write_text(dir_ / "manifest.json", doc_.dump(2) + "\n"); }

  fs::path dir_;
  std::vector<std::string> outputs_;
  ordered_json doc_;
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kUnsolvableScale:
    case ErrorKind::kHypothesisViolation:
      return kHypothesis;
    case ErrorKind::kExperimentFailure:
      return kFailureRate;
    default:
      return kUsage;
  }
}

// --- estimate -------------------------------------------------------------

struct EstimateOptions {
  std::string input;
  WeightOptions weights;
  double d = 4.0;
  SolverOptions solver;
  Shared shared;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  const ComplexMatrix samples = io::read_samples_csv(o.input);
  const Eigen::Index m = samples.rows();
  const WeightFamily w = make_weights(o.weights, o.d, m);
  SolverConfig cfg;
  cfg.tol = o.solver.tol;
  cfg.max_iter = o.solver.max_iter;
  cfg.validate();

  Manifest manifest("estimate",
                    {{"input", o.input},
                     {"weights", w.describe()},
                     {"tol", cfg.tol},
                     {"max_iter", cfg.max_iter}},
                    o.shared, {"estimate.json"});
  const JointEstimate est = joint_m_estimate(samples, w, cfg);
  ordered_json doc;
  doc["N"] = samples.cols();
  doc["m"] = m;
  doc["weights"] = w.describe();
  doc["location"] = vector_json(est.location);
  doc["scatter"] = matrix_json(est.scatter.matrix());
  doc["iterations"] = est.iterations;
  doc["residual_t"] = est.residual_t;
  doc["residual_M"] = est.residual_M;
  doc["converged"] = est.converged;
  write_text(manifest.path("estimate.json"), doc.dump(2) + "\n");
  manifest.finish();

  out << "estimate: " << (est.converged ? "converged" : "NOT converged") << " after "
      << est.iterations << " sweeps (residual_t=" << est.residual_t
      << ", residual_M=" << est.residual_M << ")\n";
  return est.converged ? kOk : kNotConverged;
}

// --- asymptotics ----------------------------------------------------------

struct AsymptoticsOptions {
  ModelOptions model;
  WeightOptions weights;
  EngineOptions engine;
  Shared shared;
  bool full = false;
};

int cmd_asymptotics(const AsymptoticsOptions& o, std::ostream& out) {
  const CESModel model = make_model(o.model);
  const WeightFamily w = make_weights(o.weights, o.model.d, model.dim());
  const ExpectationEngine engine = make_engine(o.engine, model.family(), model.dim(), w, o.shared);

  ordered_json config = model_json(o.model);
  config["weights"] = w.describe();
  config["engine"] = engine_name(engine);
  config["mc_samples"] = o.engine.mc_samples;
  Manifest manifest("asymptotics", config, o.shared, {"asymptotics.json"});

  const AsymptoticCovariances th = asymptotic_covariances(model, w, engine);
  ordered_json doc;
  doc["engine"] = engine_name(engine);
  doc["sigma"] = th.sigma;
  doc["alpha"] = th.alpha;
  doc["beta"] = th.beta;
  doc["a1"] = th.a1;
  doc["a2"] = th.a2;
  doc["sigma1"] = th.sigma1;
  doc["sigma2"] = th.sigma2;
  doc["trace_Sigma_t"] = th.trace_Sigma_t();
  doc["trace_Sigma_M"] = th.trace_Sigma_M();
  if (o.full) {
    doc["M_e"] = matrix_json(th.M_e);
    doc["Sigma_t"] = matrix_json(th.Sigma_t);
    doc["Sigma_M"] = matrix_json(th.Sigma_M);
    doc["Omega_M"] = matrix_json(th.Omega_M);
  }
  write_text(manifest.path("asymptotics.json"), doc.dump(2) + "\n");
  manifest.finish();

  out << std::setprecision(10) << "sigma=" << th.sigma << " alpha=" << th.alpha
      << " beta=" << th.beta << " a1=" << th.a1 << " a2=" << th.a2 << "\n"
      << "sigma1=" << th.sigma1 << " sigma2=" << th.sigma2 << "\n"
      << "tr(Sigma_t)=" << th.trace_Sigma_t() << " tr(Sigma_M)=" << th.trace_Sigma_M() << "\n";
  return kOk;
}

// --- simulate -------------------------------------------------------------

struct SimulateOptions {
  ModelOptions model;
  WeightOptions weights;
  EngineOptions engine;
  SolverOptions solver;
  Shared shared;
  std::size_t trials = 1000;
  std::vector<std::size_t> grid;
};

std::string gnuplot_script() {
  return "# gnuplot -p plot.gp\n"
         "set datafile separator ','\n"
         "set logscale xy\n"
         "set key autotitle columnhead\n"
         "set xlabel 'Number of samples N'\n"
         "set ylabel 'Tr MSE'\n"
         "plot 'curve.csv' using 1:2 with linespoints title 'MSE(t) empirical', \\\n"
         "     '' using 1:3 with lines title 'tr(Sigma_t)/N', \\\n"
         "     '' using 1:4 with linespoints title 'MSE(M) empirical', \\\n"
         "     '' using 1:5 with lines title 'tr(Sigma_M)/N'\n";
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  if (!o.shared.seed) throw CLI::ValidationError("--seed", "simulate requires --seed");
  const CESModel model = make_model(o.model);
  const WeightFamily w = make_weights(o.weights, o.model.d, model.dim());
  const ExpectationEngine engine = make_engine(o.engine, model.family(), model.dim(), w, o.shared);
  ExperimentConfig cfg{model, w, o.grid.empty() ? reference_grid() : o.grid, o.trials,
                       *o.shared.seed, SolverConfig{}, engine, o.shared.threads};
  cfg.solver.tol = o.solver.tol;
  cfg.solver.max_iter = o.solver.max_iter;
  cfg.validate();

  ordered_json config = model_json(o.model);
  config["weights"] = w.describe();
  config["engine"] = engine_name(engine);
  config["mc_samples"] = o.engine.mc_samples;
  config["trials"] = o.trials;
  config["grid"] = cfg.sample_sizes;
  config["tol"] = cfg.solver.tol;
  config["max_iter"] = cfg.solver.max_iter;
  Manifest manifest("simulate", config, o.shared, {"curve.csv", "plot.gp"});

  const MseCurve curve = run_mse_experiment(cfg);
  std::ostringstream csv;
  csv << "N,mse_t_emp,mse_t_theory,mse_M_emp,mse_M_theory,failures,trials\n";
  for (const auto& p : curve.points) {
    csv << p.N << ',' << io::format_double(p.mse_t_emp) << ',' << io::format_double(p.mse_t_theory)
        << ',' << io::format_double(p.mse_M_emp) << ',' << io::format_double(p.mse_M_theory) << ','
        << p.failures << ',' << p.trials << '\n';
  }
  write_text(manifest.path("curve.csv"), csv.str());
  write_text(manifest.path("plot.gp"), gnuplot_script());
  manifest.finish();

  for (const auto& warning : curve.warnings) out << "warning: " << warning << "\n";
  out << "wrote " << manifest.path("curve.csv").string() << " (" << curve.points.size()
      << " rows)\n";
  return kOk;
}

// --- validate -------------------------------------------------------------

struct ValidateOptions {
  ModelOptions model;
  WeightOptions weights;
  EngineOptions engine;
  SolverOptions solver;
  Shared shared;
  std::string suite = "all";
  std::size_t samples = 1'000'000;
  std::size_t trials = 10'000;
  std::size_t n = 100;
};

ordered_json report_json(const CheckReport& r) {
  ordered_json lines = ordered_json::array();
  for (const auto& l : r.lines) {
    lines.push_back({{"quantity", l.quantity},
                     {"measured", l.measured},
                     {"bound", l.bound},
                     {"passed", l.passed},
                     {"gating", l.gating}});
  }
  return {{"check", r.name}, {"passed", r.passed()}, {"lines", lines}};
}

int cmd_validate(const ValidateOptions& o, std::ostream& out) {
  if (!o.shared.seed) throw CLI::ValidationError("--seed", "validate requires --seed");
  if (!(o.solver.tol > 0.0)) throw CLI::ValidationError("--tol", "must be > 0");
  const std::uint64_t seed = *o.shared.seed;
  const CESModel model = make_model(o.model);
  const WeightFamily w = make_weights(o.weights, o.model.d, model.dim());
  const ExpectationEngine engine = make_engine(o.engine, model.family(), model.dim(), w, o.shared);
  SolverConfig solver;
  solver.tol = o.solver.tol;
  solver.max_iter = o.solver.max_iter;
  solver.validate();

  ordered_json config = model_json(o.model);
  config["weights"] = w.describe();
  config["engine"] = engine_name(engine);
  config["suite"] = o.suite;
  config["samples"] = o.samples;
  config["trials"] = o.trials;
  config["N"] = o.n;
  Manifest manifest("validate", config, o.shared, {"validate.json"});

  const bool all = o.suite == "all";
  std::vector<CheckReport> reports;
  if (all || o.suite == "appendix") {
    reports.push_back(check_appendix_limits(model.family(), model.dim(), w, o.samples,
                                            derive_seed(seed, {1}), engine, o.shared.threads));
  }
  if (all || o.suite == "symmetry") {
    const ComplexMatrix z = sample_ces(model, std::max<std::size_t>(o.n, 4 * model.dim()),
                                       derive_seed(seed, {2}), o.shared.threads);
    SolverConfig tight = solver;
    tight.tol = std::min(solver.tol, 1e-12);
    tight.max_iter = std::max(solver.max_iter, 5000);
    reports.push_back(check_p_symmetry(z, w, tight));
  }
  ExperimentConfig exp{model, w, {o.n}, o.trials, derive_seed(seed, {3}), solver, engine,
                       o.shared.threads};
  if (all || o.suite == "circularity") {
    reports.push_back(check_location_circularity(exp, o.n, o.trials));
  }
  if (all || o.suite == "pseudo") {
    reports.push_back(check_scatter_pseudo_structure(exp, o.n, o.trials));
  }

  ordered_json doc = ordered_json::array();
  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.passed();
    doc.push_back(report_json(r));
    for (const auto& l : r.lines) {
      out << (l.gating ? (l.passed ? "PASS " : "FAIL ") : (l.passed ? "info " : "INFO "))
          << r.name << ": " << l.quantity << " = " << std::setprecision(6) << l.measured
          << " (bound " << l.bound << ")\n";
    }
  }
  write_text(manifest.path("validate.json"), doc.dump(2) + "\n");
  manifest.finish();
  out << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex joint M-estimators of location and scatter: estimation, asymptotic "
               "theory and Monte Carlo validation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Fit (t, M) to samples from a CSV file");
  estimate->add_option("--input", est.input, "Sample CSV (header re_0,im_0,...)")->required();
  add_weight_flags(estimate, est.weights);
  estimate->add_option("--d", est.d, "Student-t weight degrees of freedom")->capture_default_str();
  add_solver_flags(estimate, est.solver);
  add_shared_flags(estimate, est.shared);

  AsymptoticsOptions asy;
  auto* asymptotics = app.add_subcommand("asymptotics", "Consistency scale and asymptotic covariances");
  add_model_flags(asymptotics, asy.model);
  add_weight_flags(asymptotics, asy.weights);
  add_engine_flags(asymptotics, asy.engine);
  add_shared_flags(asymptotics, asy.shared);
  asymptotics->add_flag("--full", asy.full, "Also write M_e, Sigma_t, Sigma_M and Omega_M");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trace-of-MSE curves");
  add_model_flags(simulate, sim.model);
  add_weight_flags(simulate, sim.weights);
  add_engine_flags(simulate, sim.engine);
  add_solver_flags(simulate, sim.solver);
  add_shared_flags(simulate, sim.shared);
  simulate->add_option("--trials", sim.trials, "Trials per sample size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--grid", sim.grid, "Sample sizes (default: 5,6,8,...,100)")->delimiter(',');

  ValidateOptions val;
  auto* validate = app.add_subcommand("validate", "Run the numerical validation checks");
  add_model_flags(validate, val.model);
  add_weight_flags(validate, val.weights);
  add_engine_flags(validate, val.engine);
  add_solver_flags(validate, val.solver);
  add_shared_flags(validate, val.shared);
  validate->add_option("--suite", val.suite, "Which checks to run")
      ->check(CLI::IsMember({"all", "appendix", "symmetry", "circularity", "pseudo"}))
      ->capture_default_str();
  validate->add_option("--samples", val.samples, "Draws for the appendix check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  validate->add_option("--trials", val.trials, "Trials for the circularity/pseudo checks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  validate->add_option("--N", val.n, "Sample size for the circularity/pseudo checks")
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("cesm");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (*estimate) return cmd_estimate(est, out);
    if (*asymptotics) return cmd_asymptotics(asy, out);
    if (*simulate) return cmd_simulate(sim, out);
    return cmd_validate(val, out);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace cesm::cli
