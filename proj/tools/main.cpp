// k2ie command-line tool: simulate / cv / fit / eval / benchmark.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "k2ie/errors.hpp"
#include "k2ie/estimators.hpp"
#include "k2ie/evaluation.hpp"
#include "k2ie/experiment.hpp"
#include "k2ie/model_selection.hpp"
#include "k2ie/simulation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace k2ie;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

std::string trial_name(int trial, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "trial_%03d%s", trial, suffix);
  return buf;
}

Eigen::VectorXd parse_beta(const std::string& s, int dim) {
  std::vector<double> vals;
  std::istringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  if (vals.size() == 1) {
    return Eigen::VectorXd::Constant(dim, vals[0]);
  }
  if (static_cast<int>(vals.size()) != dim) {
    throw ConfigError("--beta must have 1 or d components");
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

CVPlan plan_from_options(const std::string& plan_path, bool real_data_gamma,
                         double p, int folds, std::uint64_t seed) {
  CVPlan plan = real_data_gamma ? CVPlan::real_data(seed) : CVPlan::defaults(seed);
  if (!plan_path.empty()) {
    std::ifstream in(plan_path);
    if (!in) throw ConfigError("cannot open plan file: " + plan_path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid plan JSON: " + plan_path);
    plan.p = j.value("p", plan.p);
    plan.folds = j.value("folds", plan.folds);
    if (j.contains("beta_grid")) plan.beta_grid = j["beta_grid"].get<std::vector<double>>();
    if (j.contains("gamma_grid")) plan.gamma_grid = j["gamma_grid"].get<std::vector<double>>();
    plan.seed = j.value("seed", plan.seed);
  }
  if (p > 0) plan.p = p;
  if (folds > 0) plan.folds = folds;
  plan.seed = seed;
  plan.validate();
  return plan;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 int trials_override, const std::string& custom_spec) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (trials_override > 0) cfg.trials = trials_override;
  fs::create_directories(out_dir);

  if (!custom_spec.empty()) {
    const IntensitySpec spec = load_intensity_spec(custom_spec);
    spec.domain().save(out_dir + "/domain.json");
    for (int t = 0; t < cfg.trials; ++t) {
      Rng rng = make_rng(derive_seed(cfg.root_seed, static_cast<std::uint64_t>(t)), 1);
      simulate_thinning(spec, rng).save(out_dir + "/" + trial_name(t, ".csv"));
    }
    return 0;
  }

  for (int t = 0; t < cfg.trials; ++t) {
    TrialData data = make_trial(cfg.dataset, cfg.root_seed, t);
    data.events.save(out_dir + "/" + trial_name(t, ".csv"));
    data.domain.save(out_dir + "/" + trial_name(t, "_domain.json"));
  }
  // Shared full-window domain for convenience.
  TrialData first = make_trial(cfg.dataset, cfg.root_seed, 0);
  if (dataset_is_2d(cfg.dataset)) {
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 5.0, 5.0;
    Domain::box(lo, hi).save(out_dir + "/domain.json");
  } else {
    first.domain.save(out_dir + "/domain.json");
  }
  return 0;
}

int cmd_cv(const std::string& events_path, const std::string& domain_path,
           const std::string& estimator, const std::string& plan_path,
           bool real_data_gamma, double p, int folds, std::uint64_t seed, int M,
           const std::string& out_path) {
  const PointPattern events = PointPattern::load(events_path);
  const Domain domain = Domain::load(domain_path);
  const CVPlan plan = plan_from_options(plan_path, real_data_gamma, p, folds, seed);
  const CVResult result =
      grid_search(events, domain, estimator_from_string(estimator), plan, M);
  const std::string text = result.to_json();
  if (!out_path.empty()) write_file(out_path, text + "\n");
  std::cout << text << std::endl;
  return 0;
}

int cmd_fit(const std::string& events_path, const std::string& domain_path,
            const std::string& estimator, const std::string& beta_str,
            double gamma, int M, std::uint64_t seed,
            const std::string& out_path) {
  const PointPattern events = PointPattern::load(events_path);
  const Domain domain = Domain::load(domain_path);
  const EstimatorKind kind = estimator_from_string(estimator);
  const KernelParams params(parse_beta(beta_str, domain.dim()));
  if (kind != EstimatorKind::kie && !(gamma > 0.0)) {
    throw ConfigError("--gamma must be positive for " + estimator);
  }

  std::unique_ptr<FittedModel> model;
  const double cpu = cpu_time_seconds([&] {
    switch (kind) {
      case EstimatorKind::k2ie:
        model = std::make_unique<FittedK2IE>(
            fit_k2ie(events, params, domain, gamma, M, seed));
        break;
      case EstimatorKind::kie:
        model = std::make_unique<FittedKIE>(fit_kie(events, params, domain));
        break;
      case EstimatorKind::fie:
        model = std::make_unique<FittedFIE>(
            fit_fie(events, params, domain, gamma, M, seed));
        break;
    }
  });

  json j = json::parse(model->to_json());
  j["cpu_seconds"] = cpu;
  if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
  std::cout << "cpu_seconds " << cpu << std::endl;
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& truth_path,
             const std::string& test_path, int cells_per_axis, int grid,
             const std::string& profile_path, const std::string& out_path) {
  const auto model = load_model(model_path);
  json metrics;

  if (!truth_path.empty()) {
    const IntensitySpec truth = load_intensity_spec(truth_path);
    if (truth.domain().dim() != model->domain().dim()) {
      throw DataError("truth and model dimension mismatch");
    }
    const int g = grid > 0 ? grid : (model->domain().dim() == 1 ? 10000 : 500);
    metrics["L2"] = l2_error(truth, *model, g);
    metrics["Labs"] = labs_error(truth, *model, g);
    if (!profile_path.empty()) {
      const EvalGrid eg = eval_grid(truth.domain(), g);
      std::ostringstream csv;
      csv.precision(12);
      for (int i = 0; i < truth.domain().dim(); ++i) csv << 'x' << (i + 1) << ',';
      csv << "lambda_true,lambda_est\n";
      for (Eigen::Index k = 0; k < eg.points.rows(); ++k) {
        const Eigen::VectorXd x = eg.points.row(k);
        for (Eigen::Index i = 0; i < x.size(); ++i) csv << x[i] << ',';
        csv << truth(x) << ',' << model->intensity(x, true) << '\n';
      }
      write_file(profile_path, csv.str());
    }
  }

  if (const auto* k2 = dynamic_cast<const FittedK2IE*>(model.get());
      k2 && model->domain().dim() == 2) {
    metrics["negativity_ratio"] = negativity_ratio(*k2, 500);
  }

  if (!test_path.empty()) {
    const PointPattern test = PointPattern::load(test_path);
    metrics["L_s"] = test_ls_loss(*model, test);
    const Domain cells =
        partition_box(model->domain().bounding_box(), cells_per_axis);
    metrics["L_c"] = test_count_nll(*model, test, cells);
  }

  const std::string text = metrics.dump(2);
  if (!out_path.empty()) write_file(out_path, text + "\n");
  std::cout << text << std::endl;
  return 0;
}

int cmd_benchmark(const std::string& config_path, int trials_override,
                  const std::string& estimators_csv, const std::string& sweep_str,
                  const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (trials_override > 0) cfg.trials = trials_override;
  if (!estimators_csv.empty()) {
    cfg.estimators.clear();
    std::istringstream ss(estimators_csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cfg.estimators.push_back(estimator_from_string(cell));
    }
  }
  std::vector<int> sweep;
  if (!sweep_str.empty()) {
    std::istringstream ss(sweep_str);
    std::string cell;
    while (std::getline(ss, cell, ',')) sweep.push_back(std::stoi(cell));
  }
  const BenchmarkOutput out = run_benchmark(cfg, sweep, env_thread_cap());
  fs::create_directories(out_dir);
  write_file(out_dir + "/results.csv", out.results_csv);
  write_file(out_dir + "/summary.json", out.summary_json + "\n");
  std::cout << out.summary_json << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel method-based kernel intensity estimation toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate synthetic event files");
  std::string sim_config, sim_out = "out", sim_spec;
  int sim_trials = 0;
  sim->add_option("--config", sim_config, "Experiment config JSON")->required();
  sim->add_option("--out-dir", sim_out, "Output directory");
  sim->add_option("--trials", sim_trials, "Override trial count");
  sim->add_option("--intensity-spec", sim_spec, "Custom intensity-spec JSON");

  // cv
  auto* cv = app.add_subcommand("cv", "Hyperparameter grid search");
  std::string cv_events, cv_domain, cv_est = "k2ie", cv_plan, cv_out;
  bool cv_real = false;
  double cv_p = 0;
  int cv_folds = 0, cv_M = 250;
  std::uint64_t cv_seed = 0;
  cv->add_option("--events", cv_events)->required();
  cv->add_option("--domain", cv_domain)->required();
  cv->add_option("--estimator", cv_est, "kie|fie|k2ie");
  cv->add_option("--plan", cv_plan, "CV plan JSON");
  cv->add_flag("--real-data-gamma", cv_real, "gamma grid preset [0.001, 1]");
  cv->add_option("--p", cv_p, "Thinning retention probability");
  cv->add_option("--folds", cv_folds);
  cv->add_option("--seed", cv_seed);
  cv->add_option("--M", cv_M, "Feature half-count (2M features)");
  cv->add_option("--out", cv_out, "Output JSON path");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a model at fixed hyperparameters");
  std::string fit_events, fit_domain, fit_est = "k2ie", fit_beta, fit_out;
  double fit_gamma = 0;
  int fit_M = 250;
  std::uint64_t fit_seed = 0;
  fit->add_option("--events", fit_events)->required();
  fit->add_option("--domain", fit_domain)->required();
  fit->add_option("--estimator", fit_est, "kie|fie|k2ie");
  fit->add_option("--beta", fit_beta, "Inverse length-scales (scalar or comma list)")
      ->required();
  fit->add_option("--gamma", fit_gamma);
  fit->add_option("--M", fit_M);
  fit->add_option("--seed", fit_seed);
  fit->add_option("--out", fit_out, "Model JSON path");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a fitted model");
  std::string ev_model, ev_truth, ev_test, ev_profile, ev_out;
  int ev_cells = 10, ev_grid = 0;
  ev->add_option("--model", ev_model)->required();
  ev->add_option("--truth", ev_truth, "Intensity-spec JSON for L2/|L|");
  ev->add_option("--test", ev_test, "Held-out events CSV for L_s/L_c");
  ev->add_option("--cells-per-axis", ev_cells, "Count-likelihood partition");
  ev->add_option("--grid", ev_grid, "Evaluation grid per axis");
  ev->add_option("--profile", ev_profile, "Write (x, truth, estimate) CSV");
  ev->add_option("--out", ev_out, "Metrics JSON path");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Full simulate/CV/fit/metrics loop");
  std::string bench_config, bench_est, bench_sweep, bench_out = "bench_out";
  int bench_trials = 0;
  bench->add_option("--config", bench_config)->required();
  bench->add_option("--trials", bench_trials, "Override trial count");
  bench->add_option("--estimators", bench_est, "Comma list subset");
  bench->add_option("--sweep-M", bench_sweep, "Comma list of feature counts 2M");
  bench->add_option("--out-dir", bench_out);

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_trials, sim_spec);
    if (cv->parsed())
      return cmd_cv(cv_events, cv_domain, cv_est, cv_plan, cv_real, cv_p,
                    cv_folds, cv_seed, cv_M, cv_out);
    if (fit->parsed())
      return cmd_fit(fit_events, fit_domain, fit_est, fit_beta, fit_gamma,
                     fit_M, fit_seed, fit_out);
    if (ev->parsed())
      return cmd_eval(ev_model, ev_truth, ev_test, ev_cells, ev_grid,
                      ev_profile, ev_out);
    if (bench->parsed())
      return cmd_benchmark(bench_config, bench_trials, bench_est, bench_sweep,
                           bench_out);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error code=2 msg=\"" << e.what() << "\"" << std::endl;
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error code=2 msg=\"" << e.what() << "\"" << std::endl;
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error code=3 msg=\"" << e.what() << "\"" << std::endl;
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error code=4 msg=\"" << e.what() << "\"" << std::endl;
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error code=4 msg=\"" << e.what() << "\"" << std::endl;
    return 4;
  }
  return 0;
}
