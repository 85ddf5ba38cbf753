#include "k2ie/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "k2ie/errors.hpp"
#include "k2ie/estimators.hpp"

namespace k2ie {

using json = nlohmann::json;

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.dataset = j.value("dataset", cfg.dataset);
  if (j.contains("estimators")) {
    cfg.estimators.clear();
    for (const auto& s : j["estimators"]) {
      cfg.estimators.push_back(estimator_from_string(s.get<std::string>()));
    }
  }
  if (cfg.estimators.empty()) throw ConfigError("estimator set must be non-empty");
  cfg.trials = j.value("trials", cfg.trials);
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  cfg.M = j.value("M", cfg.M);
  if (cfg.M < 1) throw ConfigError("M must be >= 1");
  cfg.root_seed = j.value("root_seed", cfg.root_seed);
  if (j.contains("cv")) {
    const auto& jc = j["cv"];
    cfg.cv.p = jc.value("p", cfg.cv.p);
    cfg.cv.folds = jc.value("folds", cfg.cv.folds);
    if (jc.contains("beta_grid")) {
      cfg.cv.beta_grid = jc["beta_grid"].get<std::vector<double>>();
    }
    if (jc.contains("gamma_grid")) {
      cfg.cv.gamma_grid = jc["gamma_grid"].get<std::vector<double>>();
    }
    cfg.cv.validate();
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

bool dataset_is_2d(const std::string& dataset) {
  return dataset.rfind("2d_", 0) == 0;
}

namespace {

double keep_prob_for(const std::string& dataset) {
  if (dataset == "2d_p10") return 1.0;
  if (dataset == "2d_p09") return 0.9;
  if (dataset == "2d_p08") return 0.8;
  throw ConfigError("unknown 2D dataset: " + dataset);
}

IntensitySpec base_1d(const std::string& dataset) {
  if (dataset.rfind("1d_1", 0) == 0) return intensity_1d_1();
  if (dataset.rfind("1d_2", 0) == 0) return intensity_1d_2();
  if (dataset.rfind("1d_3", 0) == 0) return intensity_1d_3();
  throw ConfigError("unknown dataset: " + dataset);
}

}  // namespace

TrialData make_trial(const std::string& dataset, std::uint64_t root_seed,
                     int trial) {
  const std::uint64_t seed = derive_seed(root_seed, static_cast<std::uint64_t>(trial));
  if (dataset_is_2d(dataset)) {
    const double keep = keep_prob_for(dataset);
    IntensitySpec spec = sample_gp_cox_2d(derive_seed(seed, 2));
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 5.0, 5.0;
    const Domain cells = partition_box(HyperRect(lo, hi), 5);
    Rng drop_rng = make_rng(seed, 3);
    Domain domain = cells;
    for (;;) {
      try {
        domain = drop_subdomains(cells, keep, drop_rng);
        break;
      } catch (const DataError&) {
        continue;  // all cells dropped; redraw
      }
    }
    Rng sim_rng = make_rng(seed, 1);
    PointPattern events = filter_to_domain(simulate_thinning(spec, sim_rng), domain);
    return TrialData{std::move(events), domain, spec.restricted(domain)};
  }
  IntensitySpec spec = base_1d(dataset);
  if (dataset.size() > 4 && dataset.substr(4) == "_x10") spec = spec.scaled(10.0);
  Rng sim_rng = make_rng(seed, 1);
  PointPattern events = simulate_thinning(spec, sim_rng);
  return TrialData{std::move(events), spec.domain(), spec};
}

TrialResult run_trial(const ExperimentConfig& config, int trial,
                      std::optional<int> M_override) {
  const int M = M_override.value_or(config.M);
  TrialData data = make_trial(config.dataset, config.root_seed, trial);
  const bool is_2d = data.domain.dim() == 2;
  const int metric_grid = is_2d ? 500 : 10000;

  TrialResult result;
  int est_index = 0;
  for (EstimatorKind est : config.estimators) {
    CVPlan plan = config.cv;
    plan.seed = derive_seed(derive_seed(config.root_seed, static_cast<std::uint64_t>(trial)),
                            100 + static_cast<std::uint64_t>(est_index));
    ++est_index;

    const CVResult cv = grid_search(data.events, data.domain, est, plan, M);
    const KernelParams params(cv.selected_beta);

    std::unique_ptr<FittedModel> model;
    const double cpu = cpu_time_seconds([&] {
      switch (est) {
        case EstimatorKind::k2ie:
          model = std::make_unique<FittedK2IE>(fit_k2ie(
              data.events, params, data.domain, cv.selected_gamma, M, plan.seed));
          break;
        case EstimatorKind::kie:
          model = std::make_unique<FittedKIE>(fit_kie(data.events, params, data.domain));
          break;
        case EstimatorKind::fie:
          model = std::make_unique<FittedFIE>(fit_fie(
              data.events, params, data.domain, cv.selected_gamma, M, plan.seed));
          break;
      }
    });

    MetricsRecord rec;
    rec.estimator = estimator_to_string(est);
    rec.dataset = config.dataset;
    rec.trial = trial;
    rec.l2 = l2_error(data.truth, *model, metric_grid);
    rec.labs = labs_error(data.truth, *model, metric_grid);
    rec.cpu_seconds = cpu;
    if (est == EstimatorKind::k2ie && is_2d) {
      rec.negativity_ratio =
          negativity_ratio(static_cast<const FittedK2IE&>(*model), 500);
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

int env_thread_cap() {
  if (const char* env = std::getenv("K2IE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

namespace {

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats mean_sd(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

BenchmarkOutput run_benchmark(const ExperimentConfig& config,
                              const std::vector<int>& sweep_2m, int threads) {
  std::vector<std::pair<std::string, std::optional<int>>> runs;
  if (sweep_2m.empty()) {
    runs.emplace_back(config.dataset, std::nullopt);
  } else {
    for (int n2m : sweep_2m) {
      if (n2m < 2 || n2m % 2 != 0) {
        throw ConfigError("sweep values are feature counts 2M; must be even and >= 2");
      }
      runs.emplace_back(config.dataset + "[2M=" + std::to_string(n2m) + "]",
                        n2m / 2);
    }
  }

  BenchmarkOutput out;
  for (const auto& [tag, M_override] : runs) {
    std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= config.trials) return;
        results[static_cast<std::size_t>(t)] = run_trial(config, t, M_override);
      }
    };
    const int n_workers = std::max(1, std::min(threads, config.trials));
    if (n_workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (auto& tr : results) {
      for (auto& rec : tr.records) {
        rec.dataset = tag;
        out.records.push_back(std::move(rec));
      }
    }
  }

  std::ostringstream csv;
  csv << metrics_csv_header() << '\n';
  for (const auto& rec : out.records) csv << metrics_csv_row(rec) << '\n';
  out.results_csv = csv.str();

  // Per (dataset, estimator) aggregates; rho is paired against KIE by trial.
  std::map<std::string, std::map<std::string, std::vector<const MetricsRecord*>>> by_ds;
  for (const auto& rec : out.records) {
    by_ds[rec.dataset][rec.estimator].push_back(&rec);
  }
  json summary;
  summary["note"] = "brackets in the reference tables are reported here as "
                    "sample standard deviations";
  for (const auto& [ds, by_est] : by_ds) {
    for (const auto& [est, recs] : by_est) {
      std::vector<double> l2s, labss, cpus, negs;
      for (const auto* r : recs) {
        l2s.push_back(r->l2);
        labss.push_back(r->labs);
        cpus.push_back(r->cpu_seconds);
        if (r->negativity_ratio) negs.push_back(*r->negativity_ratio);
      }
      json je;
      const Stats sl2 = mean_sd(l2s), slabs = mean_sd(labss), scpu = mean_sd(cpus);
      je["L2"] = {{"mean", sl2.mean}, {"sd", sl2.sd}};
      je["Labs"] = {{"mean", slabs.mean}, {"sd", slabs.sd}};
      je["cpu_seconds"] = {{"mean", scpu.mean}, {"sd", scpu.sd}};
      if (!negs.empty()) {
        const Stats sneg = mean_sd(negs);
        je["negativity_ratio"] = {{"mean", sneg.mean}, {"sd", sneg.sd}};
      }
      je["trials"] = recs.size();
      if (est != "kie" && by_est.count("kie")) {
        std::vector<double> kie_l2;
        for (const auto* r : by_est.at("kie")) kie_l2.push_back(r->l2);
        if (kie_l2.size() == l2s.size()) je["rho"] = rho(l2s, kie_l2);
      }
      summary[ds][est] = je;
    }
  }
  out.summary_json = summary.dump(2);
  return out;
}

}  // namespace k2ie
