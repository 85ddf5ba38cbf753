#pragma once

#include <optional>
#include <string>
#include <vector>

#include "k2ie/domain.hpp"
#include "k2ie/evaluation.hpp"
#include "k2ie/model_selection.hpp"
#include "k2ie/point_pattern.hpp"
#include "k2ie/simulation.hpp"

namespace k2ie {

struct ExperimentConfig {
  std::string dataset = "1d_1";
  std::vector<EstimatorKind> estimators = {EstimatorKind::kie, EstimatorKind::fie,
                                           EstimatorKind::k2ie};
  int trials = 20;
  int M = 250;  // 2M = 500 features
  CVPlan cv = CVPlan::defaults();
  std::uint64_t root_seed = 0;

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

// One simulated trial: events over the (possibly reduced) observation
// window plus the matching ground truth.
struct TrialData {
  PointPattern events;
  Domain domain;
  IntensitySpec truth;
};

bool dataset_is_2d(const std::string& dataset);

// Deterministic per-trial simulation for a named dataset preset.
TrialData make_trial(const std::string& dataset, std::uint64_t root_seed,
                     int trial);

struct TrialResult {
  std::vector<MetricsRecord> records;
};

// Full per-trial pipeline: CV, timed fit, metrics.
TrialResult run_trial(const ExperimentConfig& config, int trial,
                      std::optional<int> M_override = std::nullopt);

struct BenchmarkOutput {
  std::vector<MetricsRecord> records;
  std::string results_csv;
  std::string summary_json;
};

// Runs all trials (fanned over `threads` workers, deterministic reduce) and
// aggregates mean/sd plus rho against KIE when present. sweep_2m, when
// non-empty, repeats the run for each feature count (k2ie only makes sense
// there but all configured estimators are honored).
BenchmarkOutput run_benchmark(const ExperimentConfig& config,
                              const std::vector<int>& sweep_2m = {},
                              int threads = 1);

int env_thread_cap();

}  // namespace k2ie
