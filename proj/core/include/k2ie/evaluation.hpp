#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "k2ie/domain.hpp"
#include "k2ie/estimators.hpp"
#include "k2ie/point_pattern.hpp"
#include "k2ie/simulation.hpp"

namespace k2ie {

struct MetricsRecord {
  std::string estimator;
  std::string dataset;
  int trial = 0;
  double l2 = 0.0;
  double labs = 0.0;
  double cpu_seconds = 0.0;
  std::optional<double> negativity_ratio;
  std::optional<double> test_ls;
  std::optional<double> test_nll_counts;
};

// Midpoint-rule grid over a domain's rectangles; points allocated per axis
// proportionally to side length relative to the bounding box.
struct EvalGrid {
  Eigen::MatrixXd points;   // P x d midpoints
  Eigen::VectorXd weights;  // cell volumes, sum = |X|
};
EvalGrid eval_grid(const Domain& domain, int grid_per_axis);

double l2_error(const IntensitySpec& truth, const FittedModel& model,
                int grid_per_axis);
double labs_error(const IntensitySpec& truth, const FittedModel& model,
                  int grid_per_axis);

// Fraction of paired trials where the model's L2 beats KIE's (strict).
double rho(const std::vector<double>& model_l2, const std::vector<double>& kie_l2);

// Fraction of raw (unclipped) negative intensity values on the grid.
double negativity_ratio(const FittedK2IE& model, int grid_per_axis = 500);

// Test least-squares loss: int lambda^2 - 2 sum_test lambda.
double test_ls_loss(const FittedModel& model, const PointPattern& test);

// Test NLL of counts over a cell partition.
double test_count_nll(const FittedModel& model, const PointPattern& test,
                      const Domain& cells);

// Process-CPU seconds consumed by fn().
double cpu_time_seconds(const std::function<void()>& fn);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& rec);

}  // namespace k2ie
