#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "k2ie/domain.hpp"
#include "k2ie/estimators.hpp"
#include "k2ie/point_pattern.hpp"
#include "k2ie/rng.hpp"

namespace k2ie {

enum class EstimatorKind { kie, fie, k2ie };

EstimatorKind estimator_from_string(const std::string& s);
std::string estimator_to_string(EstimatorKind kind);

struct CVPlan {
  double p = 0.6;
  int folds = 5;
  std::vector<double> beta_grid;   // multipliers on beta_bar
  std::vector<double> gamma_grid;
  std::uint64_t seed = 0;

  // 10 log-spaced values in [0.1, 100] for both grids.
  static CVPlan defaults(std::uint64_t seed = 0);
  // Real-data preset: gamma in [0.001, 1].
  static CVPlan real_data(std::uint64_t seed = 0);
  void validate() const;
};

std::vector<double> log_spaced(double lo, double hi, int n);

// Reference inverse length-scale: reciprocal bounding-box extent per axis.
Eigen::VectorXd beta_bar(const Domain& domain);

// Independent p-thinning partition of a pattern.
std::pair<PointPattern, PointPattern> thin(const PointPattern& events, double p,
                                           Rng& rng);

// Least-squares validation loss for K2IE, rescaled to the validation
// intensity scale by (1-p)/p; integral term analytic via xi^T A xi.
double cv_loss_ls(const FittedK2IE& model, const PointPattern& validation,
                  double p);

// Poisson NLL validation loss for KIE/FIE at the rescaled intensity.
double cv_loss_nll(const FittedModel& model, const PointPattern& validation,
                   double p);

struct CVResult {
  std::vector<double> beta_grid;
  std::vector<double> gamma_grid;
  Eigen::VectorXd beta_bar;
  // mean_loss[b][g]; gamma dimension collapsed to one entry for KIE.
  std::vector<std::vector<double>> mean_loss;
  std::vector<std::vector<std::vector<double>>> fold_loss;
  int selected_beta_index = 0;
  int selected_gamma_index = 0;
  double selected_gamma = 0.0;
  Eigen::VectorXd selected_beta;

  std::string to_json() const;
};

// Adam schedule used for FIE fits inside CV; shorter than the final fit.
OptimizerConfig cv_fie_optimizer();

CVResult grid_search(const PointPattern& events, const Domain& domain,
                     EstimatorKind estimator, const CVPlan& plan, int M);

}  // namespace k2ie
