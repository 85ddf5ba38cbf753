#include "k2ie/model_selection.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "k2ie/errors.hpp"

namespace k2ie {

using json = nlohmann::json;

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "kie") return EstimatorKind::kie;
  if (s == "fie") return EstimatorKind::fie;
  if (s == "k2ie") return EstimatorKind::k2ie;
  throw ConfigError("unknown estimator: " + s);
}

std::string estimator_to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kie: return "kie";
    case EstimatorKind::fie: return "fie";
    case EstimatorKind::k2ie: return "k2ie";
  }
  return "?";
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < n; ++i) {
    out.push_back(std::pow(10.0, llo + (lhi - llo) * i / (n - 1)));
  }
  return out;
}

CVPlan CVPlan::defaults(std::uint64_t seed) {
  CVPlan plan;
  plan.beta_grid = log_spaced(0.1, 100.0, 10);
  plan.gamma_grid = log_spaced(0.1, 100.0, 10);
  plan.seed = seed;
  return plan;
}

CVPlan CVPlan::real_data(std::uint64_t seed) {
  CVPlan plan = defaults(seed);
  plan.gamma_grid = log_spaced(0.001, 1.0, 10);
  return plan;
}

void CVPlan::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("thinning p must be in (0,1)");
  if (folds < 2) throw ConfigError("CV requires at least 2 folds");
  if (beta_grid.empty() || gamma_grid.empty()) {
    throw ConfigError("CV grids must be non-empty");
  }
  for (std::size_t i = 1; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > beta_grid[i - 1])) {
      throw ConfigError("beta grid must be strictly increasing");
    }
  }
  for (std::size_t i = 1; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > gamma_grid[i - 1])) {
      throw ConfigError("gamma grid must be strictly increasing");
    }
  }
}

Eigen::VectorXd beta_bar(const Domain& domain) {
  const HyperRect bb = domain.bounding_box();
  return (bb.hi - bb.lo).cwiseInverse();
}

std::pair<PointPattern, PointPattern> thin(const PointPattern& events, double p,
                                           Rng& rng) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("thinning p must be in (0,1)");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Index> train_idx, val_idx;
  for (std::size_t n = 0; n < events.size(); ++n) {
    (unit(rng) < p ? train_idx : val_idx).push_back(static_cast<Eigen::Index>(n));
  }
  auto take = [&](const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(idx.size()), events.dim());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      pts.row(static_cast<Eigen::Index>(k)) = events.points().row(idx[k]);
    }
    return PointPattern(std::move(pts));
  };
  return {take(train_idx), take(val_idx)};
}

double cv_loss_ls(const FittedK2IE& model, const PointPattern& validation,
                  double p) {
  const double s = (1.0 - p) / p;
  double data_term = 0.0;
  if (validation.size() > 0) {
    const Eigen::VectorXd vals =
        model.ek().map().features_matrix(validation.points()) * model.xi();
    data_term = vals.sum();
  }
  return s * s * model.integral_squared() - 2.0 * s * data_term;
}

double cv_loss_nll(const FittedModel& model, const PointPattern& validation,
                   double p) {
  const double s = (1.0 - p) / p;
  double loss = s * model.integral(model.domain(), /*clip=*/true);
  for (std::size_t n = 0; n < validation.size(); ++n) {
    const double lam = model.intensity(validation.point(n), /*clip=*/true);
    if (lam <= 0.0) return std::numeric_limits<double>::infinity();
    loss -= std::log(std::max(s * lam, 1e-10));
  }
  return loss;
}

OptimizerConfig cv_fie_optimizer() {
  // Shorter Adam schedule inside the 100-cell grid search.
  return OptimizerConfig{0.01, 400, 1e-4};
}

std::string CVResult::to_json() const {
  json j;
  j["beta_grid"] = beta_grid;
  j["gamma_grid"] = gamma_grid;
  j["beta_bar"] = std::vector<double>(beta_bar.data(), beta_bar.data() + beta_bar.size());
  j["mean_loss"] = mean_loss;
  j["fold_loss"] = fold_loss;
  j["selected"] = {
      {"beta_index", selected_beta_index},
      {"gamma_index", selected_gamma_index},
      {"beta_multiplier", beta_grid[static_cast<std::size_t>(selected_beta_index)]},
      {"gamma", selected_gamma},
      {"beta", std::vector<double>(selected_beta.data(),
                                   selected_beta.data() + selected_beta.size())},
  };
  return j.dump(2);
}

CVResult grid_search(const PointPattern& events, const Domain& domain,
                     EstimatorKind estimator, const CVPlan& plan, int M) {
  plan.validate();
  if (M < 1) throw ConfigError("M must be >= 1");

  const Eigen::VectorXd bbar = beta_bar(domain);
  const bool has_gamma = estimator != EstimatorKind::kie;
  const std::size_t n_beta = plan.beta_grid.size();
  const std::size_t n_gamma = has_gamma ? plan.gamma_grid.size() : 1;

  // Common random numbers: one thinning per fold, shared across all cells.
  std::vector<std::pair<PointPattern, PointPattern>> splits;
  for (int f = 0; f < plan.folds; ++f) {
    Rng rng = make_rng(plan.seed, static_cast<std::uint64_t>(f));
    splits.push_back(thin(events, plan.p, rng));
  }

  CVResult result;
  result.beta_grid = plan.beta_grid;
  result.gamma_grid = has_gamma ? plan.gamma_grid : std::vector<double>{};
  result.beta_bar = bbar;
  result.mean_loss.assign(n_beta, std::vector<double>(n_gamma, 0.0));
  result.fold_loss.assign(
      n_beta, std::vector<std::vector<double>>(
                  n_gamma, std::vector<double>(static_cast<std::size_t>(plan.folds), 0.0)));

  for (std::size_t b = 0; b < n_beta; ++b) {
    const KernelParams params(plan.beta_grid[b] * bbar);
    FeatureMap map = estimator == EstimatorKind::kie
                         ? FeatureMap(Eigen::MatrixXd(0, domain.dim()),
                                      Eigen::VectorXd(0), params, 0, true)
                         : build_feature_map(params, M, plan.seed, true);
    EdgeMatrix edge;
    if (has_gamma) edge = edge_matrix(map, domain);

    for (std::size_t g = 0; g < n_gamma; ++g) {
      std::shared_ptr<const EquivalentKernel> ek;
      if (has_gamma) {
        ek = std::make_shared<EquivalentKernel>(map, domain, plan.gamma_grid[g],
                                                edge);
      }
      for (int f = 0; f < plan.folds; ++f) {
        const auto& [train, val] = splits[static_cast<std::size_t>(f)];
        double loss;
        switch (estimator) {
          case EstimatorKind::k2ie: {
            FittedK2IE model = fit_k2ie(ek, train);
            loss = cv_loss_ls(model, val, plan.p);
            break;
          }
          case EstimatorKind::kie: {
            FittedKIE model = fit_kie(train, params, domain);
            loss = cv_loss_nll(model, val, plan.p);
            break;
          }
          case EstimatorKind::fie: {
            if (train.size() == 0) {
              loss = std::numeric_limits<double>::infinity();
              break;
            }
            try {
              FittedFIE model = fit_fie(ek, train, cv_fie_optimizer());
              loss = cv_loss_nll(model, val, plan.p);
            } catch (const NumericError&) {
              loss = std::numeric_limits<double>::infinity();
            }
            break;
          }
        }
        result.fold_loss[b][g][static_cast<std::size_t>(f)] = loss;
      }
      double mean = 0.0;
      for (double v : result.fold_loss[b][g]) mean += v;
      result.mean_loss[b][g] = mean / plan.folds;
    }
  }

  // Argmin; ties break to the smallest beta multiplier then smallest gamma.
  double best = std::numeric_limits<double>::infinity();
  int bi = -1, gi = -1;
  for (std::size_t b = 0; b < n_beta; ++b) {
    for (std::size_t g = 0; g < n_gamma; ++g) {
      if (result.mean_loss[b][g] < best) {
        best = result.mean_loss[b][g];
        bi = static_cast<int>(b);
        gi = static_cast<int>(g);
      }
    }
  }
  if (bi < 0) throw DataError("all CV grid cells disqualified");
  result.selected_beta_index = bi;
  result.selected_gamma_index = gi;
  result.selected_beta = plan.beta_grid[static_cast<std::size_t>(bi)] * bbar;
  result.selected_gamma =
      has_gamma ? plan.gamma_grid[static_cast<std::size_t>(gi)] : 0.0;
  return result;
}

}  // namespace k2ie
