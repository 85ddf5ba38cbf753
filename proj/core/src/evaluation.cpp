#include "k2ie/evaluation.hpp"

#include <cmath>
#include <ctime>
#include <sstream>

#include "k2ie/errors.hpp"

namespace k2ie {

EvalGrid eval_grid(const Domain& domain, int grid_per_axis) {
  if (grid_per_axis < 1) throw ConfigError("grid_per_axis must be >= 1");
  const int d = domain.dim();
  const HyperRect bb = domain.bounding_box();
  const Eigen::VectorXd extent = bb.hi - bb.lo;

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> wts;
  for (const auto& rect : domain.rects()) {
    std::vector<int> counts(static_cast<std::size_t>(d));
    long total = 1;
    for (int i = 0; i < d; ++i) {
      const double frac = (rect.hi[i] - rect.lo[i]) / extent[i];
      counts[static_cast<std::size_t>(i)] =
          std::max(1, static_cast<int>(std::lround(grid_per_axis * frac)));
      total *= counts[static_cast<std::size_t>(i)];
    }
    const double w = rect.volume() / static_cast<double>(total);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) {
        const double step =
            (rect.hi[i] - rect.lo[i]) / counts[static_cast<std::size_t>(i)];
        x[i] = rect.lo[i] + (idx[static_cast<std::size_t>(i)] + 0.5) * step;
      }
      pts.push_back(std::move(x));
      wts.push_back(w);
      int axis = 0;
      while (axis < d) {
        if (++idx[static_cast<std::size_t>(axis)] <
            counts[static_cast<std::size_t>(axis)])
          break;
        idx[static_cast<std::size_t>(axis)] = 0;
        ++axis;
      }
      if (axis == d) break;
    }
  }

  EvalGrid grid;
  grid.points.resize(static_cast<Eigen::Index>(pts.size()), d);
  grid.weights.resize(static_cast<Eigen::Index>(wts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    grid.points.row(static_cast<Eigen::Index>(k)) = pts[k];
    grid.weights[static_cast<Eigen::Index>(k)] = wts[k];
  }
  return grid;
}

namespace {

template <typename Diff>
double integrated_error(const IntensitySpec& truth, const FittedModel& model,
                        int grid_per_axis, Diff diff) {
  const Domain& domain = truth.domain();
  const EvalGrid grid = eval_grid(domain, grid_per_axis);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < grid.points.rows(); ++k) {
    const Eigen::VectorXd x = grid.points.row(k);
    acc += grid.weights[k] * diff(truth(x), model.intensity(x, /*clip=*/true));
  }
  return acc / domain.measure();
}

}  // namespace

double l2_error(const IntensitySpec& truth, const FittedModel& model,
                int grid_per_axis) {
  return integrated_error(truth, model, grid_per_axis,
                          [](double a, double b) { return (a - b) * (a - b); });
}

double labs_error(const IntensitySpec& truth, const FittedModel& model,
                  int grid_per_axis) {
  return integrated_error(truth, model, grid_per_axis,
                          [](double a, double b) { return std::abs(a - b); });
}

double rho(const std::vector<double>& model_l2,
           const std::vector<double>& kie_l2) {
  if (model_l2.size() != kie_l2.size() || model_l2.empty()) {
    throw DataError("rho requires paired, non-empty L2 lists");
  }
  std::size_t wins = 0;
  for (std::size_t t = 0; t < model_l2.size(); ++t) {
    if (model_l2[t] < kie_l2[t]) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(model_l2.size());
}

double negativity_ratio(const FittedK2IE& model, int grid_per_axis) {
  const EvalGrid grid = eval_grid(model.domain(), grid_per_axis);
  Eigen::Index negatives = 0;
  for (Eigen::Index k = 0; k < grid.points.rows(); ++k) {
    if (model.intensity(grid.points.row(k), /*clip=*/false) < 0.0) ++negatives;
  }
  return static_cast<double>(negatives) / static_cast<double>(grid.points.rows());
}

double test_ls_loss(const FittedModel& model, const PointPattern& test) {
  double sq;
  if (const auto* k2 = dynamic_cast<const FittedK2IE*>(&model)) {
    sq = k2->integral_squared();
  } else if (const auto* fie = dynamic_cast<const FittedFIE*>(&model)) {
    // lambda = f^2; integrate lambda^2 = f^4 by quadrature on a grid.
    const EvalGrid grid = eval_grid(model.domain(), model.domain().dim() == 1 ? 10000 : 500);
    sq = 0.0;
    for (Eigen::Index k = 0; k < grid.points.rows(); ++k) {
      const double lam = fie->intensity(grid.points.row(k));
      sq += grid.weights[k] * lam * lam;
    }
  } else {
    const EvalGrid grid = eval_grid(model.domain(), model.domain().dim() == 1 ? 10000 : 500);
    sq = 0.0;
    for (Eigen::Index k = 0; k < grid.points.rows(); ++k) {
      const double lam = model.intensity(grid.points.row(k), /*clip=*/true);
      sq += grid.weights[k] * lam * lam;
    }
  }
  double data_term = 0.0;
  for (std::size_t n = 0; n < test.size(); ++n) {
    data_term += model.intensity(test.point(n), /*clip=*/true);
  }
  return sq - 2.0 * data_term;
}

double test_count_nll(const FittedModel& model, const PointPattern& test,
                      const Domain& cells) {
  double loss = 0.0;
  std::vector<std::size_t> counts(cells.n_rects(), 0);
  for (std::size_t n = 0; n < test.size(); ++n) {
    const int j = cells.rect_index(test.point(n));
    if (j >= 0) ++counts[static_cast<std::size_t>(j)];
  }
  for (std::size_t j = 0; j < cells.n_rects(); ++j) {
    const Domain cell({cells.rects()[j]});
    const double lam = model.integral(cell, /*clip=*/true);
    const double nj = static_cast<double>(counts[j]);
    loss += lam - nj * std::log(std::max(lam, 1e-10)) + std::lgamma(nj + 1.0);
  }
  return loss;
}

double cpu_time_seconds(const std::function<void()>& fn) {
  timespec t0{}, t1{};
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &t0);
  fn();
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &t1);
  return static_cast<double>(t1.tv_sec - t0.tv_sec) +
         1e-9 * static_cast<double>(t1.tv_nsec - t0.tv_nsec);
}

std::string metrics_csv_header() {
  return "estimator,dataset,trial,L2,Labs,cpu_seconds,negativity_ratio,L_s,L_c";
}

std::string metrics_csv_row(const MetricsRecord& rec) {
  std::ostringstream out;
  out.precision(12);
  out << rec.estimator << ',' << rec.dataset << ',' << rec.trial << ','
      << rec.l2 << ',' << rec.labs << ',' << rec.cpu_seconds << ',';
  if (rec.negativity_ratio) out << *rec.negativity_ratio;
  out << ',';
  if (rec.test_ls) out << *rec.test_ls;
  out << ',';
  if (rec.test_nll_counts) out << *rec.test_nll_counts;
  return out.str();
}

}  // namespace k2ie
