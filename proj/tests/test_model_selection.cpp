#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "k2ie/errors.hpp"
#include "k2ie/model_selection.hpp"
#include "k2ie/simulation.hpp"
#include "test_util.hpp"

using namespace k2ie;
using k2ie::testutil::integrate_1d;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

PointPattern simulate_1d_2(std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  return simulate_thinning(intensity_1d_2(), rng);
}

}  // namespace

TEST_CASE("log_spaced endpoints and monotonicity") {
  const auto g = log_spaced(0.1, 100.0, 10);
  REQUIRE(g.size() == 10);
  CHECK(g.front() == doctest::Approx(0.1));
  CHECK(g.back() == doctest::Approx(100.0));
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
  }
  CHECK(log_spaced(2.0, 9.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("plan presets and validation") {
  const auto plan = CVPlan::defaults(5);
  CHECK(plan.p == 0.6);
  CHECK(plan.folds == 5);
  CHECK(plan.seed == 5);
  CHECK(plan.beta_grid.size() == 10);
  const auto real = CVPlan::real_data();
  CHECK(real.gamma_grid.front() == doctest::Approx(0.001));
  CHECK(real.gamma_grid.back() == doctest::Approx(1.0));

  CVPlan bad = plan;
  bad.p = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.folds = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.gamma_grid = {2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("beta_bar is the reciprocal bounding-box extent") {
  CHECK(beta_bar(Domain::interval(0, 50))[0] == doctest::Approx(0.02));
  Eigen::VectorXd lo(2), hi(2);
  lo << 0, 0;
  hi << 5, 2;
  const Eigen::VectorXd bb = beta_bar(Domain::box(lo, hi));
  CHECK(bb[0] == doctest::Approx(0.2));
  CHECK(bb[1] == doctest::Approx(0.5));
}

TEST_CASE("thinning partitions the pattern with the right proportions") {
  const auto events = simulate_1d_2(77).concat(simulate_1d_2(78))
                          .concat(simulate_1d_2(79));
  const std::size_t N = events.size();
  REQUIRE(N > 50);
  Rng rng(3);
  const auto [train, val] = thin(events, 0.6, rng);
  CHECK(train.size() + val.size() == N);
  // Binomial 3-sigma band on the training share.
  const double sd = std::sqrt(0.6 * 0.4 * double(N));
  CHECK(std::abs(double(train.size()) - 0.6 * double(N)) < 3.0 * sd);
  // Order preserved within each part.
  std::size_t ti = 0, vi = 0;
  for (std::size_t n = 0; n < N; ++n) {
    const double x = events.point(n)[0];
    if (ti < train.size() && train.point(ti)[0] == x) {
      ++ti;
    } else if (vi < val.size() && val.point(vi)[0] == x) {
      ++vi;
    }
  }
  CHECK(ti == train.size());
  CHECK(vi == val.size());

  Rng r1(9), r2(9);
  const auto [a1, b1] = thin(events, 0.6, r1);
  const auto [a2, b2] = thin(events, 0.6, r2);
  CHECK(a1.points() == a2.points());
  CHECK(b1.points() == b2.points());
  Rng r3(9);
  CHECK_THROWS_AS(thin(events, 1.5, r3), ConfigError);
}

TEST_CASE("least-squares CV loss matches its definition") {
  const Domain dom = Domain::interval(0, 5);
  Eigen::MatrixXd tr(4, 1), va(3, 1);
  tr << 0.5, 1.0, 2.5, 4.0;
  va << 0.7, 2.0, 3.3;
  Eigen::VectorXd beta = vec1(1.0);
  const auto model =
      fit_k2ie(PointPattern(tr), KernelParams(beta), dom, 1.0, 20, 4);
  const double p = 0.6, s = (1.0 - p) / p;
  double data = 0.0;
  for (int n = 0; n < 3; ++n) data += model.intensity(va.row(n), /*clip=*/false);
  const double integral_sq = integrate_1d(
      [&](double x) {
        const double v = model.intensity(vec1(x), false);
        return v * v;
      },
      0.0, 5.0, 1e-10);
  const double oracle = s * s * integral_sq - 2.0 * s * data;
  CHECK(cv_loss_ls(model, PointPattern(va), p) ==
        doctest::Approx(oracle).epsilon(1e-7));
  CHECK(cv_loss_ls(model, PointPattern::empty(1), p) ==
        doctest::Approx(s * s * model.integral_squared()).epsilon(1e-12));
}

TEST_CASE("Poisson NLL CV loss matches its definition and disqualifies zeros") {
  const Domain dom = Domain::interval(0, 5);
  Eigen::MatrixXd tr(4, 1), va(2, 1);
  tr << 0.5, 1.0, 2.5, 4.0;
  va << 0.7, 2.0;
  const auto model =
      fit_fie(PointPattern(tr), KernelParams(vec1(1.0)), dom, 1.0, 20, 4);
  const double p = 0.6, s = (1.0 - p) / p;
  double oracle = s * model.integral(dom);
  for (int n = 0; n < 2; ++n) {
    oracle -= std::log(s * model.intensity(va.row(n)));
  }
  CHECK(cv_loss_nll(model, PointPattern(va), p) ==
        doctest::Approx(oracle).epsilon(1e-10));

  // A zero intensity at a validation point disqualifies the cell; an empty
  // training fold is the degenerate case that produces one.
  const auto kie = fit_kie(PointPattern::empty(1), KernelParams(vec1(1.0)), dom);
  Eigen::MatrixXd far(1, 1);
  far << 4.9;
  CHECK(std::isinf(cv_loss_nll(kie, PointPattern(far), p)));
}

TEST_CASE("grid search selects finite minima deterministically") {
  const auto events = simulate_1d_2(123);
  const Domain dom = Domain::interval(0, 5);
  CVPlan plan;
  plan.p = 0.6;
  plan.folds = 2;
  plan.beta_grid = {1.0, 10.0, 60.0};
  plan.gamma_grid = {0.5, 5.0};
  plan.seed = 42;

  const auto res = grid_search(events, dom, EstimatorKind::k2ie, plan, 30);
  REQUIRE(res.mean_loss.size() == 3);
  REQUIRE(res.mean_loss[0].size() == 2);
  CHECK(res.selected_beta_index >= 0);
  CHECK(res.selected_beta_index < 3);
  const double best = res.mean_loss[size_t(res.selected_beta_index)]
                                   [size_t(res.selected_gamma_index)];
  for (const auto& row : res.mean_loss) {
    for (double v : row) CHECK(best <= v);
  }
  CHECK(res.selected_beta[0] ==
        doctest::Approx(plan.beta_grid[size_t(res.selected_beta_index)] * 0.2));
  CHECK(res.selected_gamma ==
        plan.gamma_grid[size_t(res.selected_gamma_index)]);

  const auto res2 = grid_search(events, dom, EstimatorKind::k2ie, plan, 30);
  CHECK(res2.selected_beta_index == res.selected_beta_index);
  CHECK(res2.selected_gamma_index == res.selected_gamma_index);
  CHECK(res2.mean_loss == res.mean_loss);

  // KIE collapses the gamma dimension.
  const auto kie = grid_search(events, dom, EstimatorKind::kie, plan, 30);
  CHECK(kie.mean_loss[0].size() == 1);
  CHECK(kie.selected_gamma == 0.0);
  CHECK(kie.gamma_grid.empty());

  // FIE path runs end to end on a small grid.
  CVPlan small = plan;
  small.beta_grid = {10.0};
  small.gamma_grid = {1.0};
  const auto fie = grid_search(events, dom, EstimatorKind::fie, small, 20);
  CHECK(std::isfinite(fie.mean_loss[0][0]));

  // Serialization is valid JSON carrying the selection.
  const auto j = nlohmann::json::parse(res.to_json());
  CHECK(j["selected"]["gamma"].get<double>() == res.selected_gamma);
  CHECK(j["mean_loss"].size() == 3);
}

TEST_CASE("estimator name round trip") {
  for (auto k : {EstimatorKind::kie, EstimatorKind::fie, EstimatorKind::k2ie}) {
    CHECK(estimator_from_string(estimator_to_string(k)) == k);
  }
  CHECK_THROWS_AS(estimator_from_string("nope"), ConfigError);
}
